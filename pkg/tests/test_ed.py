import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pformed import r3
from pformed.ed import EDSystem, energy, energy_under_motion, maxwell_residual, traction
from pformed.flows import Motion
from pformed.forms import DifferentialForm, VectorField, form_residual
from pformed.poly import PolynomialField
from pformed.regions import QuadratureRule, Region, integrate_volume

from strategies import forms, polys, vectors

UNIT = Region.unit(3)


def x(i):
    return PolynomialField.coordinate(3, i)


def const(*v):
    return VectorField.constant(list(v))


def test_traction_examples():
    s = EDSystem.electrostatic(const(1, 0, 0), PolynomialField.constant(3, 1.0))
    assert traction(s) == DifferentialForm.basis_form(3, (2, 3))
    s0 = EDSystem.electrostatic(const(1, 0, 0), PolynomialField.zero(3))
    assert traction(s0).is_zero()
    s1 = EDSystem.magnetostatic(const(0, 0, 1), VectorField([0.0, x(1), 0.0]))
    # dx3 ^ x1 dx2 = -x1 dx2^dx3, whose proxy is H x alpha_sharp = (-x1, 0, 0)
    assert traction(s1) == DifferentialForm.basis_form(3, (2, 3), -x(1))
    assert r3.proxy_of_2form(traction(s1)) == VectorField([-x(1), 0.0, 0.0])


def test_grade_validation_messages():
    g2 = DifferentialForm.basis_form(3, (1, 2))
    a1 = DifferentialForm.basis_form(3, (1,))
    with pytest.raises(ValueError, match=r"grade\(g\) must be n-p-1 = 1"):
        EDSystem(3, 1, g2, a1)
    with pytest.raises(ValueError, match=r"grade\(alpha\) must be p = 0"):
        EDSystem(3, 0, g2, a1)
    with pytest.raises(ValueError):
        EDSystem(3, 3, DifferentialForm.zero(3, 0), DifferentialForm.volume(3))


def test_maxwell_examples():
    s = EDSystem.electrostatic(VectorField([x(1), 0.0, 0.0]), x(2))
    assert maxwell_residual(s) == (0.0, 0.0)
    assert s.J == DifferentialForm.volume(3)
    s1 = EDSystem.magnetostatic(VectorField([0.0, 0.0, x(1)]), const(0, 0, 0))
    assert r3.proxy_of_2form(s1.J) == const(0, -1, 0)


def test_energy_electrostatic_golden():
    rep = energy(EDSystem.electrostatic(const(1, 0, 0), x(1)), UNIT)
    for v in (rep.volume, rep.boundary, rep.split):
        assert v == pytest.approx(1.0, abs=1e-14)


def test_energy_magnetostatic_golden():
    rep = energy(EDSystem.magnetostatic(const(0, 0, 1), VectorField([0.0, x(1), 0.0])), UNIT)
    for v in (rep.volume, rep.boundary, rep.split):
        assert v == pytest.approx(-1.0, abs=1e-14)


def test_energy_vanishes_for_potential_zero_on_boundary():
    bump = x(1) * (1 - x(1)) * x(2) * (1 - x(2)) * x(3) * (1 - x(3))
    rep = energy(EDSystem.electrostatic(VectorField([x(2), x(3) * x(1), 1.0]), bump), UNIT)
    assert rep.boundary == 0.0
    assert abs(rep.volume) <= 1e-14


def test_constant_potential_on_region():
    # alpha constant on the region: only the charge term int rho alpha survives
    D = VectorField([x(1) ** 2, x(2), 0.0])
    rep = energy(EDSystem.electrostatic(D, PolynomialField.constant(3, 2.0)), UNIT)
    assert rep.volume == pytest.approx(2.0 * (1.0 + 1.0), abs=1e-13)


def test_region_dimension_mismatch():
    s = EDSystem.electrostatic(const(1, 0, 0), x(1))
    with pytest.raises(ValueError):
        energy(s, Region.unit(2))


def test_energy_under_motion_at_zero_equals_split():
    s = EDSystem.magnetostatic(VectorField([x(2), x(1) * x(3), 1.0]), VectorField([x(3) ** 2, 0.0, x(1)]))
    m = Motion(VectorField([x(2), 1.0, x(1) * x(1)]), VectorField([0.0, x(3), 1.0]))
    rep = energy(s, UNIT)
    assert energy_under_motion(s, UNIT, m, 0.0) == pytest.approx(rep.split, abs=1e-13)


def test_translation_leaves_constant_system_invariant():
    g = DifferentialForm.basis_form(3, (1, 3), 2.0) + DifferentialForm.basis_form(3, (2, 3), -1.0)
    a = DifferentialForm.basis_form(3, (2,), 0.5)
    s = EDSystem(3, 1, DifferentialForm.basis_form(3, (3,), 1.5), a)
    m = Motion(const(0.3, -1.0, 2.0))
    values = [energy_under_motion(s, UNIT, m, t) for t in (0.0, 0.1, -0.4, 2.0)]
    assert max(values) - min(values) <= 1e-14
    assert g.grade == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2), st.data())
def test_routes_agree(p, data):
    s = EDSystem(3, p, data.draw(forms(3, 2 - p)), data.draw(forms(3, p)))
    rep = energy(s, UNIT)
    assert rep.max_residual() <= 1e-9 * rep.scale
    assert maxwell_residual(s) == (0.0, 0.0)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_p2_equals_swapped_p0(data):
    g, a = data.draw(forms(3, 0)), data.draw(forms(3, 2))
    e2 = energy(EDSystem(3, 2, g, a), UNIT).volume
    e0 = energy(EDSystem(3, 0, a, g), UNIT).volume
    assert e2 == pytest.approx(e0, rel=1e-10, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2), st.data(), st.floats(-2, 2), st.floats(-2, 2))
def test_bilinearity(p, data, a, b):
    g1, g2 = data.draw(forms(3, 2 - p)), data.draw(forms(3, 2 - p))
    al1, al2 = data.draw(forms(3, p)), data.draw(forms(3, p))
    E = lambda g, al: energy(EDSystem(3, p, g, al), UNIT).volume  # noqa: E731
    lhs = E(g1, al1 * a + al2 * b)
    assert lhs == pytest.approx(a * E(g1, al1) + b * E(g1, al2), rel=1e-10, abs=1e-10)
    lhs = E(g1 * a + g2 * b, al1)
    assert lhs == pytest.approx(a * E(g1, al1) + b * E(g2, al1), rel=1e-10, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(vectors(3), polys(3))
def test_p0_vector_form(D, alpha):
    rep = energy(EDSystem.electrostatic(D, alpha), UNIT)
    dens = r3.div(D) * alpha + r3.dot(D, r3.grad(alpha))
    want = integrate_volume(r3.density_to_3form(dens), UNIT, QuadratureRule(6))
    assert rep.volume == pytest.approx(want, rel=1e-10, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(vectors(3), vectors(3))
def test_p1_vector_form(H, A):
    rep = energy(EDSystem.magnetostatic(H, A), UNIT)
    dens = r3.dot(r3.curl(H), A) - r3.dot(H, r3.curl(A))
    want = integrate_volume(r3.density_to_3form(dens), UNIT, QuadratureRule(6))
    assert rep.volume == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_report_serialises_routes():
    rep = energy(EDSystem.electrostatic(const(1, 0, 0), x(1)), UNIT)
    d = rep.as_dict()
    assert set(d["routes"]) == {"volume", "boundary", "split"}
    assert set(d["residuals"]) == {"volume-boundary", "volume-split", "boundary-split"}
    assert form_residual(traction(EDSystem.electrostatic(const(1, 0, 0), x(1))),
                         DifferentialForm.basis_form(3, (2, 3), x(1))) == 0.0
