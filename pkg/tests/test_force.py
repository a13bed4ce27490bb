import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pformed import r3
from pformed.ed import EDSystem, energy, energy_under_motion
from pformed.flows import Motion
from pformed.force import (
    ELECTROSTATIC_TERMS,
    MAGNETOSTATIC_TERMS,
    electric_field,
    electrostatic_force_terms,
    force,
    force_alt,
    force_fd,
    magnetostatic_force_terms,
    magnetostatic_pointwise_check,
    magnetostatic_vector_density,
    transported_energy_oracle_p0,
    transported_energy_oracle_p1,
    udot_printed_density,
)
from pformed.forms import VectorField
from pformed.poly import PolynomialField, poly_residual
from pformed.regions import Box, Region

from strategies import forms, polys, vectors

UNIT = Region.unit(3)


def x(i):
    return PolynomialField.coordinate(3, i)


def const(*v):
    return VectorField.constant(list(v))


E1 = const(1, 0, 0)
GOLDEN = EDSystem.electrostatic(E1, x(1) ** 2 * 0.5)


def test_zero_velocity_gives_zero_force():
    rep = force(GOLDEN, UNIT, VectorField.zero(3))
    assert rep.general_cartan == 0.0 and rep.general_alt == 0.0


def test_electrostatic_golden_all_routes():
    rep = force(GOLDEN, UNIT, E1, h=1e-3)
    assert rep.general_cartan == pytest.approx(1.0, abs=1e-14)
    assert rep.general_alt == pytest.approx(1.0, abs=1e-14)
    assert rep.boundary == pytest.approx(1.0, abs=1e-14)
    assert rep.fd_oracle == pytest.approx(1.0, abs=1e-6)


def test_force_is_derivative_of_energy_in_time():
    # P_t for a translation x -> x + t e1 on alpha = x1^2/2 is 1/2 + t over the unit box
    m = Motion(E1)
    values = [energy_under_motion(GOLDEN, UNIT, m, t) for t in (0.0, 0.25)]
    assert values[0] == pytest.approx(0.5)
    assert values[1] - values[0] == pytest.approx(0.25, abs=1e-14)


def test_force_scales_with_velocity():
    w = VectorField([x(2), x(1) * x(3), 1.0])
    assert force(GOLDEN, UNIT, w * 2.0).general_cartan == pytest.approx(2 * force(GOLDEN, UNIT, w).general_cartan)


def test_alt_with_closed_potential():
    # F = d alpha = 0: only int J ^ d(w _| alpha) remains
    s = EDSystem.magnetostatic(VectorField([x(2) * x(3), x(1), 0.0]), r3.grad(x(1) * x(2)))
    w = VectorField([x(1), 1.0, x(2)])
    assert s.F.is_zero()
    assert force_alt(s, UNIT, w) == pytest.approx(force(s, UNIT, w).general_cartan, abs=1e-12)


def test_fd_rejects_nonpositive_step():
    with pytest.raises(ValueError):
        force_fd(GOLDEN, UNIT, Motion(E1), 0.0)


def test_fd_motion_must_match_velocity():
    with pytest.raises(ValueError):
        force(GOLDEN, UNIT, E1, motion=Motion(const(0, 1, 0)), h=1e-3)


def test_fd_second_order_term_does_not_change_limit():
    w = VectorField([x(2), x(3), x(1) * x(2)])
    s = EDSystem.electrostatic(VectorField([x(1) * x(2), 1.0, x(3)]), x(1) * x(3) + x(2) ** 2)
    plain = force(s, UNIT, w, motion=Motion(w), h=1e-3)
    curved = force(s, UNIT, w, motion=Motion(w, VectorField([x(3) ** 2, x(1), 0.5])), h=1e-3)
    assert plain.fd_oracle == pytest.approx(plain.general_cartan, abs=1e-5)
    assert curved.fd_oracle == pytest.approx(plain.general_cartan, abs=1e-5)


def test_fd_order_is_second():
    w = VectorField([x(2) ** 2, x(3), x(1)])
    s = EDSystem.magnetostatic(VectorField([x(3), x(1) ** 2, x(2)]), VectorField([x(2) * x(3), x(1), x(3) ** 2]))
    rep = force(s, UNIT, w, h=1e-3)
    assert rep.fd_order >= 1.9
    assert abs(rep.general_cartan - rep.fd_oracle) <= 1e-5


def test_electrostatic_terms_golden_under_minus_grad():
    t = electrostatic_force_terms(E1, x(1) ** 2 * 0.5, E1, UNIT, convention="-grad")
    assert (t["charge_term"], t["dipole_term"], t["stress_term"]) == pytest.approx((0.0, -1.0, 0.0), abs=1e-14)
    assert t["boundary_form"] == pytest.approx(-1.0, abs=1e-14)
    assert set(t) == set(ELECTROSTATIC_TERMS)


def test_electrostatic_sign_map():
    D = VectorField([x(1) * x(2), x(3), 1.0])
    alpha = x(1) * x(3) - x(2) ** 2
    w = VectorField([x(2), 1.0, x(1)])
    cartan = force(EDSystem.electrostatic(D, alpha), UNIT, w).general_cartan
    for conv, sign in (("+grad", 1.0), ("-grad", -1.0)):
        t = electrostatic_force_terms(D, alpha, w, UNIT, convention=conv)
        total = t["charge_term"] + t["dipole_term"] + t["stress_term"]
        assert total == pytest.approx(sign * cartan, abs=1e-12)
        assert total == pytest.approx(t["boundary_form"], abs=1e-12)


def test_electrostatic_zero_charge_and_uniform_potential():
    w = VectorField([x(2), x(1) * x(3), 1.0])
    t = electrostatic_force_terms(const(1, 2, 3), x(1) * x(2), w, UNIT)
    assert t["charge_term"] == 0.0
    D = VectorField([x(1) ** 2, 0.0, 0.0])
    t = electrostatic_force_terms(D, PolynomialField.constant(3, 2.0), w, UNIT)
    assert t["dipole_term"] == 0.0 and t["stress_term"] == 0.0 and t["charge_term"] == 0.0


def test_electric_field_convention_flag():
    assert electric_field(x(1) * x(2), "-grad") == -r3.grad(x(1) * x(2))
    with pytest.raises(ValueError):
        electric_field(x(1), "grad")


def test_reductions_require_r3():
    with pytest.raises(ValueError):
        electrostatic_force_terms(VectorField.zero(2), x(1), VectorField.zero(3), UNIT)


def test_magnetostatic_golden():
    t = magnetostatic_force_terms(const(0, 0, 1), VectorField([0.0, x(1), 0.0]), VectorField([x(1), 0.0, 0.0]), UNIT)
    assert set(t) == set(MAGNETOSTATIC_TERMS) | {"total"}
    for name in ("lorentz", "kelvin", "hb_stress", "grad_alpha", "current_stress"):
        assert t[name] == pytest.approx(0.0, abs=1e-14)
    assert t["pressure"] == pytest.approx(-1.0, abs=1e-14)
    assert t["total"] == pytest.approx(-1.0, abs=1e-14)


def test_magnetostatic_zero_velocity():
    t = magnetostatic_force_terms(VectorField([x(2), x(3), x(1)]), VectorField([x(3), 0.0, x(2)]), VectorField.zero(3), UNIT)
    assert all(v == 0.0 for v in t.values())


def test_uniform_field_half_lorentz():
    B, J, w = np.array([0.3, -0.7, 0.5]), np.array([0.2, 0.9, -0.4]), np.array([1.0, -0.5, 0.25])
    X = r3.position()
    A = r3.cross(VectorField.constant(B), X) * 0.5
    H = r3.cross(VectorField.constant(J), X) * 0.5
    assert r3.curl(A) == VectorField.constant(B)
    assert r3.vector_residual(r3.curl(H), VectorField.constant(J)) == 0.0
    region = Region.box((-1, 0, 0), (1, 1, 2))
    t = magnetostatic_force_terms(H, A, VectorField.constant(w), region)
    lorentz = float(np.dot(np.cross(J, B), w)) * region.volume
    assert t["grad_alpha"] == pytest.approx(-0.5 * lorentz, abs=1e-10)
    assert t["lorentz"] == pytest.approx(lorentz, abs=1e-10)


def test_pointwise_check_trivial_cases():
    A = VectorField([x(2) ** 2, x(1) * x(3), 0.0])
    w = VectorField([x(3), x(1), x(2) ** 2])
    assert magnetostatic_pointwise_check(VectorField.zero(3), A, w) <= 1e-12
    assert magnetostatic_pointwise_check(VectorField([x(2), 1.0, x(3)]), VectorField.zero(3), w) == 0.0


@settings(max_examples=25, deadline=None)
@given(vectors(3), vectors(3), vectors(3))
def test_magnetostatic_pointwise_and_printed_rate(H, A, w):
    assert magnetostatic_pointwise_check(H, A, w) <= 1e-9
    assert poly_residual(magnetostatic_vector_density(H, A, w), udot_printed_density(H, A, w)) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(vectors(3), vectors(3), vectors(3))
def test_magnetostatic_total_matches_cartan(H, A, w):
    total = magnetostatic_force_terms(H, A, w, UNIT)["total"]
    cartan = force(EDSystem.magnetostatic(H, A), UNIT, w).general_cartan
    assert total == pytest.approx(cartan, rel=1e-8, abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2), st.data())
def test_route_agreement_random(p, data):
    s = EDSystem(3, p, data.draw(forms(3, 2 - p)), data.draw(forms(3, p)))
    w = data.draw(vectors(3))
    rep = force(s, UNIT, w)
    assert abs(rep.general_cartan - rep.general_alt) <= 1e-9 * rep.scale
    assert abs(rep.general_cartan - rep.boundary) <= 1e-9 * rep.scale
    assert abs(rep.general_cartan - rep.split) <= 1e-9 * rep.scale


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 1), st.data(), st.floats(-2, 2), st.floats(-2, 2))
def test_linearity_and_region_additivity(p, data, a, b):
    s = EDSystem(3, p, data.draw(forms(3, 2 - p)), data.draw(forms(3, p)))
    w1, w2 = data.draw(vectors(3)), data.draw(vectors(3))
    F = lambda w, R=UNIT: force(s, R, w).general_cartan  # noqa: E731
    assert F(w1 * a + w2 * b) == pytest.approx(a * F(w1) + b * F(w2), rel=1e-10, abs=1e-10)
    halves = [Region((Box((0, 0, 0), (1, 0.3, 1)),)), Region((Box((0, 0.3, 0), (1, 1, 1)),))]
    assert sum(F(w1, R) for R in halves) == pytest.approx(F(w1), rel=1e-10, abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(vectors(3, 2), polys(3, 2), vectors(3, 2), vectors(3, 1), vectors(3, 2))
def test_transported_oracles_agree_with_pullback(D, alpha, H, A, w):
    m = Motion(w, VectorField([x(1) * 0.1, 0.0, x(2) * 0.2]))
    for t in (0.0, 0.01, -0.02):
        e0 = energy_under_motion(EDSystem.electrostatic(D, alpha), UNIT, m, t)
        assert transported_energy_oracle_p0(D, alpha, UNIT, m, t) == pytest.approx(e0, rel=1e-8, abs=1e-8)
        e1 = energy_under_motion(EDSystem.magnetostatic(H, A), UNIT, m, t)
        assert transported_energy_oracle_p1(H, A, UNIT, m, t) == pytest.approx(e1, rel=1e-8, abs=1e-8)


def test_transported_oracle_at_zero_is_static_energy():
    D, alpha = VectorField([x(2), x(1), 1.0]), x(1) * x(3)
    m = Motion(VectorField([x(2), 0.0, 1.0]))
    assert transported_energy_oracle_p0(D, alpha, UNIT, m, 0.0) == pytest.approx(
        energy(EDSystem.electrostatic(D, alpha), UNIT).volume, abs=1e-13)


def test_transported_oracle_rejects_folded_configuration():
    m = Motion(const(0, 0, 0), VectorField([x(1) * -2.0, 0.0, 0.0]))
    # x1 -> x1 (1 - 2 t^2) folds at t = 1
    with pytest.raises(ValueError, match="nonpositive Jacobian"):
        transported_energy_oracle_p0(E1, x(1), UNIT, m, 1.0)
    with pytest.raises(ValueError, match="nonpositive Jacobian"):
        transported_energy_oracle_p1(const(0, 0, 1), VectorField([0.0, x(1), 0.0]), UNIT, m, 1.0)


def test_report_fields():
    rep = force(GOLDEN, UNIT, E1, h=1e-3)
    d = rep.as_dict()
    assert {"general_cartan", "general_alt", "fd_oracle", "boundary", "split"} <= set(d["routes"])
    assert all(math.isfinite(v) for v in d["routes"].values())
    assert rep.scale == pytest.approx(1.0 + max(abs(v) for v in d["routes"].values()))
