import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pformed.flows import (
    Motion,
    SmoothMap,
    convergence_order,
    jacobian_det,
    lie_convergence,
    lie_derivative,
    lie_fd_oracle,
    pointwise_deviation,
    positive_jacobian_report,
    pullback,
    pullback_values,
    sample_points,
)
from pformed.forms import DifferentialForm, VectorField, contract, exterior_d, form_residual, wedge
from pformed.poly import PolynomialField

from strategies import forms, vectors

TOL = 1e-12


def x(i, n=3):
    return PolynomialField.coordinate(n, i)


def dx(*idx, n=3, coeff=1.0):
    return DifferentialForm.basis_form(n, idx, coeff)


def test_pullback_examples():
    vol = DifferentialForm.volume(3)
    assert pullback(SmoothMap.linear(2 * np.eye(3)), vol) == vol * 8.0
    w = dx(1, 3, coeff=x(1) * x(2))
    assert pullback(SmoothMap.identity(3), w) == w
    shear = SmoothMap([x(1) + x(2), x(2), x(3)])
    assert pullback(shear, dx(1)) == dx(1) + dx(2)


def test_pullback_substitutes_coefficients():
    psi = SmoothMap([x(1) * 2, x(2) + 1, x(3)])
    assert pullback(psi, DifferentialForm.scalar(x(1) * x(2))) == DifferentialForm.scalar(x(1) * x(2) * 2 + x(1) * 2)


def test_pullback_dimension_mismatch():
    with pytest.raises(ValueError):
        pullback(SmoothMap.identity(2), dx(1))


def test_jacobian_det_examples():
    assert jacobian_det(SmoothMap.identity(3)) == PolynomialField.constant(3, 1.0)
    assert jacobian_det(SmoothMap.linear(2 * np.eye(3))) == PolynomialField.constant(3, 8.0)
    assert jacobian_det(SmoothMap([x(1) + x(2), x(2), x(3)])) == PolynomialField.constant(3, 1.0)


def test_jacobian_det_against_numpy():
    rng = np.random.default_rng(5)
    psi = SmoothMap([x(1) ** 2 + x(2), x(2) * x(3), x(1) - x(3) ** 3])
    pts = rng.uniform(-1, 1, (10, 3))
    np.testing.assert_allclose(jacobian_det(psi).evaluate(pts), np.linalg.det(psi.jacobian_values(pts)),
                               rtol=1e-12, atol=1e-12)


def test_motion_at_zero_is_identity():
    m = Motion(VectorField([x(2), x(1) * x(3), 1.0]), VectorField([x(3), 0.0, x(1)]))
    assert m.at(0.0).components == SmoothMap.identity(3).components


def test_motion_velocity_is_generator():
    w = VectorField([x(2) ** 2, -x(1), 0.5])
    m = Motion(w, VectorField([x(3), 1.0, 0.0]))
    t = 1e-4
    diff = [(a - b) / (2 * t) for a, b in zip(m.at(t).components, m.at(-t).components)]
    assert all(max(abs(c), 0) < 1e-10 for d, wi in zip(diff, w) for c in (d - wi).terms.values())


def test_motion_dimension_mismatch():
    with pytest.raises(ValueError):
        Motion(VectorField.zero(3), VectorField.zero(2))


def test_lie_derivative_examples():
    e1 = VectorField.coordinate(3, 1)
    assert lie_derivative(e1, dx(2, coeff=x(1))) == dx(2)
    v = VectorField([x(2), x(1) * x(3), 1.0])
    assert lie_derivative(v, DifferentialForm.scalar(PolynomialField.constant(3, 4.0))).is_zero()


def test_lie_derivative_of_function_is_directional_derivative():
    v = VectorField([x(2), x(3), x(1)])
    f = x(1) * x(2) ** 2
    lie = lie_derivative(v, DifferentialForm.scalar(f))
    assert lie[()] == x(2) * x(2) ** 2 + x(3) * 2 * x(1) * x(2)


def test_lie_derivative_of_volume_is_divergence():
    v = VectorField([x(1) ** 2, x(2) * x(3), x(1)])
    lie = lie_derivative(v, DifferentialForm.volume(3))
    assert lie == DifferentialForm.volume(3) * (x(1) * 2 + x(3))


def test_fd_oracle_examples():
    pts = sample_points(3)
    m = Motion(VectorField.coordinate(3, 1))
    assert pointwise_deviation(lie_fd_oracle(m, dx(2, coeff=x(1)), 1e-3), dx(2), pts) <= 1e-6
    zero = Motion(VectorField.zero(3))
    assert lie_fd_oracle(zero, dx(1, 2, coeff=x(3))).is_zero()


def test_fd_oracle_rejects_nonpositive_step():
    m = Motion(VectorField.coordinate(3, 1))
    for t in (0.0, -1e-3):
        with pytest.raises(ValueError):
            lie_fd_oracle(m, dx(1), t)


def test_fd_halving_step_quarters_deviation():
    m = Motion(VectorField([-x(2), x(1), 0.0]))
    omega = DifferentialForm.volume(3) * x(1) ** 2
    dev, order = lie_convergence(m, omega, 1e-3)
    assert dev > 1e-9
    assert 1.9 <= order <= 2.1


def test_convergence_order_helper():
    assert convergence_order([4e-6, 1e-6]) == pytest.approx(2.0)
    assert math.isinf(convergence_order([1e-6, 0.0]))


def test_sample_points_fixed_and_in_unit_box():
    a, b = sample_points(4), sample_points(4)
    assert a.shape == (32, 4)
    assert np.array_equal(a, b)
    assert np.all((a > 0) & (a < 1))


def test_positive_jacobian_report_flags_folds():
    pts = sample_points(2)
    fold = SmoothMap([x(1, 2) * -1.0, x(2, 2)])
    worst, bad = positive_jacobian_report(fold, pts)
    assert worst < 0 and bad == 32
    assert positive_jacobian_report(SmoothMap.identity(2), pts) == (1.0, 0)


def motions(n):
    return st.builds(Motion, vectors(n, 2), vectors(n, 2))


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_pullback_is_multiplicative_and_commutes_with_d(data):
    n = data.draw(st.integers(2, 3))
    k = data.draw(st.integers(0, n))
    l = data.draw(st.integers(0, n - k))
    a, b = data.draw(forms(n, k, 2)), data.draw(forms(n, l, 2))
    psi = data.draw(motions(n)).at(0.4)
    assert form_residual(pullback(psi, wedge(a, b)), wedge(pullback(psi, a), pullback(psi, b))) <= TOL
    assert form_residual(pullback(psi, exterior_d(a)), exterior_d(pullback(psi, a))) <= TOL


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_pullback_of_volume_is_jacobian(data):
    n = data.draw(st.integers(2, 4))
    psi = data.draw(motions(n)).at(0.7)
    vol = DifferentialForm.volume(n)
    assert form_residual(pullback(psi, vol), vol * jacobian_det(psi)) <= TOL


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_pointwise_pullback_matches_symbolic(data):
    n = data.draw(st.integers(2, 4))
    k = data.draw(st.integers(0, n))
    a = data.draw(forms(n, k, 3))
    psi = data.draw(motions(n)).at(0.3)
    pts = sample_points(n)
    exact = pullback(psi, a).evaluate(pts)
    fast = pullback_values(psi, a, pts)
    for K, vals in fast.items():
        np.testing.assert_allclose(vals, exact.get(K, 0.0), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_lie_derivative_properties(data):
    n = data.draw(st.integers(2, 4))
    k = data.draw(st.integers(0, n))
    l = data.draw(st.integers(0, n - k))
    a, b = data.draw(forms(n, k)), data.draw(forms(n, l))
    v, u = data.draw(vectors(n)), data.draw(vectors(n))
    lhs = lie_derivative(v, wedge(a, b))
    assert form_residual(lhs, wedge(lie_derivative(v, a), b) + wedge(a, lie_derivative(v, b))) <= TOL
    if k < n:
        assert form_residual(lie_derivative(v, exterior_d(a)), exterior_d(lie_derivative(v, a))) <= TOL
    assert form_residual(lie_derivative(v * 2.0 + u * -3.0, a),
                         lie_derivative(v, a) * 2.0 + lie_derivative(u, a) * -3.0) <= TOL


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_cartan_formula_via_contraction(data):
    # independent assembly: v _| d omega + d(v _| omega)
    n = data.draw(st.integers(2, 4))
    k = data.draw(st.integers(1, n - 1))
    a, v = data.draw(forms(n, k)), data.draw(vectors(n))
    rhs = contract(v, exterior_d(a)) + exterior_d(contract(v, a))
    assert form_residual(lie_derivative(v, a), rhs) <= TOL


@settings(max_examples=15, deadline=None)
@given(st.data())
def test_fd_oracle_converges_at_second_order(data):
    n = data.draw(st.integers(2, 3))
    k = data.draw(st.integers(0, n))
    a = data.draw(forms(n, k, 2))
    m = data.draw(motions(n))
    dev, order = lie_convergence(m, a, 1e-3)
    if dev > 1e-9:
        assert 1.8 <= order <= 2.2


@settings(max_examples=15, deadline=None)
@given(st.data())
def test_fd_oracle_motion_independent_in_the_limit(data):
    n = 3
    a = data.draw(forms(n, 1, 2))
    w, u = data.draw(vectors(n, 2)), data.draw(vectors(n, 2))
    gaps = [pointwise_deviation(lie_fd_oracle(Motion(w, u), a, t), lie_fd_oracle(Motion(w), a, t))
            for t in (1e-2, 5e-3)]
    assert gaps[1] <= 0.6 * gaps[0] + 1e-10
