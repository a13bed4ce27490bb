"""Force functionals F_R(w) = d/dt P_t |_{t=0}.

Coordinate-free routes:

* ``force`` evaluates int_R d(g ^ L_w alpha) (plus its boundary and split
  forms) with the Lie derivative from the Cartan formula;
* ``force_alt`` evaluates int J ^ (w _| F) + s g ^ d(w _| F) + J ^ d(w _| alpha);
* ``force_fd`` differentiates ``energy_under_motion`` numerically.

The R^3 reductions express the same number through vector fields.  Sign
conventions: the coordinate-free force is +dP/dt.  Electrostatic terms are
reported with E = +grad(alpha) by default; with E = -grad(alpha) the same term
formulas give -dP/dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import r3
from .ed import EDSystem, energy_under_motion, motion_quadrature
from .flows import Motion, convergence_order, lie_derivative, sample_points
from .forms import VectorField, contract, exterior_d, wedge
from .poly import PolynomialField, evaluate_many
from .regions import (
    QuadratureRule,
    Region,
    integrate_boundary,
    integrate_density,
    integrate_flux,
    integrate_volume,
    required_order,
)

ELECTROSTATIC_TERMS = ("charge_term", "dipole_term", "stress_term", "boundary_form")
MAGNETOSTATIC_TERMS = ("lorentz", "grad_alpha", "current_stress", "hb_stress", "kelvin", "pressure")

#: Largest Jacobian condition number accepted by the transported-energy oracles.
MAX_CONDITION = 1e8


@dataclass
class ForceReport:
    general_cartan: float
    general_alt: float
    fd_oracle: float | None = None
    boundary: float | None = None
    split: float | None = None
    fd_order: float | None = None
    fd_steps: dict[str, float] = field(default_factory=dict)
    terms: dict[str, float] = field(default_factory=dict)

    @property
    def residuals(self) -> dict[str, float]:
        out = {"cartan-alt": abs(self.general_cartan - self.general_alt)}
        if self.boundary is not None:
            out["cartan-boundary"] = abs(self.general_cartan - self.boundary)
        if self.split is not None:
            out["cartan-split"] = abs(self.general_cartan - self.split)
        if self.fd_oracle is not None:
            out["cartan-fd"] = abs(self.general_cartan - self.fd_oracle)
            out["alt-fd"] = abs(self.general_alt - self.fd_oracle)
        return out

    @property
    def scale(self) -> float:
        vals = [self.general_cartan, self.general_alt, self.fd_oracle, self.boundary, self.split]
        return 1.0 + max(abs(v) for v in vals if v is not None)

    def as_dict(self) -> dict:
        routes = {"general_cartan": self.general_cartan, "general_alt": self.general_alt}
        for name in ("fd_oracle", "boundary", "split"):
            value = getattr(self, name)
            if value is not None:
                routes[name] = value
        out = {"routes": routes, "residuals": self.residuals}
        if self.fd_order is not None:
            out["fd_order"] = self.fd_order
            out["fd_steps"] = dict(self.fd_steps)
        if self.terms:
            out["terms"] = dict(self.terms)
        return out


def _check_inputs(sys: EDSystem, region: Region, w: VectorField) -> None:
    if region.dim != sys.n:
        raise ValueError(f"region dimension {region.dim} != system dimension {sys.n}")
    if w.dim != sys.n:
        raise ValueError(f"velocity dimension {w.dim} != system dimension {sys.n}")


def force_quadrature(sys: EDSystem, w: VectorField) -> QuadratureRule:
    deg = max(sys.g.axis_degree(), 0) + max(sys.alpha.axis_degree(), 0) + max(w.degree(), 0)
    return QuadratureRule(required_order(deg))


def force(sys: EDSystem, region: Region, w: VectorField, q: QuadratureRule | None = None,
          motion: Motion | None = None, h: float | None = None) -> ForceReport:
    """All coordinate-free routes; the fd route runs when ``h`` is given."""
    _check_inputs(sys, region, w)
    q = q or force_quadrature(sys, w)
    lie_alpha = lie_derivative(w, sys.alpha)
    flux = wedge(sys.g, lie_alpha)
    cartan = integrate_volume(exterior_d(flux), region, q)
    boundary = integrate_boundary(flux, region, q)
    split = integrate_volume(wedge(sys.J, lie_alpha), region, q) + sys.sign * integrate_volume(
        wedge(sys.g, lie_derivative(w, sys.F)), region, q
    )
    report = ForceReport(cartan, force_alt(sys, region, w, q), boundary=boundary, split=split)
    if h is not None:
        motion = motion or Motion(w)
        if motion.generator != w:
            raise ValueError("motion generator must equal the velocity field")
        fd, order, steps = force_fd_convergence(sys, region, motion, h)
        report.fd_oracle, report.fd_order, report.fd_steps = fd, order, steps
    return report


def force_alt(sys: EDSystem, region: Region, w: VectorField, q: QuadratureRule | None = None) -> float:
    """int J ^ (w _| F) + s g ^ d(w _| F) + J ^ d(w _| alpha).

    For p = 0 the potential has no interior product and the last term is
    absent.
    """
    _check_inputs(sys, region, w)
    q = q or force_quadrature(sys, w)
    w_F = contract(w, sys.F)
    total = integrate_volume(wedge(sys.J, w_F), region, q)
    total += sys.sign * integrate_volume(wedge(sys.g, exterior_d(w_F)), region, q)
    if sys.p > 0:
        total += integrate_volume(wedge(sys.J, exterior_d(contract(w, sys.alpha))), region, q)
    return total


def force_fd(sys: EDSystem, region: Region, motion: Motion, h: float = 1e-3,
             q: QuadratureRule | None = None) -> float:
    """(P_{+h} - P_{-h}) / 2h with P_t from ``energy_under_motion``."""
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    q = q or motion_quadrature(sys, motion)
    plus = energy_under_motion(sys, region, motion, h, q)
    minus = energy_under_motion(sys, region, motion, -h, q)
    return (plus - minus) / (2.0 * h)


def force_fd_convergence(sys: EDSystem, region: Region, motion: Motion, h: float = 1e-3,
                         q: QuadratureRule | None = None) -> tuple[float, float, dict[str, float]]:
    """fd value at ``h`` and a three-point Richardson order estimate.

    The order comes from D(h) - D(h/2) and D(h/2) - D(h/4).  When both
    differences are at rounding level the central difference is exact
    (P(t) has no odd terms past t) and the order is reported as ``inf``.
    """
    q = q or motion_quadrature(sys, motion)
    steps = [h, h / 2, h / 4]
    values = [force_fd(sys, region, motion, s, q) for s in steps]
    d1, d2 = abs(values[0] - values[1]), abs(values[1] - values[2])
    floor = 1e-11 * (1.0 + abs(values[0]))
    if d1 <= floor and d2 <= floor:
        order = math.inf
    else:
        order = convergence_order([d1, d2])
    return values[0], order, {f"{s:.6g}": v for s, v in zip(steps, values)}


# -- R^3 electrostatics ----------------------------------------------------

def _integrate_poly(f: PolynomialField, region: Region, q: QuadratureRule) -> float:
    if f.is_zero():
        return 0.0
    return integrate_density(f.evaluate, region, q)


def _quad_for(*polys: PolynomialField) -> QuadratureRule:
    deg = max((max((p.axis_degree(i) for i in (1, 2, 3)), default=0) for p in polys), default=0)
    return QuadratureRule(required_order(max(deg, 0)))


def electric_field(alpha: PolynomialField, convention: Literal["+grad", "-grad"] = "+grad") -> VectorField:
    E = r3.grad(alpha)
    if convention == "+grad":
        return E
    if convention == "-grad":
        return -E
    raise ValueError(f"unknown convention {convention!r}; use '+grad' or '-grad'")


def electrostatic_force_terms(D: VectorField, alpha: PolynomialField, w: VectorField, region: Region,
                              q: QuadratureRule | None = None,
                              convention: Literal["+grad", "-grad"] = "+grad") -> dict[str, float]:
    """charge, dipole and stress volume terms plus the boundary stress form.

    charge_term   int rho E_i w_i
    dipole_term   int D_j E_{j,i} w_i
    stress_term   int E_i D_j w_{i,j}
    boundary_form int_dR E_i D_j nu_j w_i dA
    """
    for name, f in (("D", D), ("w", w)):
        if f.dim != 3:
            raise ValueError(f"{name} must be a field on R^3, got dimension {f.dim}")
    if alpha.dim != 3:
        raise ValueError(f"alpha must be a field on R^3, got dimension {alpha.dim}")
    E = electric_field(alpha, convention)
    rho = r3.div(D)
    charge = r3.dot(E, w) * rho
    dipole = PolynomialField.zero(3)
    stress = PolynomialField.zero(3)
    for i in range(3):
        for j in range(3):
            dipole = dipole + D[j] * E[j].partial(i + 1) * w[i]
            stress = stress + E[i] * D[j] * w[i].partial(j + 1)
    q = q or _quad_for(charge, dipole, stress)
    Ew = r3.dot(E, w)
    flux = VectorField([Ew * D[j] for j in range(3)])
    qb = QuadratureRule(max(q.order, _quad_for(*flux).order))
    return {
        "charge_term": _integrate_poly(charge, region, q),
        "dipole_term": _integrate_poly(dipole, region, q),
        "stress_term": _integrate_poly(stress, region, q),
        "boundary_form": integrate_flux(flux, region, qb),
    }


# -- R^3 magnetostatics ----------------------------------------------------

def _magnetostatic_densities(H: VectorField, A: VectorField, w: VectorField) -> dict[str, PolynomialField]:
    J = r3.curl(H)
    B = r3.curl(A)
    zero = PolynomialField.zero(3)
    grad_alpha = current_stress = hb_stress = kelvin = pressure = zero
    divw = r3.div(w)
    HB = r3.dot(H, B)
    for i in range(3):
        for k in range(3):
            grad_alpha = grad_alpha + J[k] * A[i].partial(k + 1) * w[i]
            current_stress = current_stress + J[k] * A[i] * w[i].partial(k + 1)
            hb_stress = hb_stress + H[i] * B[k] * w[i].partial(k + 1)
            kelvin = kelvin - H[i] * B[i].partial(k + 1) * w[k]
    pressure = -(HB * divw)
    return {
        "lorentz": r3.dot(r3.cross(J, B), w),
        "grad_alpha": grad_alpha,
        "current_stress": current_stress,
        "hb_stress": hb_stress,
        "kelvin": kelvin,
        "pressure": pressure,
    }


def magnetostatic_force_terms(H: VectorField, alpha_sharp: VectorField, w: VectorField, region: Region,
                              q: QuadratureRule | None = None) -> dict[str, float]:
    """The six named force terms and their ``total`` (equal to +dP/dt)."""
    for name, f in (("H", H), ("alpha_sharp", alpha_sharp), ("w", w)):
        if f.dim != 3:
            raise ValueError(f"{name} must be a field on R^3, got dimension {f.dim}")
    dens = _magnetostatic_densities(H, alpha_sharp, w)
    q = q or _quad_for(*dens.values())
    out = {name: _integrate_poly(dens[name], region, q) for name in MAGNETOSTATIC_TERMS}
    out["total"] = float(sum(out[name] for name in MAGNETOSTATIC_TERMS))
    return out


def magnetostatic_vector_density(H: VectorField, alpha_sharp: VectorField, w: VectorField) -> PolynomialField:
    """J_k A_{k,l} w_l - H_j B_{j,l} w_l + H_j B_i w_{j,i} - H_j B_j w_{i,i} + J_k A_l w_{l,k}."""
    A = alpha_sharp
    J = r3.curl(H)
    B = r3.curl(A)
    acc = PolynomialField.zero(3)
    for a in range(3):
        for b in range(3):
            acc = acc + J[a] * A[a].partial(b + 1) * w[b]
            acc = acc - H[a] * B[a].partial(b + 1) * w[b]
            acc = acc + H[a] * B[b] * w[a].partial(b + 1)
            acc = acc + J[a] * A[b] * w[b].partial(a + 1)
    return acc - r3.dot(H, B) * r3.div(w)


def udot_printed_density(H: VectorField, alpha_sharp: VectorField, w: VectorField) -> PolynomialField:
    """Integrand of the first (pre-Lorentz-split) magnetostatic rate formula.

    w_{i,k} J_k A_i + J_k A_{k,i} w_i - H_j (-w_{j,i}) B_i - H_j B_{j,k} w_k - H_j B_j w_{k,k}
    """
    A = alpha_sharp
    J = r3.curl(H)
    B = r3.curl(A)
    acc = PolynomialField.zero(3)
    for a in range(3):
        for b in range(3):
            acc = acc + w[a].partial(b + 1) * J[b] * A[a]
            acc = acc + J[b] * A[b].partial(a + 1) * w[a]
            acc = acc + H[a] * w[a].partial(b + 1) * B[b]
            acc = acc - H[a] * B[a].partial(b + 1) * w[b]
    return acc - r3.dot(H, B) * r3.div(w)


def exterior_power_density(sys: EDSystem, w: VectorField) -> PolynomialField:
    """Density of d(g ^ L_w alpha) relative to dV."""
    tau = exterior_d(wedge(sys.g, lie_derivative(w, sys.alpha)))
    return tau[tuple(range(1, sys.n + 1))]


def magnetostatic_pointwise_check(H: VectorField, alpha_sharp: VectorField, w: VectorField,
                                  points: np.ndarray | None = None) -> float:
    """Max |exterior integrand - vector integrand| at the sample points."""
    pts = sample_points(3) if points is None else np.asarray(points, dtype=float)
    sys = EDSystem.magnetostatic(H, alpha_sharp)
    ext, vec = evaluate_many(
        [exterior_power_density(sys, w), magnetostatic_vector_density(H, alpha_sharp, w)], pts
    )
    return float(np.max(np.abs(ext - vec))) if pts.size else 0.0


# -- transported-energy oracles (vector calculus, pointwise) --------------

def _motion_geometry(motion: Motion, t: float, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    psi = motion.at(t)
    images = psi(pts)
    jac = psi.jacobian_values(pts)
    dets = np.linalg.det(jac)
    if np.any(dets <= 0):
        bad = int(np.sum(dets <= 0))
        raise ValueError(f"nonpositive Jacobian determinant at {bad} quadrature points (t={t})")
    return images, jac, dets


def _oracle_quadrature(motion: Motion, *degrees: int) -> QuadratureRule:
    m = motion.degree()
    return QuadratureRule(required_order(max(degrees) * m + 3 * (m - 1) + 3))


def transported_energy_oracle_p0(D: VectorField, alpha: PolynomialField, region: Region, motion: Motion,
                                 t: float, q: QuadratureRule | None = None) -> float:
    """int rho alpha(psi_t) dV - int psi_{i,j} D_j E_i(psi_t) dV with E = -grad alpha."""
    rho = r3.div(D)
    grad_alpha = alpha.gradient()
    q = q or _oracle_quadrature(motion, rho.degree() + alpha.degree(), D.degree() + alpha.degree())

    def density(pts: np.ndarray) -> np.ndarray:
        images, jac, _ = _motion_geometry(motion, t, pts)
        (rho_v,) = evaluate_many([rho], pts)
        a_img, *ga_img = evaluate_many([alpha] + grad_alpha, images)
        E_img = -np.stack(ga_img, axis=1)
        D_v = D.evaluate(pts)
        # psi_{i,j} D_j E_i(psi)
        transported = np.einsum("mij,mj,mi->m", jac, D_v, E_img)
        return rho_v * a_img - transported

    return integrate_density(density, region, q)


def transported_energy_oracle_p1(H: VectorField, alpha_sharp: VectorField, region: Region, motion: Motion,
                                 t: float, q: QuadratureRule | None = None) -> float:
    """int psi_{i,k} J_k A_i(psi_t) dV - int H_j (Dpsi^-1)_{ji} B_i(psi_t) J_t dV."""
    J = r3.curl(H)
    B = r3.curl(alpha_sharp)
    q = q or _oracle_quadrature(motion, J.degree() + alpha_sharp.degree(), H.degree() + B.degree())

    def density(pts: np.ndarray) -> np.ndarray:
        images, jac, dets = _motion_geometry(motion, t, pts)
        cond = np.linalg.cond(jac)
        if np.any(cond > MAX_CONDITION):
            raise ValueError(f"Jacobian condition number {float(np.max(cond)):.3g} exceeds {MAX_CONDITION:g}")
        inv = np.linalg.inv(jac)
        J_v, H_v = J.evaluate(pts), H.evaluate(pts)
        A_img, B_img = alpha_sharp.evaluate(images), B.evaluate(images)
        first = np.einsum("mik,mk,mi->m", jac, J_v, A_img)
        second = np.einsum("mj,mji,mi->m", H_v, inv, B_img) * dets
        return first - second

    return integrate_density(density, region, q)
