"""p-form electrodynamics: traction, Maxwell forms and the energy functional.

A system is a Maxwell form ``g`` of grade n-p-1 and a potential ``alpha`` of
grade p.  The traction (power flux) is ``g ^ alpha``, the Faraday form is
``F = d alpha`` and the source is ``J = d g``.  The energy of a region is
computed by three routes that must agree:

    volume   int_R d(g ^ alpha)
    boundary int_dR g ^ alpha
    split    int_R J ^ alpha + (-1)^(n-p-1) int_R g ^ F
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import r3
from .flows import Motion, pullback_values, wedge_values
from .forms import DifferentialForm, VectorField, exterior_d, wedge
from .poly import PolynomialField
from .regions import (
    QuadratureRule,
    Region,
    integrate_boundary,
    integrate_density,
    integrate_volume,
    required_order,
)


@dataclass(frozen=True, eq=False)
class EDSystem:
    n: int
    p: int
    g: DifferentialForm
    alpha: DifferentialForm

    def __post_init__(self):
        n, p = self.n, self.p
        if not 0 <= p <= n - 1:
            raise ValueError(f"potential degree p must satisfy 0 <= p <= n-1 = {n - 1}, got {p}")
        if self.g.dim != n or self.alpha.dim != n:
            raise ValueError(f"forms must live in dimension n = {n}")
        if self.g.grade != n - p - 1:
            raise ValueError(f"grade(g) must be n-p-1 = {n - p - 1}, got {self.g.grade}")
        if self.alpha.grade != p:
            raise ValueError(f"grade(alpha) must be p = {p}, got {self.alpha.grade}")

    @classmethod
    def electrostatic(cls, D: VectorField, alpha: PolynomialField) -> "EDSystem":
        """p = 0 in R^3: g = D _| dV, alpha a scalar potential."""
        return cls(3, 0, r3.proxy_to_2form(D), DifferentialForm.scalar(alpha))

    @classmethod
    def magnetostatic(cls, H: VectorField, alpha_sharp: VectorField) -> "EDSystem":
        """p = 1 in R^3: g = H flat, alpha = A flat."""
        return cls(3, 1, r3.flat(H), r3.flat(alpha_sharp))

    @property
    def sign(self) -> int:
        """(-1)^(n-p-1), the Leibniz sign for d(g ^ alpha)."""
        return -1 if (self.n - self.p - 1) % 2 else 1

    @cached_property
    def F(self) -> DifferentialForm:
        return exterior_d(self.alpha)

    @cached_property
    def J(self) -> DifferentialForm:
        return exterior_d(self.g)

    def degree(self) -> int:
        return max(self.g.degree(), self.alpha.degree(), 0)

    def max_abs_coeff(self) -> float:
        return max(self.g.max_abs_coeff(), self.alpha.max_abs_coeff())


def traction(sys: EDSystem) -> DifferentialForm:
    """sigma(alpha) = g ^ alpha, an (n-1)-form."""
    return wedge(sys.g, sys.alpha)


def maxwell_residual(sys: EDSystem) -> tuple[float, float]:
    """(max |dF|, max |dJ|) over coefficients; both vanish identically."""
    dF = exterior_d(sys.F)
    dJ = exterior_d(sys.J)
    return dF.max_abs_coeff(), dJ.max_abs_coeff()


@dataclass(frozen=True)
class EnergyReport:
    volume: float
    boundary: float
    split: float

    @property
    def residuals(self) -> dict[str, float]:
        return {
            "volume-boundary": abs(self.volume - self.boundary),
            "volume-split": abs(self.volume - self.split),
            "boundary-split": abs(self.boundary - self.split),
        }

    @property
    def scale(self) -> float:
        return 1.0 + max(abs(self.volume), abs(self.boundary), abs(self.split))

    def max_residual(self) -> float:
        return max(self.residuals.values())

    def as_dict(self) -> dict:
        return {
            "routes": {"volume": self.volume, "boundary": self.boundary, "split": self.split},
            "residuals": self.residuals,
        }


def energy_quadrature(sys: EDSystem) -> QuadratureRule:
    """A rule exact for every integrand the three energy routes produce."""
    deg = max(sys.g.axis_degree(), 0) + max(sys.alpha.axis_degree(), 0)
    return QuadratureRule(required_order(deg))


def energy(sys: EDSystem, region: Region, q: QuadratureRule | None = None) -> EnergyReport:
    if region.dim != sys.n:
        raise ValueError(f"region dimension {region.dim} != system dimension {sys.n}")
    q = q or energy_quadrature(sys)
    sigma = traction(sys)
    volume = integrate_volume(exterior_d(sigma), region, q)
    boundary = integrate_boundary(sigma, region, q)
    split = integrate_volume(wedge(sys.J, sys.alpha), region, q) + sys.sign * integrate_volume(
        wedge(sys.g, sys.F), region, q
    )
    return EnergyReport(volume, boundary, split)


def motion_quadrature(sys: EDSystem, motion: Motion) -> QuadratureRule:
    """A rule exact for the transported energy integrands.

    Pulling a degree-a coefficient back through a degree-m map gives degree
    a*m, and each of the k differentials d(psi^i) adds m-1.
    """
    m = motion.degree()
    a = max(sys.alpha.degree(), 0)
    f = max(sys.F.degree(), 0)
    first = max(sys.J.degree(), 0) + a * m + sys.p * (m - 1)
    second = max(sys.g.degree(), 0) + f * m + (sys.p + 1) * (m - 1)
    return QuadratureRule(required_order(max(first, second, 0)))


def energy_under_motion(sys: EDSystem, region: Region, motion: Motion, t: float,
                        q: QuadratureRule | None = None) -> float:
    """int J ^ psi_t^* alpha + (-1)^(n-p-1) int g ^ psi_t^* F over the reference region."""
    if region.dim != sys.n or motion.dim != sys.n:
        raise ValueError("region, motion and system must share a dimension")
    q = q or motion_quadrature(sys, motion)
    psi = motion.at(t)
    vol_key = tuple(range(1, sys.n + 1))

    def density(pts: np.ndarray) -> np.ndarray:
        first = wedge_values(sys.J.evaluate(pts), pullback_values(psi, sys.alpha, pts), sys.n)
        second = wedge_values(sys.g.evaluate(pts), pullback_values(psi, sys.F, pts), sys.n)
        zero = np.zeros(pts.shape[0])
        return first.get(vol_key, zero) + sys.sign * second.get(vol_key, zero)

    return integrate_density(density, region, q)
