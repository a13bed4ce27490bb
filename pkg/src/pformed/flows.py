"""Polynomial maps, pullbacks and Lie derivatives.

Two routes to the Lie derivative live here: the Cartan formula
``v _| d(omega) + d(v _| omega)`` and a central difference of pullbacks by a
polynomial motion ``x + t w(x) + t^2 u(x)``.  They share nothing beyond the
form kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from .forms import (
    DifferentialForm,
    MultiIndex,
    VectorField,
    contract,
    exterior_d,
    sort_sign,
    wedge,
)
from .poly import PolynomialField, compose_many, evaluate_many

#: Number of fixed sample points used for pointwise comparisons.
N_SAMPLES = 32


class SmoothMap:
    """Polynomial map R^n -> R^n given by its components psi^1..psi^n."""

    def __init__(self, components: Sequence[PolynomialField]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a map needs at least one component")
        n = len(comps)
        for c in comps:
            if c.dim != n:
                raise ValueError(f"component of dimension {c.dim} in a map of {n} components")
        self.components = comps

    @property
    def dim(self) -> int:
        return len(self.components)

    @classmethod
    def identity(cls, dim: int) -> "SmoothMap":
        return cls([PolynomialField.coordinate(dim, i) for i in range(1, dim + 1)])

    @classmethod
    def linear(cls, matrix, offset=None) -> "SmoothMap":
        """x -> A x + b."""
        A = np.asarray(matrix, dtype=float)
        n = A.shape[0]
        b = np.zeros(n) if offset is None else np.asarray(offset, dtype=float)
        x = [PolynomialField.coordinate(n, j) for j in range(1, n + 1)]
        comps = []
        for i in range(n):
            acc = PolynomialField.constant(n, b[i])
            for j in range(n):
                if A[i, j]:
                    acc = acc + x[j] * A[i, j]
            comps.append(acc)
        return cls(comps)

    @cached_property
    def jacobian(self) -> list[list[PolynomialField]]:
        """Entry [i][j] is d psi^{i+1} / d x^{j+1}."""
        return [[c.partial(j) for j in range(1, self.dim + 1)] for c in self.components]

    def degree(self) -> int:
        return max(c.degree() for c in self.components)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.stack(evaluate_many(self.components, np.asarray(points, dtype=float)), axis=1)

    def jacobian_values(self, points: np.ndarray) -> np.ndarray:
        """Jacobian matrices at ``points``; shape (m, n, n)."""
        pts = np.asarray(points, dtype=float)
        flat = [f for row in self.jacobian for f in row]
        vals = evaluate_many(flat, pts)
        n = self.dim
        return np.stack(vals, axis=1).reshape(pts.shape[0], n, n)


@dataclass(frozen=True)
class Motion:
    """The motion psi_t(x) = x + t w(x) + t^2 u(x)."""

    generator: VectorField
    second_order: VectorField | None = None

    def __post_init__(self):
        if self.second_order is not None and self.second_order.dim != self.generator.dim:
            raise ValueError("generator and second-order field must share a dimension")

    @property
    def dim(self) -> int:
        return self.generator.dim

    def at(self, t: float) -> SmoothMap:
        n = self.dim
        comps = []
        for i in range(n):
            c = PolynomialField.coordinate(n, i + 1) + self.generator[i] * t
            if self.second_order is not None:
                c = c + self.second_order[i] * (t * t)
            comps.append(c)
        return SmoothMap(comps)

    def degree(self) -> int:
        d = max(1, self.generator.degree())
        if self.second_order is not None:
            d = max(d, self.second_order.degree())
        return d


def _differentials(psi: SmoothMap) -> list[DifferentialForm]:
    return [DifferentialForm.one_form(row) for row in psi.jacobian]


def pullback(psi: SmoothMap, omega: DifferentialForm) -> DifferentialForm:
    """psi^* omega, computed exactly by substitution and wedging d(psi^i)."""
    if psi.dim != omega.dim:
        raise ValueError(f"dimension mismatch: map {psi.dim} vs form {omega.dim}")
    n, k = omega.dim, omega.grade
    keys = list(omega.coeffs)
    if not keys:
        return DifferentialForm.zero(n, k)
    substituted = compose_many([omega.coeffs[K] for K in keys], psi.components)
    if k == 0:
        return DifferentialForm.scalar(substituted[0])
    dpsi = _differentials(psi)
    cache: dict[MultiIndex, DifferentialForm] = {}

    def dpsi_wedge(J: MultiIndex) -> DifferentialForm:
        if J not in cache:
            acc = dpsi[J[0] - 1]
            for j in J[1:]:
                acc = wedge(acc, dpsi[j - 1])
            cache[J] = acc
        return cache[J]

    out = DifferentialForm.zero(n, k)
    for J, f in zip(keys, substituted):
        out = out + dpsi_wedge(J) * f
    return out


def pullback_values(psi: SmoothMap, omega: DifferentialForm, points: np.ndarray) -> dict[MultiIndex, np.ndarray]:
    """Coefficients of psi^* omega evaluated at ``points`` without expanding.

    (psi^* omega)_I(x) = sum_J omega_J(psi(x)) det(D psi(x)[J, I]).
    """
    if psi.dim != omega.dim:
        raise ValueError(f"dimension mismatch: map {psi.dim} vs form {omega.dim}")
    pts = np.asarray(points, dtype=float)
    n, k = omega.dim, omega.grade
    images = psi(pts)
    vals = omega.evaluate(images)
    if k == 0:
        return {(): vals.get((), np.zeros(pts.shape[0]))}
    jac = psi.jacobian_values(pts)
    out: dict[MultiIndex, np.ndarray] = {}
    for I in combinations(range(1, n + 1), k):
        cols = [i - 1 for i in I]
        acc = np.zeros(pts.shape[0])
        for J, fv in vals.items():
            rows = [j - 1 for j in J]
            acc += fv * np.linalg.det(jac[:, rows][:, :, cols])
        out[I] = acc
    return out


def jacobian_det(psi: SmoothMap) -> PolynomialField:
    """Symbolic determinant of the Jacobian matrix (Laplace expansion)."""
    J = psi.jacobian
    n = psi.dim

    def minor_det(rows: tuple[int, ...], cols: tuple[int, ...]) -> PolynomialField:
        if len(rows) == 1:
            return J[rows[0]][cols[0]]
        acc = PolynomialField.zero(n)
        r, rest = rows[0], rows[1:]
        for pos, c in enumerate(cols):
            entry = J[r][c]
            if entry.is_zero():
                continue
            sub = minor_det(rest, cols[:pos] + cols[pos + 1:])
            term = entry * sub
            acc = acc + (term if pos % 2 == 0 else -term)
        return acc

    return minor_det(tuple(range(n)), tuple(range(n)))


def lie_derivative(v: VectorField, omega: DifferentialForm) -> DifferentialForm:
    """Cartan formula L_v omega = v _| d omega + d(v _| omega)."""
    if v.dim != omega.dim:
        raise ValueError(f"dimension mismatch: field {v.dim} vs form {omega.dim}")
    n, k = omega.dim, omega.grade
    if k == n:
        # d(omega) vanishes; only the second term survives
        return exterior_d(contract(v, omega))
    first = contract(v, exterior_d(omega))
    if k == 0:
        return first
    return first + exterior_d(contract(v, omega))


def lie_fd_oracle(motion: Motion, omega: DifferentialForm, t: float = 1e-3) -> DifferentialForm:
    """Central difference (psi_t^* omega - psi_{-t}^* omega) / 2t."""
    if not t > 0:
        raise ValueError(f"step must be positive, got {t}")
    plus = pullback(motion.at(t), omega)
    minus = pullback(motion.at(-t), omega)
    return (plus - minus) * (1.0 / (2.0 * t))


def sample_points(dim: int, count: int = N_SAMPLES) -> np.ndarray:
    """Fixed quasi-random points in the open unit box (unscrambled Halton)."""
    sampler = qmc.Halton(d=dim, scramble=False)
    sampler.fast_forward(1)  # skip the origin
    return sampler.random(count)


def pointwise_deviation(a: DifferentialForm, b: DifferentialForm, points: np.ndarray | None = None) -> float:
    """Max absolute coefficient difference at sample points."""
    a._check_same_space(b)
    pts = sample_points(a.dim) if points is None else points
    diff = (a - b).evaluate(pts)
    return max((float(np.max(np.abs(v))) for v in diff.values()), default=0.0)


def convergence_order(errors: Sequence[float], ratio: float = 2.0) -> float:
    """Observed order from errors at steps h, h/ratio, h/ratio^2, ...

    Uses the last pair; returns ``inf`` when the finer error is zero.
    """
    e0, e1 = errors[-2], errors[-1]
    if e1 == 0.0:
        return math.inf
    if e0 == 0.0:
        return -math.inf
    return math.log(e0 / e1) / math.log(ratio)


def lie_convergence(motion: Motion, omega: DifferentialForm, t: float = 1e-3,
                    points: np.ndarray | None = None) -> tuple[float, float]:
    """(deviation at t, observed order from t and t/2) against the Cartan route."""
    exact = lie_derivative(motion.generator, omega)
    pts = sample_points(omega.dim) if points is None else points
    errs = [pointwise_deviation(lie_fd_oracle(motion, omega, s), exact, pts) for s in (t, t / 2)]
    return errs[0], convergence_order(errs)


def positive_jacobian_report(psi: SmoothMap, points: np.ndarray) -> tuple[float, int]:
    """(smallest Jacobian determinant, number of nonpositive samples)."""
    dets = np.linalg.det(psi.jacobian_values(points))
    return float(np.min(dets)), int(np.sum(dets <= 0))


def wedge_values(a: dict[MultiIndex, np.ndarray], b: dict[MultiIndex, np.ndarray],
                 n: int) -> dict[MultiIndex, np.ndarray]:
    """Pointwise exterior product of forms given by coefficient arrays."""
    out: dict[MultiIndex, np.ndarray] = {}
    for I, av in a.items():
        for J, bv in b.items():
            sign, K = sort_sign(I + J)
            if sign == 0 or len(K) > n:
                continue
            term = sign * av * bv
            out[K] = out[K] + term if K in out else term
    return out
