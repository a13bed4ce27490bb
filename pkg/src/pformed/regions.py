"""Box-chain regions and tensor-product Gauss-Legendre integration.

Boundary orientation: the face x^i = max of a box carries the sign
(-1)^(i-1) relative to the remaining coordinates in increasing order; the
face x^i = min carries the opposite sign.  With this choice
``integrate_volume(d omega) == integrate_boundary(omega)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np

from .forms import DifferentialForm, VectorField, exterior_d

DEFAULT_ORDER = 8


@dataclass(frozen=True)
class Box:
    min: tuple[float, ...]
    max: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(a) for a in self.min)
        hi = tuple(float(b) for b in self.max)
        if len(lo) != len(hi) or not lo:
            raise ValueError(f"box corners must have equal nonzero length, got {lo} and {hi}")
        for i, (a, b) in enumerate(zip(lo, hi), start=1):
            if not a < b:
                raise ValueError(f"degenerate box: axis {i} has min {a} >= max {b}")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    @property
    def dim(self) -> int:
        return len(self.min)

    @property
    def volume(self) -> float:
        return math.prod(b - a for a, b in zip(self.min, self.max))

    def overlaps(self, other: "Box") -> bool:
        """True if the open interiors intersect."""
        return all(max(a1, a2) < min(b1, b2) for a1, b1, a2, b2 in zip(self.min, self.max, other.min, other.max))


@dataclass(frozen=True)
class Region:
    """A chain of axis-aligned boxes with pairwise disjoint interiors."""

    boxes: tuple[Box, ...]

    def __post_init__(self):
        boxes = tuple(self.boxes)
        if not boxes:
            raise ValueError("a region needs at least one box")
        dims = {b.dim for b in boxes}
        if len(dims) != 1:
            raise ValueError(f"boxes have mixed dimensions {sorted(dims)}")
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                if boxes[i].overlaps(boxes[j]):
                    raise ValueError(f"boxes {i} and {j} have overlapping interiors")
        object.__setattr__(self, "boxes", boxes)

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float]) -> "Region":
        return cls((Box(tuple(lo), tuple(hi)),))

    @classmethod
    def unit(cls, dim: int) -> "Region":
        return cls.box([0.0] * dim, [1.0] * dim)

    @property
    def dim(self) -> int:
        return self.boxes[0].dim

    @property
    def volume(self) -> float:
        return sum(b.volume for b in self.boxes)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule with ``order`` points per axis."""

    order: int = DEFAULT_ORDER

    def __post_init__(self):
        if not isinstance(self.order, int) or self.order < 1:
            raise ValueError(f"quadrature order must be a positive integer, got {self.order!r}")

    @property
    def exact_degree(self) -> int:
        """Highest per-axis degree integrated exactly."""
        return 2 * self.order - 1


def required_order(axis_degree: int) -> int:
    """Smallest Gauss-Legendre order exact for the given per-axis degree."""
    return max(1, math.ceil((axis_degree + 1) / 2))


@lru_cache(maxsize=None)
def _gauss_1d(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def tensor_rule(lo: Sequence[float], hi: Sequence[float], order: int) -> tuple[np.ndarray, np.ndarray]:
    """Points (m, d) and weights (m,) for a box [lo, hi] in d dimensions."""
    x, w = _gauss_1d(order)
    axes_pts, axes_w = [], []
    for a, b in zip(lo, hi):
        half = 0.5 * (b - a)
        axes_pts.append(a + half * (x + 1.0))
        axes_w.append(half * w)
    if not axes_pts:
        return np.zeros((1, 0)), np.ones(1)
    grids = np.meshgrid(*axes_pts, indexing="ij")
    wgrids = np.meshgrid(*axes_w, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    return pts, weights


def volume_cells(region: Region, q: QuadratureRule) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """(points, weights) per box in canonical box order."""
    for box in region.boxes:
        yield tensor_rule(box.min, box.max, q.order)


@dataclass(frozen=True)
class Face:
    box_index: int
    axis: int          # 1-based normal axis
    upper: bool
    sign: int          # induced orientation sign
    points: np.ndarray = field(repr=False, compare=False)
    weights: np.ndarray = field(repr=False, compare=False)


def boundary_faces(region: Region, q: QuadratureRule) -> Iterator[Face]:
    """All 2n faces of every box with induced orientation, in canonical order."""
    n = region.dim
    for bi, box in enumerate(region.boxes):
        for axis in range(1, n + 1):
            rest = [j for j in range(n) if j != axis - 1]
            lo = [box.min[j] for j in rest]
            hi = [box.max[j] for j in rest]
            fpts, fw = tensor_rule(lo, hi, q.order)
            for upper in (False, True):
                pts = np.empty((fpts.shape[0], n))
                pts[:, rest] = fpts
                pts[:, axis - 1] = box.max[axis - 1] if upper else box.min[axis - 1]
                sign = (-1) ** (axis - 1) * (1 if upper else -1)
                yield Face(bi, axis, upper, sign, pts, fw)


def _pairwise_total(parts: list[float]) -> float:
    return float(np.sum(np.asarray(parts, dtype=float))) if parts else 0.0


def integrate_density(density: Callable[[np.ndarray], np.ndarray], region: Region, q: QuadratureRule) -> float:
    """Integral of a pointwise-evaluable density over the region."""
    parts = [float(np.sum(w * density(pts))) for pts, w in volume_cells(region, q)]
    return _pairwise_total(parts)


def integrate_volume(tau: DifferentialForm, region: Region, q: QuadratureRule | None = None) -> float:
    """Integral of an n-form over the region (standard orientation)."""
    q = q or QuadratureRule()
    n = tau.dim
    if tau.grade != n:
        raise ValueError(f"volume integration needs an {n}-form, got grade {tau.grade}")
    if region.dim != n:
        raise ValueError(f"region dimension {region.dim} != form dimension {n}")
    f = tau[tuple(range(1, n + 1))]
    return integrate_density(f.evaluate, region, q)


def integrate_boundary(omega: DifferentialForm, region: Region, q: QuadratureRule | None = None,
                       flip: Callable[[Face], bool] | None = None) -> float:
    """Integral of an (n-1)-form over the oriented boundary of every box.

    ``flip`` optionally reverses the orientation of selected faces; it exists
    for orientation checks.
    """
    q = q or QuadratureRule()
    n = omega.dim
    if omega.grade != n - 1:
        raise ValueError(f"boundary integration needs an {n - 1}-form, got grade {omega.grade}")
    if region.dim != n:
        raise ValueError(f"region dimension {region.dim} != form dimension {n}")
    parts = []
    for face in boundary_faces(region, q):
        key = tuple(j for j in range(1, n + 1) if j != face.axis)
        f = omega[key]
        if f.is_zero():
            parts.append(0.0)
            continue
        sign = -face.sign if flip is not None and flip(face) else face.sign
        parts.append(sign * float(np.sum(face.weights * f.evaluate(face.points))))
    return _pairwise_total(parts)


def integrate_flux(v: VectorField, region: Region, q: QuadratureRule | None = None) -> float:
    """Outward flux of a vector field, summed over the faces of every box."""
    q = q or QuadratureRule()
    parts = []
    for face in boundary_faces(region, q):
        normal = 1.0 if face.upper else -1.0
        parts.append(normal * float(np.sum(face.weights * v[face.axis - 1].evaluate(face.points))))
    return _pairwise_total(parts)


def stokes_residual(omega: DifferentialForm, region: Region, q: QuadratureRule | None = None) -> float:
    return abs(integrate_volume(exterior_d(omega), region, q) - integrate_boundary(omega, region, q))


def order_for(*forms: DifferentialForm, extra: int = 0) -> QuadratureRule:
    """Rule exact for the largest per-axis degree among ``forms`` (plus ``extra``)."""
    deg = max((f.axis_degree() for f in forms), default=0) + extra
    return QuadratureRule(required_order(max(deg, 0)))
