"""Sparse multivariate polynomials with float coefficients.

A :class:`PolynomialField` is a scalar field on R^n stored as a map from
exponent tuples to coefficients.  Every coefficient function in the package
(form components, vector components, map components) is one of these.
"""

from __future__ import annotations

from itertools import product
from numbers import Real
from operator import add
from typing import Iterable, Mapping, Sequence

import numpy as np


class PolynomialField:
    """Polynomial scalar field on R^dim.

    Instances are immutable.  Terms whose coefficient is exactly zero are
    never stored.

    Parameters
    ----------
    dim : int
        Ambient dimension.
    terms : mapping of exponent tuple -> float, optional
        Coefficients keyed by exponent vectors of length ``dim``.
    """

    __slots__ = ("_dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[Sequence[int], float] | None = None):
        if not isinstance(dim, (int, np.integer)) or dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {dim!r}")
        self._dim = int(dim)
        clean: dict[tuple[int, ...], float] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != dim:
                raise ValueError(f"exponent {exp} has length {len(exp)}, expected {dim}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = float(c)
            if c != 0.0:
                clean[exp] = clean.get(exp, 0.0) + c
        self._terms = {e: c for e, c in clean.items() if c != 0.0}
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, terms: dict) -> "PolynomialField":
        # trusted constructor: caller guarantees valid keys
        obj = cls.__new__(cls)
        obj._dim = dim
        obj._terms = {e: c for e, c in terms.items() if c != 0.0}
        obj._hash = None
        return obj

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "PolynomialField":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, value: float) -> "PolynomialField":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def coordinate(cls, dim: int, axis: int) -> "PolynomialField":
        """The coordinate function x^axis (axes are 1-based)."""
        _check_axis(axis, dim)
        exp = [0] * dim
        exp[axis - 1] = 1
        return cls(dim, {tuple(exp): 1.0})

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff: float = 1.0) -> "PolynomialField":
        return cls(len(exp), {tuple(exp): coeff})

    # -- basic properties ----------------------------------------------
    @property
    def dim(self) -> int:
        return self._dim

    @property
    def terms(self) -> dict[tuple[int, ...], float]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def axis_degree(self, axis: int) -> int:
        _check_axis(axis, self._dim)
        return max((e[axis - 1] for e in self._terms), default=-1)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def constant_term(self) -> float:
        return self._terms.get((0,) * self._dim, 0.0)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other) -> "PolynomialField":
        if isinstance(other, PolynomialField):
            if other._dim != self._dim:
                raise ValueError(f"dimension mismatch: {self._dim} vs {other._dim}")
            return other
        if isinstance(other, Real):
            return PolynomialField.constant(self._dim, float(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0.0) + c
        return PolynomialField._raw(self._dim, out)

    __radd__ = __add__

    def __neg__(self):
        return PolynomialField._raw(self._dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, a: float) -> "PolynomialField":
        a = float(a)
        if a == 0.0:
            return PolynomialField(self._dim)
        return PolynomialField._raw(self._dim, {e: a * c for e, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, Real):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[tuple[int, ...], float] = {}
        get = out.get
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(map(add, e1, e2))
                out[e] = get(e, 0.0) + c1 * c2
        return PolynomialField._raw(self._dim, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Real):
            return self.scale(1.0 / float(other))
        return NotImplemented

    def __pow__(self, k: int) -> "PolynomialField":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = PolynomialField.constant(self._dim, 1.0)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- calculus ------------------------------------------------------
    def partial(self, axis: int) -> "PolynomialField":
        """Exact partial derivative along ``axis`` (1-based)."""
        _check_axis(axis, self._dim)
        i = axis - 1
        out = {}
        for e, c in self._terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = out.get(ne, 0.0) + k * c
        return PolynomialField._raw(self._dim, out)

    def gradient(self) -> list["PolynomialField"]:
        return [self.partial(i) for i in range(1, self._dim + 1)]

    # -- evaluation ----------------------------------------------------
    def __call__(self, x: Sequence[float]) -> float:
        return poly_eval(self, x)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an array of points of shape (m, dim)."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self._dim:
            raise ValueError(f"points must have shape (m, {self._dim}), got {pts.shape}")
        if not self._terms:
            return np.zeros(pts.shape[0])
        return evaluate_many([self], pts)[0]

    def compose(self, maps: Sequence["PolynomialField"]) -> "PolynomialField":
        """Substitute x^i -> maps[i]; the result lives in maps' dimension."""
        return compose_many([self], maps)[0]

    # -- comparison ----------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, PolynomialField):
            return NotImplemented
        return self._dim == other._dim and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._dim, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"PolynomialField({self._dim}, {self.to_string()})"

    def to_string(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms, key=lambda e: (sum(e), tuple(-k for k in e))):
            c = self._terms[e]
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            parts.append(f"{c:g}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def _check_axis(axis: int, dim: int) -> None:
    if not isinstance(axis, (int, np.integer)) or not 1 <= axis <= dim:
        raise ValueError(f"axis {axis!r} out of range 1..{dim}")


def poly_eval(f: PolynomialField, x: Sequence[float]) -> float:
    """Evaluate ``f`` at a single point by direct monomial summation."""
    x = tuple(float(v) for v in x)
    if len(x) != f.dim:
        raise ValueError(f"point has length {len(x)}, expected {f.dim}")
    total = 0.0
    for e, c in f.items():
        term = c
        for xi, k in zip(x, e):
            if k:
                term *= xi**k
        total += term
    return total


def poly_partial(f: PolynomialField, i: int) -> PolynomialField:
    return f.partial(i)


def evaluate_many(polys: Iterable[PolynomialField], points: np.ndarray) -> list[np.ndarray]:
    """Evaluate several polynomials at shared points, reusing power tables."""
    polys = list(polys)
    pts = np.asarray(points, dtype=float)
    m, n = pts.shape
    maxdeg = max((max((max(e) for e in p._terms), default=0) for p in polys), default=0)
    powers = np.ones((n, maxdeg + 1, m))
    for k in range(1, maxdeg + 1):
        powers[:, k] = powers[:, k - 1] * pts.T
    out = []
    for p in polys:
        if p.dim != n:
            raise ValueError(f"points have dimension {n}, polynomial has {p.dim}")
        acc = np.zeros(m)
        for e, c in p._terms.items():
            term = np.full(m, c)
            for i, k in enumerate(e):
                if k:
                    term = term * powers[i, k]
            acc += term
        out.append(acc)
    return out


def compose_many(polys: Sequence[PolynomialField], maps: Sequence[PolynomialField]) -> list[PolynomialField]:
    """Substitute ``maps`` into each polynomial, sharing the monomial cache."""
    maps = list(maps)
    if not maps:
        raise ValueError("need at least one component map")
    target_dim = maps[0].dim
    for p in polys:
        if p.dim != len(maps):
            raise ValueError(f"polynomial of dimension {p.dim} cannot take {len(maps)} components")
    powers: list[list[PolynomialField]] = [[PolynomialField.constant(target_dim, 1.0)] for _ in maps]

    def power(i: int, k: int) -> PolynomialField:
        row = powers[i]
        while len(row) <= k:
            row.append(row[-1] * maps[i])
        return row[k]

    cache: dict[tuple[int, ...], PolynomialField] = {}

    def monomial(e: tuple[int, ...]) -> PolynomialField:
        # build x^e from x^(e minus its last nonzero axis), memoized
        if e in cache:
            return cache[e]
        nz = [i for i, k in enumerate(e) if k]
        if len(nz) <= 1:
            result = power(nz[0], e[nz[0]]) if nz else power(0, 0)
        else:
            last = nz[-1]
            prefix = e[:last] + (0,) * (len(e) - last)
            result = monomial(prefix) * power(last, e[last])
        cache[e] = result
        return result

    results = []
    for p in polys:
        acc: dict[tuple[int, ...], float] = {}
        for e, c in p._terms.items():
            for me, mc in monomial(e)._terms.items():
                acc[me] = acc.get(me, 0.0) + c * mc
        results.append(PolynomialField._raw(target_dim, acc))
    return results


def poly_residual(a: PolynomialField, b: PolynomialField) -> float:
    """Max coefficient difference, relative to max(1, largest coefficient)."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    keys = set(a._terms) | set(b._terms)
    diff = max((abs(a._terms.get(k, 0.0) - b._terms.get(k, 0.0)) for k in keys), default=0.0)
    scale = max(1.0, a.max_abs_coeff(), b.max_abs_coeff())
    return diff / scale


def monomials_up_to(dim: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree <= ``degree``."""
    return [e for e in product(range(degree + 1), repeat=dim) if sum(e) <= degree]
