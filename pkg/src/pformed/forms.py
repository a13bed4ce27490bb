"""Differential forms on R^n with polynomial coefficients.

Basis elements are dx^{i1} ^ ... ^ dx^{ik} with 1 <= i1 < ... < ik <= n.  A
multi-index is stored as a sorted tuple of 1-based axes; the 0-form basis is
the empty tuple.
"""

from __future__ import annotations

from itertools import combinations
from numbers import Real
from typing import Iterable, Mapping, Sequence

import numpy as np

from .poly import PolynomialField, evaluate_many, poly_residual

MultiIndex = tuple[int, ...]


def sort_sign(indices: Sequence[int]) -> tuple[int, MultiIndex]:
    """Sort ``indices`` and return (sign, sorted).

    The sign is the parity of the number of transpositions used; a repeated
    index gives sign 0.
    """
    idx = list(indices)
    sign = 1
    # insertion sort, one transposition per swap
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return 0, tuple(idx)
    return sign, tuple(idx)


def basis(dim: int, grade: int) -> list[MultiIndex]:
    """All multi-indices of length ``grade`` in canonical order."""
    return list(combinations(range(1, dim + 1), grade))


class DifferentialForm:
    """A grade-k differential form on R^dim.

    Parameters
    ----------
    dim : int
    grade : int
    coeffs : mapping of multi-index -> PolynomialField
        Keys need not be sorted; they are normalized with the permutation
        sign.  Keys with a repeated index are dropped.
    """

    __slots__ = ("_dim", "_grade", "_coeffs")

    def __init__(self, dim: int, grade: int, coeffs: Mapping[Sequence[int], PolynomialField] | None = None):
        if not 0 <= grade:
            raise ValueError(f"grade must be non-negative, got {grade}")
        self._dim = int(dim)
        self._grade = int(grade)
        acc: dict[MultiIndex, PolynomialField] = {}
        for key, f in (coeffs or {}).items():
            key = tuple(int(k) for k in key)
            if len(key) != grade:
                raise ValueError(f"multi-index {key} has length {len(key)}, expected grade {grade}")
            if any(not 1 <= k <= dim for k in key):
                raise ValueError(f"multi-index {key} out of range 1..{dim}")
            if isinstance(f, Real):
                f = PolynomialField.constant(dim, f)
            if f.dim != dim:
                raise ValueError(f"coefficient dimension {f.dim} != form dimension {dim}")
            sign, skey = sort_sign(key)
            if sign == 0:
                continue
            term = f if sign > 0 else -f
            acc[skey] = acc[skey] + term if skey in acc else term
        self._coeffs = {k: v for k, v in acc.items() if not v.is_zero()}

    @classmethod
    def _raw(cls, dim, grade, coeffs):
        obj = cls.__new__(cls)
        obj._dim = dim
        obj._grade = grade
        obj._coeffs = {k: v for k, v in coeffs.items() if not v.is_zero()}
        return obj

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, dim: int, grade: int) -> "DifferentialForm":
        return cls._raw(dim, grade, {})

    @classmethod
    def scalar(cls, f: PolynomialField) -> "DifferentialForm":
        """The 0-form with coefficient ``f``."""
        return cls(f.dim, 0, {(): f})

    @classmethod
    def basis_form(cls, dim: int, indices: Sequence[int], coeff: float | PolynomialField = 1.0) -> "DifferentialForm":
        """coeff * dx^{indices[0]} ^ ... (indices may be unsorted)."""
        if isinstance(coeff, Real):
            coeff = PolynomialField.constant(dim, coeff)
        return cls(dim, len(indices), {tuple(indices): coeff})

    @classmethod
    def volume(cls, dim: int) -> "DifferentialForm":
        return cls.basis_form(dim, range(1, dim + 1))

    @classmethod
    def one_form(cls, components: Sequence[PolynomialField]) -> "DifferentialForm":
        dim = len(components)
        return cls(dim, 1, {(i + 1,): c for i, c in enumerate(components)})

    # -- properties ----------------------------------------------------
    @property
    def dim(self) -> int:
        return self._dim

    @property
    def grade(self) -> int:
        return self._grade

    @property
    def coeffs(self) -> dict[MultiIndex, PolynomialField]:
        return dict(self._coeffs)

    def __getitem__(self, key: Sequence[int]) -> PolynomialField:
        sign, skey = sort_sign(tuple(key))
        if len(skey) != self._grade:
            raise KeyError(f"multi-index {key} does not match grade {self._grade}")
        if sign == 0 or skey not in self._coeffs:
            return PolynomialField.zero(self._dim)
        c = self._coeffs[skey]
        return c if sign > 0 else -c

    def items(self):
        return self._coeffs.items()

    def is_zero(self) -> bool:
        return not self._coeffs

    def degree(self) -> int:
        """Largest total polynomial degree among the coefficients."""
        return max((c.degree() for c in self._coeffs.values()), default=-1)

    def axis_degree(self) -> int:
        """Largest single-axis degree among the coefficients."""
        return max(
            (c.axis_degree(i) for c in self._coeffs.values() for i in range(1, self._dim + 1)),
            default=-1,
        )

    def max_abs_coeff(self) -> float:
        return max((c.max_abs_coeff() for c in self._coeffs.values()), default=0.0)

    # -- linear structure ----------------------------------------------
    def _check_same_space(self, other: "DifferentialForm") -> None:
        if not isinstance(other, DifferentialForm):
            raise TypeError(f"expected DifferentialForm, got {type(other).__name__}")
        if other._dim != self._dim:
            raise ValueError(f"dimension mismatch: {self._dim} vs {other._dim}")
        if other._grade != self._grade:
            raise ValueError(f"grade mismatch: {self._grade} vs {other._grade}")

    def __add__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        self._check_same_space(other)
        out = dict(self._coeffs)
        for k, v in other._coeffs.items():
            out[k] = out[k] + v if k in out else v
        return DifferentialForm._raw(self._dim, self._grade, out)

    def __neg__(self):
        return DifferentialForm._raw(self._dim, self._grade, {k: -v for k, v in self._coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        """Multiplication by a real number or a scalar field."""
        if isinstance(other, (Real, PolynomialField)):
            return DifferentialForm._raw(self._dim, self._grade, {k: v * other for k, v in self._coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self._dim == other._dim and self._grade == other._grade and self._coeffs == other._coeffs

    __hash__ = None

    def __repr__(self):
        if not self._coeffs:
            return f"DifferentialForm(dim={self._dim}, grade={self._grade}, 0)"
        body = " + ".join(
            f"({c.to_string()})" + ("" if not k else " " + "^".join(f"dx{i}" for i in k))
            for k, c in sorted(self._coeffs.items())
        )
        return f"DifferentialForm(dim={self._dim}, grade={self._grade}, {body})"

    # -- evaluation ----------------------------------------------------
    def evaluate(self, points: np.ndarray) -> dict[MultiIndex, np.ndarray]:
        """Coefficient values at ``points`` (shape (m, dim)), keyed by multi-index."""
        keys = list(self._coeffs)
        vals = evaluate_many([self._coeffs[k] for k in keys], np.asarray(points, dtype=float)) if keys else []
        return dict(zip(keys, vals))

    def coefficient_vector(self, points: np.ndarray) -> np.ndarray:
        """Values in canonical basis order, shape (len(basis), m)."""
        pts = np.asarray(points, dtype=float)
        vals = self.evaluate(pts)
        return np.array([vals.get(k, np.zeros(pts.shape[0])) for k in basis(self._dim, self._grade)])


class VectorField:
    """An n-tuple of polynomial components (v^1, ..., v^n)."""

    __slots__ = ("_components",)

    def __init__(self, components: Sequence[PolynomialField | float]):
        comps = list(components)
        if not comps:
            raise ValueError("vector field needs at least one component")
        dims = {c.dim for c in comps if isinstance(c, PolynomialField)}
        if len(dims) > 1:
            raise ValueError(f"components have mixed dimensions {sorted(dims)}")
        n = len(comps)
        if dims and dims != {n}:
            raise ValueError(f"{n} components must live in dimension {n}, got {dims.pop()}")
        self._components = tuple(
            c if isinstance(c, PolynomialField) else PolynomialField.constant(n, c) for c in comps
        )

    @classmethod
    def zero(cls, dim: int) -> "VectorField":
        return cls([PolynomialField.zero(dim)] * dim)

    @classmethod
    def constant(cls, values: Sequence[float]) -> "VectorField":
        n = len(values)
        return cls([PolynomialField.constant(n, v) for v in values])

    @classmethod
    def coordinate(cls, dim: int, axis: int) -> "VectorField":
        """The constant basis field d/dx^axis (1-based)."""
        vals = [0.0] * dim
        vals[axis - 1] = 1.0
        return cls.constant(vals)

    @property
    def dim(self) -> int:
        return len(self._components)

    @property
    def components(self) -> tuple[PolynomialField, ...]:
        return self._components

    def __getitem__(self, i: int) -> PolynomialField:
        return self._components[i]

    def __iter__(self):
        return iter(self._components)

    def __len__(self):
        return len(self._components)

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        _check_dim(self.dim, other.dim)
        return VectorField([a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        _check_dim(self.dim, other.dim)
        return VectorField([a - b for a, b in zip(self, other)])

    def __neg__(self):
        return VectorField([-a for a in self])

    def __mul__(self, other):
        if isinstance(other, (Real, PolynomialField)):
            return VectorField([a * other for a in self])
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self._components == other._components

    __hash__ = None

    def __repr__(self):
        return "VectorField(" + ", ".join(c.to_string() for c in self) + ")"

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self)

    def degree(self) -> int:
        return max(c.degree() for c in self)

    def max_abs_coeff(self) -> float:
        return max(c.max_abs_coeff() for c in self)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Values at ``points``; shape (m, dim)."""
        return np.stack(evaluate_many(self._components, np.asarray(points, dtype=float)), axis=1)

    def jacobian(self) -> list[list[PolynomialField]]:
        """Matrix of partials, entry [i][j] = d v^{i+1} / d x^{j+1}."""
        return [[c.partial(j) for j in range(1, self.dim + 1)] for c in self]


def _check_dim(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"dimension mismatch: {a} vs {b}")


# -- the alternating-algebra kernel -------------------------------------

def wedge(omega: DifferentialForm, eta: DifferentialForm) -> DifferentialForm:
    """Exterior product.  Grades summing past ``dim`` give the zero form."""
    _check_dim(omega.dim, eta.dim)
    n = omega.dim
    k = omega.grade + eta.grade
    out: dict[MultiIndex, PolynomialField] = {}
    if k > n:
        return DifferentialForm.zero(n, k)
    for I, a in omega.items():
        for J, b in eta.items():
            sign, K = sort_sign(I + J)
            if sign == 0:
                continue
            term = a * b
            if sign < 0:
                term = -term
            out[K] = out[K] + term if K in out else term
    return DifferentialForm._raw(n, k, out)


def exterior_d(omega: DifferentialForm) -> DifferentialForm:
    """Exterior derivative.  d of an n-form is the zero n-form."""
    n, k = omega.dim, omega.grade
    if k >= n:
        return DifferentialForm.zero(n, n)
    out: dict[MultiIndex, PolynomialField] = {}
    for I, f in omega.items():
        for i in range(1, n + 1):
            if i in I:
                continue
            df = f.partial(i)
            if df.is_zero():
                continue
            # dx^i ^ dx^I: move i past the entries of I smaller than it
            pos = sum(1 for j in I if j < i)
            K = tuple(sorted(I + (i,)))
            term = df if pos % 2 == 0 else -df
            out[K] = out[K] + term if K in out else term
    return DifferentialForm._raw(n, k + 1, out)


def contract(v: VectorField, omega: DifferentialForm) -> DifferentialForm:
    """Interior product v _| omega."""
    _check_dim(v.dim, omega.dim)
    if omega.grade == 0:
        raise ValueError("interior product of a 0-form is undefined")
    n, k = omega.dim, omega.grade
    out: dict[MultiIndex, PolynomialField] = {}
    for I, f in omega.items():
        for r, j in enumerate(I):
            vj = v[j - 1]
            if vj.is_zero():
                continue
            K = I[:r] + I[r + 1:]
            term = vj * f
            if r % 2:
                term = -term
            out[K] = out[K] + term if K in out else term
    return DifferentialForm._raw(n, k - 1, out)


def form_linear(a: float, omega: DifferentialForm, b: float, eta: DifferentialForm) -> DifferentialForm:
    """a*omega + b*eta."""
    omega._check_same_space(eta)
    return omega * float(a) + eta * float(b)


def form_residual(a: DifferentialForm, b: DifferentialForm) -> float:
    """Largest per-coefficient relative difference between two forms."""
    a._check_same_space(b)
    keys = set(a.coeffs) | set(b.coeffs)
    zero = PolynomialField.zero(a.dim)
    return max((poly_residual(a.coeffs.get(k, zero), b.coeffs.get(k, zero)) for k in keys), default=0.0)


def forms_close(a: DifferentialForm, b: DifferentialForm, rtol: float = 1e-12) -> bool:
    return form_residual(a, b) <= rtol


def max_abs_value(values: Iterable[np.ndarray]) -> float:
    return max((float(np.max(np.abs(v))) for v in values if np.size(v)), default=0.0)
