"""Exterior calculus <-> vector analysis dictionary in R^3.

Uses the Euclidean identity metric: a 1-form a_i dx^i is identified with the
vector (a_1, a_2, a_3), a 2-form gamma with the unique vector g such that
gamma = g _| dV, and a 3-form with its density relative to dV.
"""

from __future__ import annotations

from .forms import DifferentialForm, VectorField, contract
from .poly import PolynomialField, poly_residual


def levi_civita(*idx: int) -> int:
    """Permutation symbol on 1-based indices, any length."""
    n = len(idx)
    if sorted(idx) != list(range(1, n + 1)):
        return 0
    sign = 1
    seen = list(idx)
    for i in range(n):
        while seen[i] != i + 1:
            j = seen[i] - 1
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def kronecker(i: int, j: int) -> int:
    return 1 if i == j else 0


def _require3(dim: int, what: str) -> None:
    if dim != 3:
        raise ValueError(f"{what} requires dimension 3, got {dim}")


def _require_form(omega: DifferentialForm, grade: int, what: str) -> None:
    _require3(omega.dim, what)
    if omega.grade != grade:
        raise ValueError(f"{what} requires a {grade}-form, got grade {omega.grade}")


def sharp(omega: DifferentialForm) -> VectorField:
    _require_form(omega, 1, "sharp")
    return VectorField([omega[(i,)] for i in (1, 2, 3)])


def flat(v: VectorField) -> DifferentialForm:
    _require3(v.dim, "flat")
    return DifferentialForm.one_form(v.components)


def volume_form() -> DifferentialForm:
    return DifferentialForm.volume(3)


def proxy_of_2form(gamma: DifferentialForm) -> VectorField:
    """Axial vector g^l = 1/2 eps^{ljk} gamma_{jk}."""
    _require_form(gamma, 2, "proxy_of_2form")
    comps = []
    for l in (1, 2, 3):
        acc = PolynomialField.zero(3)
        for j in (1, 2, 3):
            for k in (1, 2, 3):
                e = levi_civita(l, j, k)
                if e:
                    # gamma_{jk} as an antisymmetric array; the 1/2 and the
                    # double count over (j,k),(k,j) cancel
                    acc = acc + gamma[(j, k)] * (0.5 * e)
        comps.append(acc)
    return VectorField(comps)


def proxy_to_2form(v: VectorField) -> DifferentialForm:
    """gamma = v _| dV."""
    _require3(v.dim, "proxy_to_2form")
    return contract(v, volume_form())


def density_of_3form(tau: DifferentialForm) -> PolynomialField:
    _require_form(tau, 3, "density_of_3form")
    return tau[(1, 2, 3)]


def density_to_3form(f: PolynomialField) -> DifferentialForm:
    _require3(f.dim, "density_to_3form")
    return DifferentialForm(3, 3, {(1, 2, 3): f})


# -- vector analysis ----------------------------------------------------

def grad(f: PolynomialField) -> VectorField:
    _require3(f.dim, "grad")
    return VectorField(f.gradient())


def div(v: VectorField) -> PolynomialField:
    _require3(v.dim, "div")
    return v[0].partial(1) + v[1].partial(2) + v[2].partial(3)


def curl(v: VectorField) -> VectorField:
    """(curl v)^i = eps^{ijk} v^k_{,j}."""
    _require3(v.dim, "curl")
    comps = []
    for i in (1, 2, 3):
        acc = PolynomialField.zero(3)
        for j in (1, 2, 3):
            for k in (1, 2, 3):
                e = levi_civita(i, j, k)
                if e:
                    acc = acc + v[k - 1].partial(j) * e
        comps.append(acc)
    return VectorField(comps)


def cross(u: VectorField, w: VectorField) -> VectorField:
    """(u x w)^i = eps^{ijk} u^j w^k."""
    _require3(u.dim, "cross")
    _require3(w.dim, "cross")
    comps = []
    for i in (1, 2, 3):
        acc = PolynomialField.zero(3)
        for j in (1, 2, 3):
            for k in (1, 2, 3):
                e = levi_civita(i, j, k)
                if e:
                    acc = acc + u[j - 1] * w[k - 1] * e
        comps.append(acc)
    return VectorField(comps)


def dot(u: VectorField, w: VectorField) -> PolynomialField:
    if u.dim != w.dim:
        raise ValueError(f"dimension mismatch: {u.dim} vs {w.dim}")
    acc = PolynomialField.zero(u.dim)
    for a, b in zip(u, w):
        acc = acc + a * b
    return acc


def directional(u: VectorField, w: VectorField) -> VectorField:
    """(u . nabla) w, i.e. component i is u^j w^i_{,j}."""
    if u.dim != w.dim:
        raise ValueError(f"dimension mismatch: {u.dim} vs {w.dim}")
    return VectorField([dot(u, VectorField(c.gradient())) for c in w])


def position(dim: int = 3) -> VectorField:
    """The identity field x -> x."""
    return VectorField([PolynomialField.coordinate(dim, i) for i in range(1, dim + 1)])


def vector_residual(u: VectorField, w: VectorField) -> float:
    if u.dim != w.dim:
        raise ValueError(f"dimension mismatch: {u.dim} vs {w.dim}")
    return max(poly_residual(a, b) for a, b in zip(u, w))
