"""Seeded random polynomial fields, forms and systems for property suites."""

from __future__ import annotations

import numpy as np

from .ed import EDSystem
from .flows import Motion
from .forms import DifferentialForm, VectorField, basis
from .poly import PolynomialField, monomials_up_to

MAX_DEGREE = 3
MAX_TERMS = 5


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_poly(rng: np.random.Generator, dim: int, max_degree: int = MAX_DEGREE,
                max_terms: int = MAX_TERMS) -> PolynomialField:
    """1..max_terms monomials of total degree <= max_degree, coefficients in [-1, 1]."""
    monos = monomials_up_to(dim, max_degree)
    count = int(rng.integers(1, max_terms + 1))
    picks = rng.choice(len(monos), size=min(count, len(monos)), replace=False)
    coeffs = rng.uniform(-1.0, 1.0, size=len(picks))
    return PolynomialField(dim, {monos[i]: c for i, c in zip(picks, coeffs)})


def random_form(rng: np.random.Generator, dim: int, grade: int, max_degree: int = MAX_DEGREE,
                density: float = 0.7) -> DifferentialForm:
    """Each basis coefficient is present with probability ``density`` (at least one)."""
    keys = basis(dim, grade)
    present = [K for K in keys if rng.random() < density] or [keys[int(rng.integers(len(keys)))]]
    return DifferentialForm(dim, grade, {K: random_poly(rng, dim, max_degree) for K in present})


def random_vector(rng: np.random.Generator, dim: int, max_degree: int = MAX_DEGREE) -> VectorField:
    return VectorField([random_poly(rng, dim, max_degree) for _ in range(dim)])


def random_system(rng: np.random.Generator, n: int, p: int, max_degree: int = MAX_DEGREE) -> EDSystem:
    return EDSystem(n, p, random_form(rng, n, n - p - 1, max_degree), random_form(rng, n, p, max_degree))


def random_motion(rng: np.random.Generator, dim: int, max_degree: int = MAX_DEGREE,
                  second_order: bool = False) -> Motion:
    u = random_vector(rng, dim, max_degree) if second_order else None
    return Motion(random_vector(rng, dim, max_degree), u)
