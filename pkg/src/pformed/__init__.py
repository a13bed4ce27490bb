"""Exterior calculus with polynomial coefficients and premetric p-form
electrodynamics: energy and force functionals computed by independent routes.
"""

from .ed import EDSystem, EnergyReport, energy, energy_under_motion, maxwell_residual, traction
from .flows import Motion, SmoothMap, jacobian_det, lie_derivative, lie_fd_oracle, pullback
from .force import (
    ForceReport,
    electrostatic_force_terms,
    force,
    force_alt,
    force_fd,
    magnetostatic_force_terms,
    magnetostatic_pointwise_check,
    transported_energy_oracle_p0,
    transported_energy_oracle_p1,
)
from .forms import DifferentialForm, VectorField, contract, exterior_d, form_linear, wedge
from .poly import PolynomialField, poly_eval, poly_partial
from .regions import Box, QuadratureRule, Region, integrate_boundary, integrate_volume, stokes_residual

__version__ = "0.1.0"

__all__ = [
    "Box",
    "DifferentialForm",
    "EDSystem",
    "EnergyReport",
    "ForceReport",
    "Motion",
    "PolynomialField",
    "QuadratureRule",
    "Region",
    "SmoothMap",
    "VectorField",
    "contract",
    "electrostatic_force_terms",
    "energy",
    "energy_under_motion",
    "exterior_d",
    "force",
    "force_alt",
    "force_fd",
    "form_linear",
    "integrate_boundary",
    "integrate_volume",
    "jacobian_det",
    "lie_derivative",
    "lie_fd_oracle",
    "magnetostatic_force_terms",
    "magnetostatic_pointwise_check",
    "maxwell_residual",
    "poly_eval",
    "poly_partial",
    "pullback",
    "stokes_residual",
    "traction",
    "transported_energy_oracle_p0",
    "transported_energy_oracle_p1",
    "wedge",
]
