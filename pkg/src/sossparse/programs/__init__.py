"""Builders for the concrete polynomial constraint systems."""

from .axioms import build_k_sparse_axioms
from .certs import (
    linform_vs_quadform_certificate,
    quadform_square_bound_certificate,
    sparse_poly_bound_certificate,
)
from .gaussian import build_gaussian_program
from .planted import PlantedReport, check_planted_feasibility
from .quantifier import ConsEncoding, build_cons_constraints
from .sparse_mean import ProgramBundle, build_sparse_mean_program

__all__ = [
    "build_k_sparse_axioms",
    "build_cons_constraints",
    "ConsEncoding",
    "build_sparse_mean_program",
    "build_gaussian_program",
    "ProgramBundle",
    "check_planted_feasibility",
    "PlantedReport",
    "sparse_poly_bound_certificate",
    "linform_vs_quadform_certificate",
    "quadform_square_bound_certificate",
]
