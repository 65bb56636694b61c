"""Polynomial and tensor algebra core."""

from .monomials import Monomial, Polynomial, poly_arith
from .orthopoly import (
    gaussian_expect_poly,
    gaussian_raw_moment,
    hermite_normalized,
    hermite_shift_expectation,
    integrate_interval,
    legendre,
    shifted_gaussian_raw_moment,
    univariate,
)
from .tensors import (
    SymmetricTensor,
    all_sorted_indices,
    gaussian_moment_tensor,
    index_multiplicity,
    pairings,
    tensor_apply_power,
)

__all__ = [
    "Monomial",
    "Polynomial",
    "poly_arith",
    "legendre",
    "univariate",
    "integrate_interval",
    "gaussian_raw_moment",
    "shifted_gaussian_raw_moment",
    "gaussian_expect_poly",
    "hermite_shift_expectation",
    "hermite_normalized",
    "SymmetricTensor",
    "gaussian_moment_tensor",
    "all_sorted_indices",
    "index_multiplicity",
    "pairings",
    "tensor_apply_power",
]
