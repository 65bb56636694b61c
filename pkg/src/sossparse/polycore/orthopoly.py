"""Legendre / Hermite numerics and one-dimensional Gaussian moments.

Legendre polynomials P_i on [-1, 1] are generated by the three-term
recurrence in exact rational arithmetic and only converted to floats at the
end, so orthogonality identities check out to machine precision.  Interval
integrals are always closed-form (power rule), never quadrature.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, sqrt

from ..errors import DomainError
from .monomials import Monomial, Polynomial

_X = 0  # variable id used for univariate polynomials in this module


def univariate(coeffs) -> Polynomial:
    """Polynomial sum_n coeffs[n] * x^n over the module's variable id 0."""
    return Polynomial({Monomial.var(_X, n) if n else Monomial.one(): float(c)
                       for n, c in enumerate(coeffs) if c != 0})


def univariate_coeffs(p: Polynomial, deg: int) -> list:
    out = [0.0] * (deg + 1)
    for m, c in p.terms.items():
        out[m.degree] += c
    return out


@lru_cache(maxsize=None)
def _legendre_fractions(i: int):
    if i < 0:
        raise DomainError("Legendre index must be nonnegative")
    if i == 0:
        return (Fraction(1),)
    if i == 1:
        return (Fraction(0), Fraction(1))
    pm2 = _legendre_fractions(i - 2)
    pm1 = _legendre_fractions(i - 1)
    n = i - 1
    coeffs = [Fraction(0)] * (i + 1)
    for d, c in enumerate(pm1):
        coeffs[d + 1] += Fraction(2 * n + 1, n + 1) * c
    for d, c in enumerate(pm2):
        coeffs[d] -= Fraction(n, n + 1) * c
    return tuple(coeffs)


def legendre(i: int) -> Polynomial:
    """i-th Legendre polynomial on [-1, 1] (float coefficients from exact rationals)."""
    return univariate([float(c) for c in _legendre_fractions(i)])


def integrate_interval(p: Polynomial, a: float = -1.0, b: float = 1.0) -> float:
    """Closed-form integral of a univariate polynomial over [a, b]."""
    total = 0.0
    for m, c in p.terms.items():
        n = m.degree
        total += c * (b ** (n + 1) - a ** (n + 1)) / (n + 1)
    return total


def gaussian_raw_moment(n: int) -> float:
    """E[Z^n] for Z ~ N(0,1): (n-1)!! for even n, 0 for odd."""
    if n < 0:
        raise DomainError("moment order must be nonnegative")
    if n % 2 == 1:
        return 0.0
    out = 1.0
    for j in range(n - 1, 0, -2):
        out *= j
    return out


def shifted_gaussian_raw_moment(n: int, mu: float, var: float) -> float:
    """E[(sigma Z + mu)^n] by binomial expansion over standard Gaussian moments."""
    if var <= 0:
        raise DomainError("variance must be positive")
    sigma = sqrt(var)
    return sum(
        comb(n, j) * mu ** (n - j) * sigma**j * gaussian_raw_moment(j)
        for j in range(0, n + 1)
    )


def gaussian_expect_poly(p: Polynomial, mu: float = 0.0, var: float = 1.0) -> float:
    """E[p(X)] for X ~ N(mu, var), term by term."""
    return sum(c * shifted_gaussian_raw_moment(m.degree, mu, var)
               for m, c in p.terms.items())


def hermite_shift_expectation(j: int, mu: float) -> float:
    """E[h_j(X + mu)] = mu^j / sqrt(j!) for the normalized probabilist's Hermite h_j."""
    if j < 0:
        raise DomainError("Hermite index must be nonnegative")
    return mu**j / sqrt(factorial(j))


@lru_cache(maxsize=None)
def hermite_normalized(j: int) -> Polynomial:
    """Normalized probabilist's Hermite polynomial h_j = He_j / sqrt(j!)."""
    if j < 0:
        raise DomainError("Hermite index must be nonnegative")
    # He recurrence with exact integer coefficients
    coeffs = {0: [Fraction(1)], 1: [Fraction(0), Fraction(1)]}
    for n in range(1, j):
        cur, prev = coeffs[n], coeffs[n - 1]
        nxt = [Fraction(0)] * (n + 2)
        for d, c in enumerate(cur):
            nxt[d + 1] += c
        for d, c in enumerate(prev):
            nxt[d] -= n * c
        coeffs[n + 1] = nxt
    norm = 1.0 / sqrt(factorial(j))
    return univariate([float(c) * norm for c in coeffs[j]])
