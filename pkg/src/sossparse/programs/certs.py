"""Explicit SoS certificates from the k-sparsity axioms.

Three constructions, all returning a machine-checkable SosCertificate against
the axiom system of build_k_sparse_axioms(d, k) (equality order: z_i^2 - z_i
for i < d, then v_i z_i - v_i, then sum z - k, then sum v^2 - 1):

* bounded linear form, squared:     K - (sum_T a_T v_T)^2
* bounded linear form vs quad form: c*(v^T S v)^{t/2} -/+ sum_T a_T v_T
* bounded quadratic form, squared:  B - (v^T S v)^2

The first follows the k-sparse polynomial bound chain (substitute v_T ->
v_T z_T, Cauchy-Schwarz, coefficient maximum, reduce z/v powers through the
axioms); the margins it needs are K >= k^t max a_T^2, c*λ_min(S)^{t/2} >=
k^{t/2} max|a_T|, and B >= λ_max(S)^2 respectively.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import sqrt
from typing import Dict, List, Tuple

import numpy as np

from ..engine import ConstraintSystem, SosCertificate, SquareTerm
from ..errors import DomainError
from ..polycore import Monomial, Polynomial
from .axioms import build_k_sparse_axioms


@dataclass
class ChainResult:
    certificate: SosCertificate
    target: Polynomial
    margin: float
    axioms: ConstraintSystem


def _mono(ids_exps: Dict[int, int]) -> Monomial:
    return Monomial(ids_exps)


def _tuple_monomial(ids: Tuple[int, ...], offset: int = 0) -> Monomial:
    exps: Dict[int, int] = {}
    for i in ids:
        exps[i + offset] = exps.get(i + offset, 0) + 1
    return Monomial(exps)


class _KSparseScratch:
    """Shared pieces of the chain constructions for fixed (d, k, t)."""

    def __init__(self, d: int, k: int, t: int, a_lookup):
        self.d, self.k, self.t = d, k, t
        self.tuples = list(itertools.product(range(d), repeat=t))
        self.a = {T: float(a_lookup(T)) for T in self.tuples}
        self.max_a2 = max((v * v for v in self.a.values()), default=0.0)
        # variable layout from build_k_sparse_axioms: v block then z block
        self.v_off, self.z_off = 0, d

    def v_mono(self, T):
        return _tuple_monomial(T, self.v_off)

    def z_mono(self, T):
        return _tuple_monomial(T, self.z_off)

    def vz_mono(self, T):
        m = self.v_mono(T)
        return m * self.z_mono(T)

    def p_poly(self) -> Polynomial:
        return Polynomial([(self.v_mono(T), self.a[T]) for T in self.tuples if self.a[T]])

    def p_tilde(self) -> Polynomial:
        return Polynomial([(self.vz_mono(T), self.a[T]) for T in self.tuples if self.a[T]])

    def e2_telescope(self) -> Dict[int, Polynomial]:
        """g_i with p - p_tilde = sum_i (v_i z_i - v_i) * g_i."""
        g: Dict[int, Polynomial] = {}
        for T in self.tuples:
            aT = self.a[T]
            if aT == 0.0:
                continue
            for j in range(self.t):
                i = T[j]
                prefix: Dict[int, int] = {}
                for l in range(j):
                    prefix[T[l] + self.v_off] = prefix.get(T[l] + self.v_off, 0) + 1
                    prefix[T[l] + self.z_off] = prefix.get(T[l] + self.z_off, 0) + 1
                for l in range(j + 1, self.t):
                    prefix[T[l] + self.v_off] = prefix.get(T[l] + self.v_off, 0) + 1
                mono = _mono(prefix)
                g[i] = g.get(i, Polynomial()) + Polynomial.monomial(mono, -aT)
        return g

    def e1_telescope(self) -> Dict[int, Polynomial]:
        """h_i with sum_T z_T^2 - sum_T z_T = sum_i (z_i^2 - z_i) * h_i."""
        h: Dict[int, Polynomial] = {}
        for T in self.tuples:
            for j in range(self.t):
                i = T[j]
                exps: Dict[int, int] = {}
                for l in range(j):
                    exps[T[l] + self.z_off] = exps.get(T[l] + self.z_off, 0) + 1
                for l in range(j + 1, self.t):
                    exps[T[l] + self.z_off] = exps.get(T[l] + self.z_off, 0) + 2
                mono = _mono(exps)
                h[i] = h.get(i, Polynomial()) + Polynomial.monomial(mono, 1.0)
        return h

    def sum_z(self) -> Polynomial:
        return Polynomial({_mono({self.z_off + i: 1}): 1.0 for i in range(self.d)})

    def sum_v2(self) -> Polynomial:
        return Polynomial({_mono({self.v_off + i: 2}): 1.0 for i in range(self.d)})

    def sum_vT2(self) -> Polynomial:
        return self.sum_v2() ** self.t

    def geom_cofactor(self, base: Polynomial, const: float, power: int) -> Polynomial:
        """sum_{r<power} base^r const^{power-1-r}, so base^power - const^power
        equals (base - const) times it."""
        out = Polynomial()
        for r in range(power):
            out = out + base**r * (const ** (power - 1 - r))
        return out


def sparse_poly_bound_certificate(a_lookup, d: int, k: int, t: int, bound: float = None) -> ChainResult:
    """Certificate for K - (sum_T a_T v_T)^2 from the k-sparsity axioms.

    ``a_lookup(T)`` gives the coefficient of the ordered tuple T; ``bound`` K
    defaults to the tight k^t * max a_T^2.
    """
    sc = _KSparseScratch(d, k, t, a_lookup)
    axioms = build_k_sparse_axioms(d, k)
    K = k**t * sc.max_a2 if bound is None else float(bound)
    margin = K - k**t * sc.max_a2
    if margin < 0:
        raise DomainError(f"bound {K} below the certifiable value {k ** t * sc.max_a2}")

    cert = SosCertificate()
    p, ptilde = sc.p_poly(), sc.p_tilde()

    # margin as a constant square
    if margin > 0:
        cert.square_terms.append(SquareTerm(margin, Polynomial.constant(1.0)))

    # Cauchy-Schwarz (Lagrange) squares over pairs of tuples
    for T, Tp in itertools.combinations(sc.tuples, 2):
        aT, aTp = sc.a[T], sc.a[Tp]
        q = Polynomial(
            [
                (sc.z_mono(T) * sc.v_mono(Tp), aT),
                (sc.z_mono(Tp) * sc.v_mono(T), -aTp),
            ]
        )
        if not q.is_zero():
            cert.square_terms.append(SquareTerm(1.0, q))

    # coefficient-maximum slack: sum_{T,T'} (max a^2 - a_T^2) (z_T v_{T'})^2
    for T in sc.tuples:
        w = sc.max_a2 - sc.a[T] ** 2
        if w <= 0:
            continue
        for Tp in sc.tuples:
            cert.square_terms.append(
                SquareTerm(w, Polynomial.monomial(sc.z_mono(T) * sc.v_mono(Tp)))
            )

    mult: Dict[int, Polynomial] = {}

    def add_mult(idx, poly):
        if not poly.is_zero():
            mult[idx] = mult.get(idx, Polynomial()) + poly

    # e2 part: -(p - ptilde)(p + ptilde)
    p_plus = p + ptilde
    for i, g in sc.e2_telescope().items():
        add_mult(d + i, g * p_plus * -1.0)

    # z/v power reduction, scaled by max a^2
    sum_vT2 = sc.sum_vT2()
    for i, h in sc.e1_telescope().items():
        add_mult(i, h * sum_vT2 * -sc.max_a2)
    b3 = sc.geom_cofactor(sc.sum_z(), float(k), t)
    add_mult(2 * d, b3 * sum_vT2 * -sc.max_a2)
    b4 = sc.geom_cofactor(sc.sum_v2(), 1.0, t)
    add_mult(2 * d + 1, b4 * -(sc.max_a2 * k**t))

    cert.eq_multipliers = mult
    target = Polynomial.constant(K) - p * p
    return ChainResult(cert, target, margin, axioms)


def _sos_squares_of_quadform(mat: np.ndarray, v_off: int = 0, tol: float = 1e-12):
    """PSD quadratic form v^T M v as weighted squares of linear forms."""
    sym = 0.5 * (mat + mat.T)
    vals, vecs = np.linalg.eigh(sym)
    out = []
    for lam, vec in zip(vals, vecs.T):
        if lam <= tol:
            continue
        q = Polynomial({_mono({v_off + i: 1}): float(c) for i, c in enumerate(vec) if c != 0.0})
        out.append((float(lam), q))
    return out


def _square_list_product(sq_a, sq_b):
    return [(wa * wb, qa * qb) for wa, qa in sq_a for wb, qb in sq_b]


def linform_vs_quadform_certificate(
    a_lookup, sigma: np.ndarray, c_bound: float, d: int, k: int, t: int, sign: int
) -> ChainResult:
    """Certificate for c*(v^T S v)^{t/2} - sign * sum_T a_T v_T (t even).

    Margin: c * λ_min(S)^{t/2} - k^{t/2} max|a_T|.
    """
    if t % 2:
        raise DomainError("t must be even")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    q_half = t // 2
    sc = _KSparseScratch(d, k, t, a_lookup)
    axioms = build_k_sparse_axioms(d, k)
    sigma = np.asarray(sigma, dtype=float)
    lam_min = float(np.linalg.eigvalsh(0.5 * (sigma + sigma.T)).min())
    if lam_min < 0:
        raise DomainError("quadratic form must be PSD for this construction")
    max_abs_a = sqrt(sc.max_a2)
    margin = c_bound * lam_min**q_half - k ** (t // 2) * max_abs_a
    if margin < 0:
        raise DomainError(
            f"bound {c_bound * lam_min ** q_half:.6g} below certifiable value "
            f"{k ** (t // 2) * max_abs_a:.6g}"
        )

    cert = SosCertificate()
    mult: Dict[int, Polynomial] = {}

    def add_mult(idx, poly):
        if not poly.is_zero():
            mult[idx] = mult.get(idx, Polynomial()) + poly

    s_poly = Polynomial()
    for i in range(d):
        for j in range(d):
            if sigma[i, j] != 0.0:
                s_poly = s_poly + Polynomial.monomial(
                    _mono({i: 1}) * _mono({j: 1}), float(sigma[i, j])
                )

    # c * (s^q - lam^q (sum v^2)^q): (s - lam sum v^2) * geometric cofactor,
    # both sides sums of squares
    sos_a = _sos_squares_of_quadform(sigma - lam_min * np.eye(d))
    sum_v2 = sc.sum_v2()
    unit_squares = [(1.0, Polynomial.monomial(_mono({i: 1}))) for i in range(d)]
    cofactor_squares = []
    sigma_squares = _sos_squares_of_quadform(sigma)
    for r in range(q_half):
        blocks = [sigma_squares] * r + [unit_squares] * (q_half - 1 - r)
        prod = [(lam_min ** (q_half - 1 - r), Polynomial.constant(1.0))]
        for blk in blocks:
            prod = _square_list_product(prod, blk)
        cofactor_squares.extend(prod)
    for w, q in _square_list_product(sos_a, cofactor_squares):
        cert.square_terms.append(SquareTerm(c_bound * w, q * 1.0))

    # c lam^q ((sum v^2)^q - 1) via the norm axiom
    add_mult(
        2 * d + 1,
        sc.geom_cofactor(sum_v2, 1.0, q_half) * (c_bound * lam_min**q_half),
    )

    # c lam^q - sign * p
    alpha = max(sqrt(sc.max_a2 * k**t) / 2.0, 1e-12)
    for i, g in sc.e2_telescope().items():
        add_mult(d + i, g * float(-sign))
    for T in sc.tuples:
        beta = sign * sc.a[T] / (2.0 * alpha)
        q = Polynomial({sc.v_mono(T): 1.0})
        if beta != 0.0:
            q = q - Polynomial.monomial(sc.z_mono(T), beta)
        cert.square_terms.append(SquareTerm(alpha, q))
        w = (sc.max_a2 - sc.a[T] ** 2) / (4.0 * alpha)
        if w > 0:
            cert.square_terms.append(SquareTerm(w, Polynomial.monomial(sc.z_mono(T))))
    for i, h in sc.e1_telescope().items():
        add_mult(i, h * (-sc.max_a2 / (4.0 * alpha)))
    add_mult(2 * d, sc.geom_cofactor(sc.sum_z(), float(k), t) * (-sc.max_a2 / (4.0 * alpha)))
    # -alpha (sum_T v_T^2): reduce to -alpha via the norm axiom
    add_mult(2 * d + 1, sc.geom_cofactor(sum_v2, 1.0, t) * -alpha)
    # leftover constant: c lam^q - alpha - max_a2 k^t/(4 alpha) >= margin
    const = c_bound * lam_min**q_half - alpha - sc.max_a2 * k**t / (4.0 * alpha)
    if const < -1e-9:
        raise DomainError("internal: negative constant in split certificate")
    if const > 0:
        cert.square_terms.append(SquareTerm(const, Polynomial.constant(1.0)))

    cert.eq_multipliers = mult
    target = Polynomial.constant(c_bound) * s_poly**q_half - sc.p_poly() * float(sign)
    return ChainResult(cert, target, margin, axioms)


def quadform_square_bound_certificate(
    sigma: np.ndarray, bound: float, d: int, k: int
) -> ChainResult:
    """Certificate for B - (v^T S v)^2; margin sqrt(B) - λ_max(S)."""
    sigma = np.asarray(sigma, dtype=float)
    sym = 0.5 * (sigma + sigma.T)
    eigs = np.linalg.eigvalsh(sym)
    lam_min, lam_max = float(eigs.min()), float(eigs.max())
    if lam_min < 0:
        raise DomainError("quadratic form must be PSD")
    if bound <= 0:
        raise DomainError("bound must be positive")
    beta = sqrt(bound)
    margin = beta - lam_max
    if margin < 0:
        raise DomainError(f"bound sqrt {beta:.6g} below λ_max {lam_max:.6g}")

    axioms = build_k_sparse_axioms(d, k)
    cert = SosCertificate()
    sos_b = _sos_squares_of_quadform(lam_max * np.eye(d) - sym)  # λmax Σv² - s
    sos_a = _sos_squares_of_quadform(sym - lam_min * np.eye(d))  # s - λmin Σv²
    c1, c2 = beta - lam_max, beta + lam_min
    m1, m2 = -lam_max, lam_min

    # product (c1 + m1 e4 + σ1)(c2 + m2 e4 + σ2)
    if c1 * c2 > 0:
        cert.square_terms.append(SquareTerm(c1 * c2, Polynomial.constant(1.0)))
    for w, q in sos_b:
        cert.square_terms.append(SquareTerm(c2 * w, q))
    for w, q in sos_a:
        cert.square_terms.append(SquareTerm(c1 * w, q))
    for w, q in _square_list_product(sos_b, sos_a):
        cert.square_terms.append(SquareTerm(w, q))

    sigma1 = Polynomial()
    for w, q in sos_b:
        sigma1 = sigma1 + q * q * w
    sigma2 = Polynomial()
    for w, q in sos_a:
        sigma2 = sigma2 + q * q * w
    e4 = axioms.equalities[2 * d + 1]
    multiplier = (
        Polynomial.constant(m1 * c2)
        + e4 * (m1 * m2)
        + sigma2 * m1
        + Polynomial.constant(m2 * c1)
        + sigma1 * m2
    )
    cert.eq_multipliers = {2 * d + 1: multiplier}

    s_poly = Polynomial()
    for i in range(d):
        for j in range(d):
            if sym[i, j] != 0.0:
                s_poly = s_poly + Polynomial.monomial(_mono({i: 1}) * _mono({j: 1}), float(sym[i, j]))
    target = Polynomial.constant(bound) - s_poly * s_poly
    return ChainResult(cert, target, margin, axioms)
