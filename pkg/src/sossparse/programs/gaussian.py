"""Polynomial program for robust sparse mean estimation with Gaussian inliers.

On top of the corruption axioms, the program carries the covariance
indeterminate Sigma' (entry variables S_ab tied to the ghost samples), the
Gaussian fourth-moment identity in k-sparse directions (three selectable
encodings) and the operator-norm guard (v' Sigma' v)^2 <= B.
"""

from __future__ import annotations

from math import log, sqrt
from typing import Dict, Optional

import numpy as np

from ..config import DEFAULTS, Constants
from ..engine import ConstraintSystem, VariableRegistry
from ..errors import DomainError
from ..polycore import Monomial, Polynomial
from ..polycore.tensors import all_sorted_indices
from .axioms import build_k_sparse_axioms
from .quantifier import build_cons_constraints
from .sparse_mean import (
    LinformSplitItem,
    MarginOnlyItem,
    ProgramBundle,
    QuadformBoundItem,
    _fingerprint,
    central_moment_coeff,
)

ITEM3_ENCODINGS = ("linf", "cons-split", "cons-squared")


def _sym_index(d: int, a: int, b: int) -> int:
    """Position of sorted pair (a, b) in the packed upper triangle."""
    a, b = min(a, b), max(a, b)
    return a * d - a * (a - 1) // 2 + (b - a)


def robust_scales(Y: np.ndarray):
    """Coordinate medians and MAD-based scales."""
    med = np.median(Y, axis=0)
    mad = np.median(np.abs(Y - med), axis=0)
    return med, np.maximum(1.4826 * mad, 1e-12)


def tensor_entry_slacks(Y: np.ndarray, eps: float, constants: Constants):
    """Per-entry slack for the order-4 central moment vs Isserlis identity.

    tau_T = slack_c2 * eps * log(1/eps) * scale_T + slack_floor_c * se_T with
    se_T a trimmed standard error of the per-sample products, so the planted
    (clean) assignment stays feasible at desk-scale sample sizes.
    """
    m, d = Y.shape
    med, sd = robust_scales(Y)
    Z = Y - med
    eps_term = constants.slack_c2 * eps * log(1.0 / eps) if eps > 0 else 0.0
    taus = {}
    ses = {}
    for T in all_sorted_indices(d, 4):
        u = Z[:, T[0]] * Z[:, T[1]] * Z[:, T[2]] * Z[:, T[3]]
        order = np.argsort(np.abs(u - np.median(u)))
        keep = max(2, int(np.ceil(m * (1.0 - constants.trim_frac_se))))
        kept = u[order[:keep]]
        se = constants.se_trim_correction * float(np.std(kept, ddof=1)) / sqrt(m)
        scale = float(sd[T[0]] * sd[T[1]] * sd[T[2]] * sd[T[3]])
        ses[T] = se
        taus[T] = eps_term * scale + constants.slack_floor_c * se
    return taus, ses


def robust_lambda_max(Y: np.ndarray, eps: float) -> float:
    """Largest eigenvalue of the covariance of the (eps-trimmed) sample."""
    m = Y.shape[0]
    med = np.median(Y, axis=0)
    dist = np.linalg.norm(Y - med, axis=1)
    drop = int(np.ceil(eps * m))
    keep = np.argsort(dist)[: max(2, m - drop)]
    Z = Y[keep] - Y[keep].mean(axis=0)
    cov = Z.T @ Z / len(keep)
    return float(np.linalg.eigvalsh(cov).max())


def build_gaussian_program(
    Y: np.ndarray,
    eps: float,
    k: int,
    degree: int = 4,
    item3: str = "linf",
    radius: Optional[float] = None,
    constants: Constants = DEFAULTS,
) -> ProgramBundle:
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise DomainError("Y must be an (m, d) sample matrix")
    m, d = Y.shape
    if not (0 <= eps < 0.5):
        raise DomainError(f"eps must lie in [0, 1/2), got {eps}")
    if not (1 <= k <= d):
        raise DomainError("need 1 <= k <= d")
    if degree not in (4, 6, 12):
        raise DomainError(f"degree must be one of 4, 6, 12, got {degree}")
    if item3 not in ITEM3_ENCODINGS:
        raise DomainError(f"item3 must be one of {ITEM3_ENCODINGS}")

    n_sym = d * (d + 1) // 2
    reg = VariableRegistry()
    reg.add_group("w", m, degree)
    reg.add_group("X", m * d, degree)
    reg.add_group("S", n_sym, degree)
    cs = ConstraintSystem(registry=reg, relaxation_degree=degree)

    w = [Polynomial.variable(reg.var("w", i)) for i in range(m)]
    for i in range(m):
        cs.add_equality(w[i] * w[i] - w[i])
    for i in range(m):
        for a in range(d):
            xv = Polynomial.variable(reg.var("X", i * d + a))
            cs.add_equality(w[i] * (float(Y[i, a]) - xv))
    sum_w = Polynomial()
    for i in range(m):
        sum_w = sum_w + w[i]
    cs.add_equality(sum_w - (1.0 - eps) * m)

    cache: dict = {}
    s_poly = {}
    for a in range(d):
        for b in range(a, d):
            s_poly[(a, b)] = Polynomial.variable(reg.var("S", _sym_index(d, a, b)))
            cs.add_equality(s_poly[(a, b)] - central_moment_coeff(reg, m, d, (a, b), cache))

    def S_of(a, b):
        return s_poly[(min(a, b), max(a, b))]

    taus, ses = tensor_entry_slacks(Y, eps, constants)
    se4max = max(ses.values()) if ses else 0.0
    cons = []
    item3_info: dict = {"encoding": item3}

    if item3 == "linf":
        for T in all_sorted_indices(d, 4):
            emp = central_moment_coeff(reg, m, d, T, cache)
            isserlis = (
                S_of(T[0], T[1]) * S_of(T[2], T[3])
                + S_of(T[0], T[2]) * S_of(T[1], T[3])
                + S_of(T[0], T[3]) * S_of(T[1], T[2])
            )
            diff = emp - isserlis
            cs.add_inequality(Polynomial.constant(taus[T]) - diff)
            cs.add_inequality(Polynomial.constant(taus[T]) + diff)
        item3_info["taus"] = {str(T): v for T, v in taus.items()}
    else:
        eps_term = sqrt(constants.slack_c4) * eps * log(1.0 / eps) if eps > 0 else 0.0
        bound_const = eps_term + constants.slack_floor_c * (k**2) * se4max
        item3_info["bound_const"] = bound_const
        c4 = {
            S: central_moment_coeff(reg, m, d, S, cache) for S in all_sorted_indices(d, 4)
        }
        if item3 == "cons-split":
            for sign in (1, -1):
                b_coeffs: Dict[Monomial, Polynomial] = {}
                for T in np.ndindex(*(d,) * 4):
                    key = Monomial(
                        {a: sum(1 for x in T if x == a) for a in set(T)}
                    )
                    pair = S_of(T[0], T[1]) * S_of(T[2], T[3])
                    term = pair * (bound_const + 3.0 * sign) - c4[tuple(sorted(T))] * float(sign)
                    b_coeffs[key] = b_coeffs.get(key, Polynomial()) + term
                enc = build_cons_constraints(
                    cs,
                    build_k_sparse_axioms(d, k),
                    b_coeffs,
                    t=4,
                    prefix=f"g3{'p' if sign > 0 else 'n'}",
                    parity_ids=set(range(d)),
                )
                enc.item = LinformSplitItem(t=4, k=k, d=d, sign=sign, bound_const=bound_const)
                cons.append(enc)
        else:  # cons-squared: the literal squared identity at elimination degree 8
            slack = bound_const * bound_const
            terms = {}
            for T in np.ndindex(*(d,) * 4):
                pair = S_of(T[0], T[1]) * S_of(T[2], T[3])
                terms[T] = (c4[tuple(sorted(T))] - 3.0 * pair, pair)
            b_coeffs = {}
            for T1, (dev1, pair1) in terms.items():
                for T2, (dev2, pair2) in terms.items():
                    exps: Dict[int, int] = {}
                    for a in T1 + T2:
                        exps[a] = exps.get(a, 0) + 1
                    key = Monomial(exps)
                    contrib = pair1 * pair2 * slack - dev1 * dev2
                    b_coeffs[key] = b_coeffs.get(key, Polynomial()) + contrib
            enc = build_cons_constraints(
                cs,
                build_k_sparse_axioms(d, k),
                b_coeffs,
                t=4,
                prefix="g3sq",
                parity_ids=set(range(d)),
            )
            enc.item = MarginOnlyItem(t=4, k=k, d=d, slack=slack)
            cons.append(enc)

    # item 4: (v' Sigma' v)^2 <= B
    b4 = constants.b4_bound
    if constants.b4_adaptive:
        lam = robust_lambda_max(Y, eps)
        var_bound = constants.b4_adaptive_c * lam * (1.0 + sqrt(d / m)) ** 2
        b4 = max(b4, var_bound**2)
    b4_coeffs: Dict[Monomial, Polynomial] = {Monomial.one(): Polynomial.constant(b4)}
    for T in np.ndindex(*(d,) * 4):
        exps = {}
        for a in T:
            exps[a] = exps.get(a, 0) + 1
        key = Monomial(exps)
        pair = S_of(T[0], T[1]) * S_of(T[2], T[3])
        b4_coeffs[key] = b4_coeffs.get(key, Polynomial()) - pair
    enc4 = build_cons_constraints(
        cs,
        build_k_sparse_axioms(d, k),
        b4_coeffs,
        t=2,
        prefix="g4",
        parity_ids=set(range(d)),
    )
    enc4.item = QuadformBoundItem(k=k, d=d, bound=b4)
    cons.append(enc4)

    if radius is not None:
        cs.ball_bound = (float(radius) * np.sqrt(m), "X")

    mu_prime = []
    for a in range(d):
        form = Polynomial()
        for i in range(m):
            form = form + Polynomial.monomial(Monomial.var(reg.var("X", i * d + a)), 1.0 / m)
        mu_prime.append(form)
    sigma_prime = [s_poly[(a, b)] for a in range(d) for b in range(a, d)]

    params = dict(m=m, d=d, k=k, eps=eps, degree=degree, item3=item3)
    meta = dict(
        params,
        fingerprint=_fingerprint(Y, params),
        eps_above_paper_cap=bool(eps >= 3.0 / 1000.0),
        degree_is_paper_faithful=bool(degree == 12),
        b4_bound=b4,
        se4max=se4max,
        item3_info=item3_info,
        radius=radius,
        program="gaussian-mean",
    )
    bundle = ProgramBundle(
        cs=cs,
        extraction={"mu_prime": mu_prime, "sigma_prime": sigma_prime},
        meta=meta,
        cons=cons,
        data_equality_count=m + m * d + 1 + n_sym,
    )
    return bundle
