"""Polynomial program for robust sparse mean estimation with bounded moments.

Variables: weights w_i (booleans selecting kept samples), ghost samples X'_i,
plus the quantifier-elimination auxiliaries encoding that the uniform
distribution over the X'_i has t-th moments certifiably bounded by M in
k-sparse directions.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..config import DEFAULTS, Constants
from ..engine import ConstraintSystem, VariableRegistry
from ..errors import DomainError, SizeCapError
from ..polycore import Monomial, Polynomial
from ..polycore.tensors import all_sorted_indices, index_multiplicity
from .axioms import build_k_sparse_axioms
from .quantifier import ConsEncoding, build_cons_constraints


@dataclass
class LinformSquaredItem:
    """Planted check: M^2 - (sum_T a_T v_T)^2 with a = empirical t-tensor."""

    t: int
    k: int
    d: int
    bound: float  # M^2


@dataclass
class LinformSplitItem:
    """Planted check: c (v'Σv)^{t/2} - sign * sum_T a_T v_T."""

    t: int
    k: int
    d: int
    sign: int
    bound_const: float


@dataclass
class QuadformBoundItem:
    """Planted check: B - (v'Σv)^2."""

    k: int
    d: int
    bound: float


@dataclass
class MarginOnlyItem:
    """Scalar feasibility margin reported without an explicit certificate."""

    t: int
    k: int
    d: int
    slack: float


@dataclass
class ProgramBundle:
    cs: ConstraintSystem
    extraction: Dict[str, List[Polynomial]]
    meta: dict
    cons: List[ConsEncoding] = field(default_factory=list)
    data_equality_count: int = 0


def _fingerprint(Y: np.ndarray, params: dict) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(Y, dtype=np.float64).tobytes())
    h.update(json.dumps(params, sort_keys=True, default=str).encode())
    return h.hexdigest()[:16]


def centered_row_form(reg: VariableRegistry, m: int, d: int, i: int, a: int) -> Polynomial:
    """(X'_i - mu')_a as a polynomial over the X variable group."""
    terms = []
    for j in range(m):
        base = -1.0 / m
        if j == i:
            base += 1.0
        if base != 0.0:
            terms.append((Monomial.var(reg.var("X", j * d + a)), base))
    return Polynomial(terms)


def central_moment_coeff(
    reg: VariableRegistry, m: int, d: int, S: tuple, cache: dict
) -> Polynomial:
    """E_i[ prod_l (X'_i - mu')_{S_l} ] for a sorted index tuple S."""
    if S in cache:
        return cache[S]
    total = Polynomial()
    for i in range(m):
        prod = Polynomial.constant(1.0 / m)
        for a in S:
            key = ("row", i, a)
            if key not in cache:
                cache[key] = centered_row_form(reg, m, d, i, a)
            prod = prod * cache[key]
        total = total + prod
    cache[S] = total
    return total


def build_sparse_mean_program(
    Y: np.ndarray,
    eps: float,
    k: int,
    M: float,
    t: int,
    degree: Optional[int] = None,
    t_cons: Optional[int] = None,
    radius: Optional[float] = None,
    constants: Constants = DEFAULTS,
) -> ProgramBundle:
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise DomainError("Y must be an (m, d) sample matrix")
    m, d = Y.shape
    if not (0 <= eps < 0.5):
        raise DomainError(f"eps must lie in [0, 1/2), got {eps}")
    if t < 1 or (t & (t - 1)) != 0:
        raise DomainError(f"t must be a power of two, got {t}")
    if not (1 <= k <= d):
        raise DomainError(f"need 1 <= k <= d")
    if M <= 0:
        raise DomainError("M must be positive")
    degree = degree if degree is not None else max(2 * t, 4)
    if degree % 2 or degree < 2 * t:
        raise DomainError(f"relaxation degree must be even and >= 2t, got {degree}")
    t_cons = t_cons if t_cons is not None else 2 * t
    if (m + 1) ** t * m * len(all_sorted_indices(d, t)) > constants.symbolic_terms_cap:
        raise SizeCapError("symbolic moment expansion too large", count=(m + 1) ** t * m)

    reg = VariableRegistry()
    reg.add_group("w", m, degree)
    reg.add_group("X", m * d, degree)
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
    data_equalities = len(cs.equalities)

    # item 3: M^2 - (E_i <v, X'_i - mu'>^t)^2 through quantifier elimination
    cache: dict = {}
    multisets = all_sorted_indices(d, t)
    coeffs_inner = {S: central_moment_coeff(reg, m, d, S, cache) for S in multisets}
    b_coeffs: Dict[Monomial, Polynomial] = {Monomial.one(): Polynomial.constant(M * M)}
    for S1 in multisets:
        for S2 in multisets:
            exps: Dict[int, int] = {}
            for a in S1 + S2:
                exps[a] = exps.get(a, 0) + 1
            key = Monomial(exps)
            contrib = coeffs_inner[S1] * coeffs_inner[S2] * (
                -float(index_multiplicity(S1) * index_multiplicity(S2))
            )
            b_coeffs[key] = b_coeffs.get(key, Polynomial()) + contrib

    axioms = build_k_sparse_axioms(d, k)
    enc = build_cons_constraints(
        cs,
        axioms,
        b_coeffs,
        t_cons,
        prefix="m3",
        parity_ids=set(range(d)),
    )
    enc.item = LinformSquaredItem(t=t, k=k, d=d, bound=M * M)

    if radius is not None:
        cs.ball_bound = (float(radius) * np.sqrt(m), "X")

    mu_prime = []
    for a in range(d):
        form = Polynomial()
        for i in range(m):
            form = form + Polynomial.monomial(Monomial.var(reg.var("X", i * d + a)), 1.0 / m)
        mu_prime.append(form)

    params = dict(m=m, d=d, k=k, t=t, eps=eps, M=M, degree=degree, t_cons=t_cons)
    meta = dict(
        params,
        fingerprint=_fingerprint(Y, params),
        eps_above_paper_cap=bool(eps >= 3.0 / 1000.0),
        radius=radius,
        program="sparse-mean",
    )
    return ProgramBundle(
        cs=cs,
        extraction={"mu_prime": mu_prime},
        meta=meta,
        cons=[enc],
        data_equality_count=data_equalities,
    )
