"""Sum-of-squares certificates and their verifier.

A certificate expresses ``target = sum_i mult_i * equality_i
+ sum_j sos_j`` where each sos term is either a Gram form m(x)^T G m(x)
over an explicit monomial basis (G must be PSD up to tolerance) or a
weighted square list sum_k c_k * q_k(x)^2 with c_k >= 0.  Verification is
pure polynomial expansion plus eigenvalue checks; nothing is trusted from
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..polycore import Monomial, Polynomial
from .constraints import ConstraintSystem


@dataclass
class GramTerm:
    basis: List[Monomial]
    gram: np.ndarray

    def expand(self) -> Polynomial:
        out = Polynomial()
        n = len(self.basis)
        for i in range(n):
            pi = Polynomial.monomial(self.basis[i])
            for j in range(i, n):
                g = self.gram[i, j]
                if g == 0.0:
                    continue
                w = g if i == j else 2.0 * g
                out = out + pi * Polynomial.monomial(self.basis[j]) * w
        return out

    def min_eig(self) -> float:
        sym = 0.5 * (self.gram + self.gram.T)
        return float(np.linalg.eigvalsh(sym).min())


@dataclass
class SquareTerm:
    weight: float
    poly: Polynomial

    def expand(self) -> Polynomial:
        return self.poly * self.poly * self.weight


@dataclass
class SosCertificate:
    """Multipliers are indexed by position in the axiom system's equalities."""

    eq_multipliers: Dict[int, Polynomial] = field(default_factory=dict)
    gram_terms: List[GramTerm] = field(default_factory=list)
    square_terms: List[SquareTerm] = field(default_factory=list)

    def sos_part(self) -> Polynomial:
        out = Polynomial()
        for g in self.gram_terms:
            out = out + g.expand()
        for s in self.square_terms:
            out = out + s.expand()
        return out

    def reconstruct(self, axioms: ConstraintSystem) -> Polynomial:
        out = self.sos_part()
        for idx, mult in self.eq_multipliers.items():
            out = out + mult * axioms.equalities[idx]
        return out

    def n_squares(self) -> int:
        return len(self.square_terms) + sum(len(g.basis) for g in self.gram_terms)


@dataclass
class VerifyResult:
    accepted: bool
    reason: Optional[str] = None
    max_coeff_dev: float = 0.0
    min_gram_eig: float = 0.0

    def __bool__(self):
        return self.accepted


def verify_sos_certificate(
    cert: SosCertificate,
    target: Polynomial,
    axioms: ConstraintSystem,
    tol: float = 1e-8,
) -> VerifyResult:
    min_eig = 0.0
    for g in cert.gram_terms:
        min_eig = min(min_eig, g.min_eig())
    for s in cert.square_terms:
        min_eig = min(min_eig, s.weight)
    if min_eig < -tol:
        return VerifyResult(False, "non-psd-gram", min_gram_eig=min_eig)

    resid = cert.reconstruct(axioms) - target
    dev = resid.max_abs_coeff()
    if dev > tol:
        return VerifyResult(False, "coefficient-mismatch", max_coeff_dev=dev, min_gram_eig=min_eig)
    return VerifyResult(True, None, max_coeff_dev=dev, min_gram_eig=min_eig)


def gram_from_squares(squares: Sequence[Tuple[float, Polynomial]]) -> GramTerm:
    """Fold weighted squares into a single Gram term over their joint basis."""
    basis: List[Monomial] = sorted({m for _, q in squares for m in q.terms})
    pos = {m: k for k, m in enumerate(basis)}
    gram = np.zeros((len(basis), len(basis)))
    for w, q in squares:
        vec = np.zeros(len(basis))
        for m, c in q.terms.items():
            vec[pos[m]] = c
        gram += w * np.outer(vec, vec)
    return GramTerm(basis=basis, gram=gram)


def squares_from_gram(term: GramTerm, tol: float = 1e-12) -> List[Tuple[float, Polynomial]]:
    """Eigendecompose a Gram form back into at most |basis| squares."""
    sym = 0.5 * (term.gram + term.gram.T)
    vals, vecs = np.linalg.eigh(sym)
    out = []
    for lam, vec in zip(vals, vecs.T):
        if lam <= tol:
            continue
        poly = Polynomial(
            {m: c for m, c in zip(term.basis, vec) if c != 0.0}
        )
        out.append((float(lam), poly))
    return out
