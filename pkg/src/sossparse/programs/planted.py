"""Feasibility of the planted (uniform-over-inliers) assignment.

Every explicit equality/inequality of the bundle is evaluated at the
assignment; for the quantifier-elimination items the inner multiplier/Gram
system is solved by instantiating the explicit certificate chains at the
concrete coefficients, which both exhibits the certificate and gives a
machine-checkable identity residual.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..engine import verify_sos_certificate
from ..errors import DomainError
from ..polycore import Polynomial
from .certs import (
    linform_vs_quadform_certificate,
    quadform_square_bound_certificate,
    sparse_poly_bound_certificate,
)
from .gaussian import _sym_index
from .sparse_mean import (
    LinformSplitItem,
    LinformSquaredItem,
    MarginOnlyItem,
    ProgramBundle,
    QuadformBoundItem,
)


@dataclass
class ConsReport:
    name: str
    margin: float
    certificate_residual: Optional[float]
    accepted: bool
    detail: str = ""


@dataclass
class PlantedReport:
    max_equality_residual: float
    min_inequality_margin: float
    cons_reports: List[ConsReport] = field(default_factory=list)
    feasible: bool = False

    def summary(self) -> dict:
        return {
            "max_equality_residual": self.max_equality_residual,
            "min_inequality_margin": self.min_inequality_margin,
            "cons": [
                {
                    "name": c.name,
                    "margin": c.margin,
                    "certificate_residual": c.certificate_residual,
                    "accepted": c.accepted,
                    "detail": c.detail,
                }
                for c in self.cons_reports
            ],
            "feasible": self.feasible,
        }


def _central_tensor(X: np.ndarray, order: int):
    """Lookup for ordered tuples of the empirical central moment tensor."""
    Z = X - X.mean(axis=0)

    def lookup(T):
        prod = np.ones(len(Z))
        for a in T:
            prod = prod * Z[:, a]
        return float(prod.mean())

    return lookup


def check_planted_feasibility(
    pb: ProgramBundle,
    inliers,
    w: np.ndarray,
    tol: float = 1e-8,
) -> PlantedReport:
    samples = getattr(inliers, "samples", inliers)
    X = np.asarray(samples, dtype=float)
    m, d = pb.meta["m"], pb.meta["d"]
    if X.shape != (m, d):
        raise DomainError(f"inlier matrix must be {(m, d)}, got {X.shape}")
    w = np.asarray(w, dtype=float)
    if w.shape != (m,):
        raise DomainError("weight vector length mismatch")
    if set(np.unique(w)) - {0.0, 1.0}:
        raise DomainError("weights must be binary")
    eps = pb.meta["eps"]
    expected = int(np.floor((1.0 - eps) * m + 1e-9))
    if int(w.sum()) != expected:
        raise DomainError(
            f"weight vector has {int(w.sum())} ones, expected {expected}"
        )

    reg = pb.cs.registry
    assignment: Dict[int, float] = {}
    for i in range(m):
        assignment[reg.var("w", i)] = float(w[i])
        for a in range(d):
            assignment[reg.var("X", i * d + a)] = float(X[i, a])
    mu_bar = X.mean(axis=0)
    Z = X - mu_bar
    sigma_bar = Z.T @ Z / m
    try:
        s_group = reg.group("S")
    except DomainError:
        s_group = None
    if s_group is not None:
        for a in range(d):
            for b in range(a, d):
                assignment[reg.var("S", _sym_index(d, a, b))] = float(sigma_bar[a, b])

    max_resid = 0.0
    for eq in pb.cs.equalities[: pb.data_equality_count]:
        max_resid = max(max_resid, abs(eq.evaluate(assignment)))

    min_margin = np.inf
    ineqs = list(pb.cs.inequalities)
    ball = pb.cs.ball_inequality()
    if ball is not None:
        ineqs.append(ball)
    for p in ineqs:
        min_margin = min(min_margin, p.evaluate(assignment))
    if not ineqs:
        min_margin = 0.0

    cons_reports = []
    for enc in pb.cons:
        item = enc.item
        name = enc.prefix
        if isinstance(item, LinformSquaredItem):
            lookup = _central_tensor(X, item.t)
            a = {T: lookup(T) for T in itertools.product(range(d), repeat=item.t)}
            max_a2 = max((v * v for v in a.values()), default=0.0)
            margin = item.bound - item.k**item.t * max_a2
            if margin < -tol:
                cons_reports.append(
                    ConsReport(name, margin, None, False, "bound below k^t max a_T^2")
                )
                continue
            res = sparse_poly_bound_certificate(
                lambda T: a[T], d, item.k, item.t, bound=item.bound
            )
            vr = verify_sos_certificate(res.certificate, res.target, res.axioms, tol=max(tol, 1e-9))
            cons_reports.append(
                ConsReport(name, margin, vr.max_coeff_dev, bool(vr.accepted), vr.reason or "")
            )
        elif isinstance(item, LinformSplitItem):
            lookup = _central_tensor(X, 4)
            a = {}
            for T in itertools.product(range(d), repeat=4):
                iss = (
                    sigma_bar[T[0], T[1]] * sigma_bar[T[2], T[3]]
                    + sigma_bar[T[0], T[2]] * sigma_bar[T[1], T[3]]
                    + sigma_bar[T[0], T[3]] * sigma_bar[T[1], T[2]]
                )
                a[T] = lookup(T) - iss
            lam_min = float(np.linalg.eigvalsh(sigma_bar).min())
            max_abs = max((abs(v) for v in a.values()), default=0.0)
            margin = item.bound_const * lam_min ** (item.t // 2) - item.k ** (item.t // 2) * max_abs
            if margin < -tol or lam_min < 0:
                cons_reports.append(
                    ConsReport(name, margin, None, False, "slack below k^{t/2} max |a_T|")
                )
                continue
            res = linform_vs_quadform_certificate(
                lambda T: a[T], sigma_bar, item.bound_const, d, item.k, item.t, item.sign
            )
            vr = verify_sos_certificate(res.certificate, res.target, res.axioms, tol=max(tol, 1e-9))
            cons_reports.append(
                ConsReport(name, margin, vr.max_coeff_dev, bool(vr.accepted), vr.reason or "")
            )
        elif isinstance(item, QuadformBoundItem):
            lam_max = float(np.linalg.eigvalsh(sigma_bar).max())
            margin = np.sqrt(item.bound) - lam_max
            if margin < -tol:
                cons_reports.append(
                    ConsReport(name, margin, None, False, "operator norm above sqrt(B)")
                )
                continue
            res = quadform_square_bound_certificate(sigma_bar, item.bound, d, item.k)
            vr = verify_sos_certificate(res.certificate, res.target, res.axioms, tol=max(tol, 1e-9))
            cons_reports.append(
                ConsReport(name, margin, vr.max_coeff_dev, bool(vr.accepted), vr.reason or "")
            )
        elif isinstance(item, MarginOnlyItem):
            lookup = _central_tensor(X, 4)
            max_abs = 0.0
            for T in itertools.product(range(d), repeat=4):
                iss = (
                    sigma_bar[T[0], T[1]] * sigma_bar[T[2], T[3]]
                    + sigma_bar[T[0], T[2]] * sigma_bar[T[1], T[3]]
                    + sigma_bar[T[0], T[3]] * sigma_bar[T[1], T[2]]
                )
                max_abs = max(max_abs, abs(lookup(T) - iss))
            lam_min = float(np.linalg.eigvalsh(sigma_bar).min())
            margin = item.slack * lam_min**4 - item.k**4 * max_abs**2
            cons_reports.append(
                ConsReport(
                    name,
                    margin,
                    None,
                    bool(margin >= -tol),
                    "scalar margin only; explicit certificate needs elimination degree 16",
                )
            )
        else:
            cons_reports.append(ConsReport(name, 0.0, None, False, "unknown cons item"))

    feasible = (
        max_resid <= tol
        and min_margin >= -tol
        and all(c.accepted for c in cons_reports)
    )
    return PlantedReport(
        max_equality_residual=max_resid,
        min_inequality_margin=float(min_margin),
        cons_reports=cons_reports,
        feasible=feasible,
    )
