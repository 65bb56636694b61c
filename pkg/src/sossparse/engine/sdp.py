"""First-order splitting solver for block-diagonal SDP feasibility problems.

The solver works on a reduced variable vector y holding one scalar per
distinct matrix entry class: two-entry tie rows emitted by the assembler are
collapsed by union-find, the remaining rows form a sparse equality system
A y = b.  Each iteration alternates an exact projection onto {A y = b} in the
multiplicity-weighted metric (cached sparse factorization) with a projection
of every block onto the PSD cone (eigendecomposition; sign clip for diagonal
blocks), coupled ADMM-style through scaled duals.  Feasibility mode only: the
objective is a small trace regularization that selects a bounded solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import DomainError
from ..polycore import Monomial, Polynomial
from .relax import SdpProblem


@dataclass
class SolverConfig:
    eq_tol: float = 1e-7
    psd_tol: float = 1e-6
    max_iters: int = 50000
    stall_window: int = 500
    rho: float = 1.0
    over_relax: float = 1.6  # retained for config echo; Anderson-accelerated DR ignores it
    anderson: bool = True
    trace_weight: float = 1e-6
    tikhonov: float = 1e-8
    check_every: int = 20
    adapt_rho: bool = True
    seed: int = 0  # reserved; the solver itself is deterministic


@dataclass
class ResidualReport:
    max_equality_residual: float
    min_moment_eigenvalue: float
    iterations: int
    primal_residual: float = 0.0
    status: str = "feasible"


class PseudoExpectation:
    """Linear functional on monomials up to the relaxation degree."""

    def __init__(self, degree: int, moments: Dict[Monomial, float], report: ResidualReport,
                 block_values: Optional[List[np.ndarray]] = None):
        self.degree = degree
        self.moments = moments
        self.residual_report = report
        self.block_values = block_values or []

    def __call__(self, q) -> float:
        return pseudo_expect(self, q)


def pseudo_expect(pe: PseudoExpectation, q) -> float:
    """Evaluate the pseudoexpectation on a polynomial (or monomial)."""
    if isinstance(q, Monomial):
        q = Polynomial.monomial(q)
    if q.degree > pe.degree:
        raise DomainError(f"polynomial degree {q.degree} exceeds pseudoexpectation degree {pe.degree}")
    total = 0.0
    for mono, coef in q.terms.items():
        if mono not in pe.moments:
            raise DomainError(f"moment for {mono!r} not represented")
        total += coef * pe.moments[mono]
    return total


@dataclass
class SolveResult:
    status: str  # "feasible" | "infeasible" | "inconclusive"
    pseudoexpectation: Optional[PseudoExpectation]
    report: ResidualReport

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _block_entry_index(block_sizes):
    """Global serial number for each upper-triangular entry of each block."""
    offsets = []
    total = 0
    for s in block_sizes:
        n = abs(s)
        offsets.append(total)
        total += n if s < 0 else n * (n + 1) // 2
    return offsets, total


def _entry_serial(block_sizes, offsets, blk, i, j):
    s = block_sizes[blk]
    n = abs(s)
    if s < 0:
        if i != j:
            raise DomainError("off-diagonal entry in diagonal block")
        return offsets[blk] + i
    # row-major upper triangle
    return offsets[blk] + i * n - i * (i - 1) // 2 + (j - i)


def solve_sdp(problem: SdpProblem, cfg: SolverConfig = None) -> SolveResult:
    cfg = cfg or SolverConfig()
    sizes = problem.block_sizes
    offsets, n_entries = _block_entry_index(sizes)

    # --- collapse tie rows, collect real equality rows -----------------
    uf = _UnionFind(n_entries)
    real_rows = []
    for con in problem.constraints:
        e = con.entries
        if (
            con.rhs == 0.0
            and len(e) == 2
            and e[0][3] == -e[1][3]
            and e[0][3] != 0.0
        ):
            a = _entry_serial(sizes, offsets, e[0][0], e[0][1], e[0][2])
            b = _entry_serial(sizes, offsets, e[1][0], e[1][1], e[1][2])
            uf.union(a, b)
            continue
        real_rows.append(con)

    roots = {}
    y_index = np.empty(n_entries, dtype=np.int64)
    for s in range(n_entries):
        r = uf.find(s)
        if r not in roots:
            roots[r] = len(roots)
        y_index[s] = roots[r]
    n_y = len(roots)

    # --- per-block gather arrays and multiplicity weights --------------
    blocks = []
    weights = np.zeros(n_y)
    trace_cost = np.zeros(n_y)
    for blk, s in enumerate(sizes):
        n = abs(s)
        if s < 0:
            idx = np.array(
                [y_index[_entry_serial(sizes, offsets, blk, i, i)] for i in range(n)],
                dtype=np.int64,
            )
            np.add.at(weights, idx, 1.0)
            np.add.at(trace_cost, idx, 1.0)
            blocks.append(("diag", n, idx))
        else:
            ii, jj = np.triu_indices(n)
            serial = np.array(
                [_entry_serial(sizes, offsets, blk, i, j) for i, j in zip(ii, jj)],
                dtype=np.int64,
            )
            idx = y_index[serial]
            w = np.where(ii == jj, 1.0, 2.0)
            np.add.at(weights, idx, w)
            np.add.at(trace_cost, idx[ii == jj], 1.0)
            blocks.append(("dense", n, (ii, jj, idx)))

    cost = cfg.trace_weight * trace_cost
    for blk, i, j, v in problem.objective:
        serial = _entry_serial(sizes, offsets, blk, i, j)
        cost[y_index[serial]] += v * (1.0 if i == j else 2.0)

    # --- sparse equality system: equilibrate rows, drop exact duplicates
    rows, cols, vals, rhs = [], [], [], []
    seen_rows = set()
    for con in real_rows:
        acc: Dict[int, float] = {}
        for blk, i, j, v in con.entries:
            yi = y_index[_entry_serial(sizes, offsets, blk, i, j)]
            acc[yi] = acc.get(yi, 0.0) + v
        acc = {yi: v for yi, v in acc.items() if v != 0.0}
        scale = max((abs(v) for v in acc.values()), default=0.0)
        if scale == 0.0:
            if abs(con.rhs) > 0:
                # 0 = nonzero: trivially infeasible
                return SolveResult(
                    "infeasible",
                    None,
                    ResidualReport(abs(con.rhs), 0.0, 0, status="infeasible"),
                )
            continue
        key = (
            tuple(sorted((yi, round(v / scale, 14)) for yi, v in acc.items())),
            round(con.rhs / scale, 14),
        )
        if key in seen_rows:
            continue
        seen_rows.add(key)
        for yi, v in acc.items():
            rows.append(len(rhs))
            cols.append(yi)
            vals.append(v / scale)
        rhs.append(con.rhs / scale)
    m_rows = len(rhs)
    A = sp.csr_matrix((vals, (rows, cols)), shape=(m_rows, n_y))
    b = np.asarray(rhs)

    w_inv = 1.0 / weights
    if m_rows:
        AWAt = (A @ sp.diags(w_inv) @ A.T).tocsc()
        diag_scale = max(float(AWAt.diagonal().mean()), 1e-12)
        AWAt = AWAt + (cfg.tikhonov * diag_scale) * sp.eye(m_rows, format="csc")
        solver = spla.factorized(AWAt)
        At = A.T.tocsr()
    else:
        solver = None
        At = None

    def project_affine(yhat, refine=2):
        if m_rows == 0:
            return yhat
        y = yhat
        for _ in range(refine):
            resid = A @ y - b
            lam = solver(resid)
            y = y - w_inv * (At @ lam)
        return y

    def gather(y):
        mats = []
        for kind, n, data in blocks:
            if kind == "diag":
                mats.append(y[data])
            else:
                ii, jj, idx = data
                m = np.zeros((n, n))
                m[ii, jj] = y[idx]
                m[jj, ii] = y[idx]
                mats.append(m)
        return mats

    def scatter_avg(mats, shift):
        """Weighted average of block entries back into y-space, minus cost shift."""
        acc = np.zeros(n_y)
        for (kind, n, data), m in zip(blocks, mats):
            if kind == "diag":
                acc += np.bincount(data, weights=m, minlength=n_y)
            else:
                ii, jj, idx = data
                w = np.where(ii == jj, 1.0, 2.0)
                acc += np.bincount(idx, weights=w * m[ii, jj], minlength=n_y)
        return (acc - shift) * w_inv

    def psd_project(m, kind):
        if kind == "diag":
            return np.maximum(m, 0.0)
        vals_, vecs = np.linalg.eigh(m)
        pos = vals_ > 0
        if pos.all():
            return m
        v = vecs[:, pos] * vals_[pos]
        return v @ vecs[:, pos].T

    def min_eig(m, kind):
        if kind == "diag":
            return float(m.min()) if len(m) else 0.0
        return float(np.linalg.eigvalsh(m).min()) if m.size else 0.0

    # Douglas-Rachford form on the pre-projection variable v = S(y) + U:
    #   Z = P_psd(v);  y = affine-projected average of (2Z - v);  v+ = v + S(y) - Z
    # with safeguarded Anderson acceleration on the fixed-point map.
    shapes = [m_.shape for m_ in gather(np.zeros(n_y))]
    sizes_flat = [int(np.prod(s)) for s in shapes]
    splits = np.cumsum(sizes_flat)[:-1]

    def pack(mats):
        return np.concatenate([m_.ravel() for m_ in mats])

    def unpack(vec):
        return [seg.reshape(s) for seg, s in zip(np.split(vec, splits), shapes)]

    rho = cfg.rho

    def sweep(vmats):
        Z = [psd_project(v_m, kind) for v_m, (kind, _, _) in zip(vmats, blocks)]
        yhat = scatter_avg([2.0 * z_m - v_m for z_m, v_m in zip(Z, vmats)], cost / rho)
        y = project_affine(yhat)
        S = gather(y)
        vnext = [v_m + s_m - z_m for v_m, s_m, z_m in zip(vmats, S, Z)]
        return vnext, y, S, Z

    y = project_affine(np.zeros(n_y))
    v = gather(y)
    mem = 8
    hist_v: List[np.ndarray] = []
    hist_f: List[np.ndarray] = []
    best_res = np.inf
    strikes = 0
    hist_primal: List[float] = []
    hist_eq: List[float] = []
    hist_dual_norm: List[float] = []
    status = "inconclusive"
    it = 0
    S = v
    for it in range(1, cfg.max_iters + 1):
        vnext, y, S, Z = sweep(v)
        vflat = pack(v)
        f = pack(vnext) - vflat
        res = float(np.linalg.norm(f))
        if res > 4.0 * best_res and hist_v:
            # runaway acceleration step: restart from the plain sweep
            hist_v.clear()
            hist_f.clear()
            v = vnext
            continue
        best_res = min(best_res, res)
        hist_v.append(vflat)
        hist_f.append(f)
        if len(hist_v) > mem + 1:
            hist_v.pop(0)
            hist_f.pop(0)
        accelerated = False
        if cfg.anderson and len(hist_v) >= 3:
            dV = np.stack([hist_v[i + 1] - hist_v[i] for i in range(len(hist_v) - 1)], axis=1)
            dF = np.stack([hist_f[i + 1] - hist_f[i] for i in range(len(hist_f) - 1)], axis=1)
            try:
                gamma, *_ = np.linalg.lstsq(dF, f, rcond=1e-10)
            except np.linalg.LinAlgError:
                gamma = None
            if gamma is not None and np.isfinite(gamma).all() and np.linalg.norm(gamma) < 1e4:
                vacc = vflat + f - (dV + dF) @ gamma
                v = unpack(vacc)
                accelerated = True
        if not accelerated:
            v = vnext

        if it % cfg.check_every == 0 or it == cfg.max_iters:
            primal = max(
                float(np.abs(s_m - z_m).max()) if np.size(s_m) else 0.0
                for s_m, z_m in zip(S, Z)
            )
            eqres = float(np.abs(A @ y - b).max()) if m_rows else 0.0
            hist_primal.append(primal)
            hist_eq.append(eqres)
            hist_dual_norm.append(
                sum(float(np.linalg.norm(v_m - z_m)) for v_m, z_m in zip(S, Z))
            )
            # the acceptance quantities themselves: equality residual and
            # minimum block eigenvalue of the current moment iterate
            if eqres <= cfg.eq_tol and primal <= 100 * cfg.psd_tol:
                mineig_now = min(
                    min_eig(s_m, kind) for s_m, (kind, _, _) in zip(S, blocks)
                )
                if mineig_now >= -cfg.psd_tol:
                    status = "feasible"
                    break
            window = max(1, cfg.stall_window // cfg.check_every)
            if len(hist_primal) > window:
                prev_p = hist_primal[-window - 1]
                prev_e = hist_eq[-window - 1]
                prev_u = hist_dual_norm[-window - 1]
                eq_stalled = (
                    eqres > max(100 * cfg.eq_tol, 1e-9)
                    and abs(prev_e - eqres) < 0.01 * eqres
                )
                cone_stalled = (
                    primal > max(100 * cfg.psd_tol, 1e-8)
                    and abs(prev_p - primal) < 0.01 * primal
                    and hist_dual_norm[-1] > 1.02 * max(prev_u, 1e-12)
                )
                if eq_stalled or cone_stalled:
                    strikes += 1
                    hist_primal = hist_primal[-1:]
                    hist_eq = hist_eq[-1:]
                    hist_dual_norm = hist_dual_norm[-1:]
                    if strikes >= 2:
                        status = "infeasible"
                        break
    eqres = float(np.abs(A @ y - b).max()) if m_rows else 0.0
    mineig = min(
        (min_eig(s_m, kind) for s_m, (kind, _, _) in zip(S, blocks)),
        default=0.0,
    )
    report = ResidualReport(
        max_equality_residual=eqres,
        min_moment_eigenvalue=mineig,
        iterations=it,
        primal_residual=hist_primal[-1] if hist_primal else 0.0,
        status=status,
    )
    if status != "feasible":
        return SolveResult(status, None, report)

    moments: Dict[Monomial, float] = {}
    degree = 0
    if problem.index is not None:
        idx = problem.index
        degree = idx.degree
        norm = y[y_index[_entry_serial(sizes, offsets, 0, 0, 0)]]
        if abs(norm - 1.0) > 1e-6 or norm <= 0:
            report.status = "inconclusive"
            return SolveResult("inconclusive", None, report)
        for mono, (blk, i, j) in idx.moment_entries.items():
            moments[mono] = y[y_index[_entry_serial(sizes, offsets, blk, i, j)]] / norm
        for vid, ((pb, pi), (nb, ni)) in idx.free_vars.items():
            moments[Monomial.var(vid)] = (
                y[y_index[_entry_serial(sizes, offsets, pb, pi, pi)]]
                - y[y_index[_entry_serial(sizes, offsets, nb, ni, ni)]]
            ) / norm
        moments[Monomial.one()] = 1.0
    pe = PseudoExpectation(degree, moments, report, block_values=S)
    return SolveResult("feasible", pe, report)
