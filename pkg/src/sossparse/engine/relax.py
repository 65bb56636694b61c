"""Lasserre-style moment relaxation assembly.

The assembled SdpProblem has one dense PSD block for the top moment matrix
over the data-group monomials, one localizing block per inequality, one
bordered Gram block per "gram" variable group (the quantifier-elimination
square-coefficient vectors), and a trailing diagonal block holding +/- splits
of the "free" scalar variables (multiplier coefficients).  Repeated monomials
across entries are tied by explicit two-entry equality rows; equalities are
closed under multiplication by admissible monomials (ideal handling).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..errors import DomainError, SizeCapError
from ..polycore import Monomial, Polynomial
from ..polycore.monomials import mul_pairs
from .constraints import DATA, FREE, GRAM, ConstraintSystem

Entry = Tuple[int, int, int, float]  # (block, i, j, coefficient), i <= j


@dataclass
class Constraint:
    entries: Tuple[Entry, ...]
    rhs: float


@dataclass
class SdpProblem:
    """Block-diagonal SDP feasibility problem with linear equality rows.

    Negative block sizes denote diagonal blocks (SDPA convention).
    ``index`` carries the monomial bookkeeping when assembled from a
    ConstraintSystem; it does not participate in structural equality.
    """

    block_sizes: List[int]
    constraints: List[Constraint]
    objective: Tuple[Entry, ...] = ()
    index: Optional["RelaxationIndex"] = None

    def structurally_equal(self, other: "SdpProblem") -> bool:
        if self.block_sizes != other.block_sizes:
            return False
        if len(self.constraints) != len(other.constraints):
            return False
        for a, b in zip(self.constraints, other.constraints):
            if a.rhs != b.rhs or a.entries != b.entries:
                return False
        return self.objective == other.objective

    def dimension(self) -> int:
        return sum(abs(s) for s in self.block_sizes)


@dataclass
class RelaxationIndex:
    degree: int
    block_labels: List[str]
    entry_keys: List[Dict[Tuple[int, int], object]]
    moment_entries: Dict[Monomial, Tuple[int, int, int]]
    free_vars: Dict[int, Tuple[Tuple[int, int], Tuple[int, int]]]  # vid -> ((blk,i),(blk,j))
    top_basis: List[Monomial] = field(default_factory=list)


@dataclass
class RelaxOptions:
    hard_cap: int = 5000
    ideal_gamma: str = "same-groups"  # or "full"


def _basis_monomials(var_specs, total_budget, group_budgets):
    """All monomials over the given vars within total and per-group budgets."""
    out = [Monomial.one()]
    current: List[Tuple[int, int]] = []

    def rec(pos, total_left, budgets):
        for p in range(pos, len(var_specs)):
            vid, gname = var_specs[p]
            if total_left <= 0 or budgets[gname] <= 0:
                continue
            current.append((vid, 1))
            budgets[gname] -= 1
            out.append(Monomial(tuple(_fold(current))))
            rec(p, total_left - 1, budgets)
            budgets[gname] += 1
            current.pop()

    def _fold(pairs):
        folded = {}
        for v, e in pairs:
            folded[v] = folded.get(v, 0) + e
        return sorted(folded.items())

    rec(0, total_budget, dict(group_budgets))
    # dedupe (rec can revisit same multiset only via distinct paths? it cannot:
    # nondecreasing positions make each multiset unique) and order canonically
    out = sorted(set(out))
    return out


def assemble_relaxation(cs: ConstraintSystem, options: RelaxOptions = None) -> SdpProblem:
    options = options or RelaxOptions()
    cs.validate()
    degree = cs.relaxation_degree
    d_half = degree // 2
    reg = cs.registry

    data_groups = [g for g in reg.groups if g.kind == DATA]
    gram_groups = [g for g in reg.groups if g.kind == GRAM]
    free_groups = [g for g in reg.groups if g.kind == FREE]

    var_specs = [(v, g.name) for g in data_groups for v in g.ids]
    group_budgets = {g.name: -(-min(g.degree_cap, degree) // 2) for g in data_groups}
    top_basis = _basis_monomials(var_specs, d_half, group_budgets)
    if len(top_basis) > options.hard_cap:
        raise SizeCapError(
            f"top moment matrix dimension {len(top_basis)} exceeds cap {options.hard_cap}",
            count=len(top_basis),
            cap=options.hard_cap,
        )

    inequalities = list(cs.inequalities)
    ball = cs.ball_inequality()
    if ball is not None:
        inequalities.append(ball)
    # positive rescaling keeps the constraint set; it spares the localizing
    # entries (and the whole moment vector) from the inequality's raw scale
    inequalities = [
        p * (1.0 / p.max_abs_coeff()) if p.max_abs_coeff() > 0 else p
        for p in inequalities
    ]
    for p in inequalities:
        for v in p.variables():
            if reg.group_of(v).kind != DATA:
                raise DomainError("localizing blocks support data-group variables only")

    block_sizes: List[int] = []
    block_labels: List[str] = []
    entry_keys: List[Dict[Tuple[int, int], object]] = []
    moment_entries: Dict[Monomial, Tuple[int, int, int]] = {}
    ties: List[Constraint] = []

    def new_block(size, label):
        block_sizes.append(size)
        block_labels.append(label)
        entry_keys.append({})
        return len(block_sizes) - 1

    def place_moment(mono: Monomial, blk: int, i: int, j: int):
        entry_keys[blk][(i, j)] = mono
        prev = moment_entries.get(mono)
        if prev is None:
            moment_entries[mono] = (blk, i, j)
        else:
            ties.append(
                Constraint(
                    entries=((prev[0], prev[1], prev[2], 1.0), (blk, i, j, -1.0)),
                    rhs=0.0,
                )
            )

    # top moment block
    top = new_block(len(top_basis), "moment")
    for i, bi in enumerate(top_basis):
        for j in range(i, len(top_basis)):
            place_moment(Monomial(mul_pairs(bi.pairs, top_basis[j].pairs)), top, i, j)

    # localizing blocks
    loc_blocks = []
    loc_bases = []
    for k, p in enumerate(inequalities):
        loc_deg = (degree - p.degree) // 2
        basis = _basis_monomials(var_specs, loc_deg, group_budgets)
        blk = new_block(len(basis), f"localizing[{k}]")
        for i in range(len(basis)):
            for j in range(i, len(basis)):
                entry_keys[blk][(i, j)] = ("loc", k, i, j)
        loc_blocks.append(blk)
        loc_bases.append(basis)

    # bordered Gram blocks for gram groups
    for g in gram_groups:
        blk = new_block(1 + g.size, f"gram[{g.name}]")
        place_moment(Monomial.one(), blk, 0, 0)
        for a in range(g.size):
            place_moment(Monomial.var(g.start + a), blk, 0, 1 + a)
        for a in range(g.size):
            for b in range(a, g.size):
                place_moment(
                    Monomial({g.start + a: 1}) * Monomial({g.start + b: 1}),
                    blk,
                    1 + a,
                    1 + b,
                )

    # diagonal +/- block for free scalars
    free_vars: Dict[int, Tuple[Tuple[int, int], Tuple[int, int]]] = {}
    n_free = sum(g.size for g in free_groups)
    if n_free:
        blk = new_block(-2 * n_free, "free")
        pos = 0
        for g in free_groups:
            for v in g.ids:
                entry_keys[blk][(pos, pos)] = ("free+", v)
                entry_keys[blk][(pos + 1, pos + 1)] = ("free-", v)
                free_vars[v] = ((blk, pos), (blk, pos + 1))
                pos += 2

    kind_of = {}
    for g in reg.groups:
        for v in g.ids:
            kind_of[v] = g.kind

    def expand_terms(poly: Polynomial):
        """Monomial terms -> entry coefficients; None if unrepresentable."""
        acc: Dict[Tuple[int, int, int], float] = {}
        for mono, coef in poly.terms.items():
            hit = moment_entries.get(mono)
            if hit is not None:
                acc[hit] = acc.get(hit, 0.0) + coef
                continue
            free_part = [(v, e) for v, e in mono.pairs if kind_of[v] == FREE]
            if len(free_part) == 1 and free_part[0][1] == 1 and len(mono.pairs) == 1:
                (pb, pi), (nb, ni) = free_vars[free_part[0][0]]
                acc[(pb, pi, pi)] = acc.get((pb, pi, pi), 0.0) + coef
                acc[(nb, ni, ni)] = acc.get((nb, ni, ni), 0.0) - coef
                continue
            return None
        return acc

    constraints: List[Constraint] = []
    constraints.append(Constraint(entries=((top, 0, 0, 1.0),), rhs=1.0))
    constraints.extend(ties)

    # localizing definitions: L[i,j] - sum coeffs(p * gi * gj) = 0
    for k, p in enumerate(inequalities):
        blk = loc_blocks[k]
        basis = loc_bases[k]
        for i, gi in enumerate(basis):
            for j in range(i, len(basis)):
                prod = Polynomial.monomial(gi) * Polynomial.monomial(basis[j]) * p
                acc = expand_terms(prod)
                if acc is None:
                    raise DomainError("localizing entry references unrepresentable moment")
                entries = [(blk, i, j, 1.0)]
                entries += [(b, r, c, -v) for (b, r, c), v in sorted(acc.items()) if v != 0.0]
                constraints.append(Constraint(entries=tuple(entries), rhs=0.0))

    # equality ideals
    cap_full = {g.name: min(g.degree_cap, degree) for g in data_groups}
    for p in cs.equalities:
        budget = degree - p.degree
        if options.ideal_gamma == "full":
            gamma_specs = var_specs + [
                (v, g.name) for g in gram_groups + free_groups for v in g.ids
            ]
            gamma_budgets = {gn: min(c, budget) for gn, c in cap_full.items()}
            gamma_budgets.update({g.name: min(g.degree_cap, 2) for g in gram_groups})
            gamma_budgets.update({g.name: 1 for g in free_groups})
        else:
            pgroups = {reg.group_of(v).name for v in p.variables()}
            gamma_specs = [(v, gn) for v, gn in var_specs if gn in pgroups]
            gamma_budgets = {
                gn: min(c, budget) for gn, c in cap_full.items() if gn in pgroups
            }
        for gamma in _basis_monomials(gamma_specs, budget, gamma_budgets):
            prod = Polynomial.monomial(gamma) * p
            acc = expand_terms(prod)
            if acc is None:
                continue
            entries = tuple(
                (b, r, c, v) for (b, r, c), v in sorted(acc.items()) if v != 0.0
            )
            if entries:
                constraints.append(Constraint(entries=entries, rhs=0.0))

    index = RelaxationIndex(
        degree=degree,
        block_labels=block_labels,
        entry_keys=entry_keys,
        moment_entries=moment_entries,
        free_vars=free_vars,
        top_basis=top_basis,
    )
    return SdpProblem(
        block_sizes=block_sizes,
        constraints=constraints,
        objective=(),
        index=index,
    )
