"""Quantifier elimination: encode "an SoS proof in free variables F exists".

Given axioms {a_i(F) = 0} and a target b whose coefficients are polynomials
in outer variables, emit equality constraints matching every F-coefficient of
b against sum_i a_i * p_i + q, where the multiplier coefficients P live in a
sign-free group and q is a sum of squares represented by square-coefficient
vectors Q (Gram groups).  Half elimination degree t means: equalities span
F-monomials up to degree 2t, each p_i has degree <= 2t - deg a_i, each square
polynomial has degree <= t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from ..engine import FREE, GRAM, ConstraintSystem
from ..errors import DomainError
from ..polycore import Monomial, Polynomial
from ..polycore.monomials import mul_pairs


@dataclass
class ConsEncoding:
    """Bookkeeping for one emitted cons_F system."""

    prefix: str
    t: int
    f_axioms: ConstraintSystem
    p_groups: List[Tuple[str, int, List[Monomial]]]  # (group, axiom index, multiplier basis)
    q_groups: List[Tuple[str, List[Monomial]]]
    equality_slice: Tuple[int, int]
    b_coeffs: Dict[Monomial, Polynomial] = field(default_factory=dict)
    item: Optional[object] = None  # planted-check descriptor, set by program builders


def _f_monomials(var_ids, max_deg, parity: Optional[Tuple[set, int]] = None):
    """All monomials over var_ids with degree <= max_deg; optional parity filter
    (ids, residue): keep monomials whose total degree on `ids` = residue mod 2."""
    out = [Monomial.one()]
    cur: Dict[int, int] = {}

    def rec(pos, left):
        for p in range(pos, len(var_ids)):
            if left <= 0:
                break
            v = var_ids[p]
            cur[v] = cur.get(v, 0) + 1
            out.append(Monomial(dict(cur)))
            rec(p, left - 1)
            cur[v] -= 1
            if cur[v] == 0:
                del cur[v]

    rec(0, max_deg)
    monos = sorted(set(out))
    if parity is not None:
        ids, residue = parity
        monos = [m for m in monos if m.group_degree(ids) % 2 == residue]
    return monos


def _poly_parity(p: Polynomial, ids: set) -> Optional[int]:
    """Common parity of the degree on `ids` over all terms, or None if mixed."""
    parities = {m.group_degree(ids) % 2 for m in p.terms}
    return parities.pop() if len(parities) == 1 else None


def build_cons_constraints(
    target_cs: ConstraintSystem,
    f_axioms: ConstraintSystem,
    b_coeffs: Dict[Monomial, Union[Polynomial, float]],
    t: int,
    prefix: str = "cons",
    n_squares: int = 1,
    parity_ids: Optional[set] = None,
) -> ConsEncoding:
    """Append the cons_F equality fragment for b >= 0 to ``target_cs``.

    ``b_coeffs`` maps F-monomials (ids of ``f_axioms``'s registry) to
    coefficients that are polynomials over ``target_cs``'s registry (floats
    are promoted to constants).
    """
    f_ids = list(range(f_axioms.registry.total))
    axioms = f_axioms.equalities
    if t < 1:
        raise DomainError("elimination half-degree t must be >= 1")
    deg_b = max((m.degree for m in b_coeffs), default=0)
    if 2 * t < deg_b:
        raise DomainError(f"elimination degree 2t={2 * t} below deg_F(b)={deg_b}")
    cap = len(f_ids) ** max(t // 2, 1)
    if n_squares > cap:
        raise DomainError(f"requested {n_squares} squares exceeds |F|^(t/2) cap {cap}")

    coeffs: Dict[Monomial, Polynomial] = {}
    for m, c in b_coeffs.items():
        coeffs[m] = c if isinstance(c, Polynomial) else Polynomial.constant(float(c))

    # optional parity restriction on the multiplier bases (v-parity symmetry)
    b_parity = None
    if parity_ids is not None:
        parities = {m.group_degree(parity_ids) % 2 for m in coeffs}
        b_parity = parities.pop() if len(parities) == 1 else None

    # contributions[m] collects (variable id, coefficient) pairs and
    # gram contributions (q_var_a, q_var_b, weight) per F-monomial m
    lin: Dict[Monomial, List[Tuple[int, float]]] = {}
    quad: Dict[Monomial, List[Tuple[int, int, float]]] = {}

    p_groups = []
    for i, ax in enumerate(axioms):
        mult_deg = 2 * t - ax.degree
        if mult_deg < 0:
            raise DomainError(f"axiom {i} degree exceeds elimination degree")
        parity = None
        if b_parity is not None:
            ax_par = _poly_parity(ax, parity_ids)
            if ax_par is not None:
                parity = (parity_ids, (b_parity - ax_par) % 2)
        basis = _f_monomials(f_ids, mult_deg, parity)
        gname = f"{prefix}_P{i}"
        grp = target_cs.registry.add_group(gname, len(basis), 2, kind=FREE)
        for pos, mu in enumerate(basis):
            pvar = grp.start + pos
            prod = Polynomial.monomial(mu) * ax
            for m, c in prod.terms.items():
                lin.setdefault(m, []).append((pvar, c))
        p_groups.append((gname, i, basis))

    sq_basis = _f_monomials(f_ids, t)
    q_groups = []
    for j in range(n_squares):
        gname = f"{prefix}_Q{j}"
        grp = target_cs.registry.add_group(gname, len(sq_basis), 2, kind=GRAM)
        for a in range(len(sq_basis)):
            va = grp.start + a
            for bq in range(a, len(sq_basis)):
                m = Monomial(mul_pairs(sq_basis[a].pairs, sq_basis[bq].pairs))
                w = 1.0 if a == bq else 2.0
                quad.setdefault(m, []).append((va, grp.start + bq, w))
        q_groups.append((gname, sq_basis))

    all_monos = sorted(set(coeffs) | set(lin) | set(quad))
    start = len(target_cs.equalities)
    for m in all_monos:
        eq = coeffs.get(m, Polynomial())
        for pvar, c in lin.get(m, ()):
            eq = eq - Polynomial.variable(pvar) * c
        for va, vb, w in quad.get(m, ()):
            eq = eq - Polynomial.variable(va) * Polynomial.variable(vb) * w
        if not eq.is_zero():
            target_cs.add_equality(eq)

    return ConsEncoding(
        prefix=prefix,
        t=t,
        f_axioms=f_axioms,
        p_groups=p_groups,
        q_groups=q_groups,
        equality_slice=(start, len(target_cs.equalities)),
        b_coeffs=coeffs,
    )
