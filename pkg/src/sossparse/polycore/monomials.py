"""Sparse monomials and polynomials over integer-id variables.

Monomials are kept in canonical sparse form (no zero exponents) and are
totally ordered by graded lexicographic order on variable ids, which gives
the engine a stable, deterministic indexing of moment matrices.
"""

from __future__ import annotations

import functools
from typing import Dict, Iterable, Mapping, Tuple, Union

from ..errors import DomainError, MissingVariableError

Pairs = Tuple[Tuple[int, int], ...]


@functools.total_ordering
class Monomial:
    """Product of variables with positive integer exponents.

    ``pairs`` is a tuple of (variable_id, exponent) sorted by variable id;
    the empty tuple is the constant monomial 1.
    """

    __slots__ = ("pairs", "degree", "_hash")

    def __init__(self, exponents: Union[Mapping[int, int], Pairs] = ()):
        if isinstance(exponents, tuple):
            pairs = exponents
        else:
            pairs = tuple(sorted((v, e) for v, e in exponents.items() if e != 0))
        for _, e in pairs:
            if e < 0:
                raise DomainError("negative exponent in monomial")
        self.pairs = pairs
        self.degree = sum(e for _, e in pairs)
        self._hash = hash(pairs)

    @staticmethod
    def one() -> "Monomial":
        return _ONE

    @staticmethod
    def var(v: int, e: int = 1) -> "Monomial":
        if e == 0:
            return _ONE
        return Monomial(((v, e),))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.pairs == other.pairs

    def __lt__(self, other: "Monomial"):
        # graded lex: lower degree first; at equal degree the monomial with
        # the larger exponent on the earliest differing variable is larger.
        if self.degree != other.degree:
            return self.degree < other.degree
        a, b = self.pairs, other.pairs
        i = j = 0
        while i < len(a) and j < len(b):
            va, ea = a[i]
            vb, eb = b[j]
            if va == vb:
                if ea != eb:
                    return ea < eb
                i += 1
                j += 1
            elif va < vb:
                return False
            else:
                return True
        return False  # identical (equal degree forces simultaneous exhaustion)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(mul_pairs(self.pairs, other.pairs))

    def exponent(self, v: int) -> int:
        for var, e in self.pairs:
            if var == v:
                return e
        return 0

    def variables(self) -> Tuple[int, ...]:
        return tuple(v for v, _ in self.pairs)

    def group_degree(self, var_ids) -> int:
        return sum(e for v, e in self.pairs if v in var_ids)

    def evaluate(self, assignment: Mapping[int, float]) -> float:
        out = 1.0
        for v, e in self.pairs:
            if v not in assignment:
                raise MissingVariableError(f"no value for variable {v}")
            out *= assignment[v] ** e
        return out

    def __repr__(self):
        if not self.pairs:
            return "1"
        return "*".join(f"x{v}" + (f"^{e}" if e > 1 else "") for v, e in self.pairs)


_ONE = Monomial(())


def mul_pairs(a: Pairs, b: Pairs) -> Pairs:
    """Merge two sorted exponent-pair tuples."""
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


class Polynomial:
    """Real polynomial stored as {Monomial: coefficient}.

    Exact zeros are dropped; ``prune_eps`` > 0 additionally drops terms with
    |coefficient| below it (default 0: exact zeros only).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Union[Mapping[Monomial, float], Iterable] = (), prune_eps: float = 0.0):
        data: Dict[Monomial, float] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, coeff in items:
            c = data.get(mono, 0.0) + coeff
            if c == 0.0 or abs(c) <= prune_eps:
                data.pop(mono, None)
            else:
                data[mono] = c
        self.terms = data

    # -- constructors -------------------------------------------------
    @staticmethod
    def constant(c: float) -> "Polynomial":
        return Polynomial({Monomial.one(): c}) if c != 0.0 else Polynomial()

    @staticmethod
    def variable(v: int) -> "Polynomial":
        return Polynomial({Monomial.var(v): 1.0})

    @staticmethod
    def monomial(m: Monomial, c: float = 1.0) -> "Polynomial":
        return Polynomial({m: c}) if c != 0.0 else Polynomial()

    # -- queries -------------------------------------------------------
    @property
    def degree(self) -> int:
        return max((m.degree for m in self.terms), default=0)

    def coefficient(self, m: Monomial) -> float:
        return self.terms.get(m, 0.0)

    def variables(self):
        seen = set()
        for m in self.terms:
            seen.update(m.variables())
        return seen

    def is_zero(self) -> bool:
        return not self.terms

    def coeff_norm2(self) -> float:
        return sum(c * c for c in self.terms.values()) ** 0.5

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0.0) + c
            if s == 0.0:
                out.pop(m, None)
            else:
                out[m] = s
        return _wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return _wrap({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            if other == 0:
                return Polynomial()
            return _wrap({m: c * other for m, c in self.terms.items()})
        other = _coerce(other)
        out: Dict[Monomial, float] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = Monomial(mul_pairs(ma.pairs, mb.pairs))
                s = out.get(m, 0.0) + ca * cb
                if s == 0.0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return _wrap(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise DomainError("negative polynomial power")
        out = Polynomial.constant(1.0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def scale(self, c: float):
        return self * c

    def substitute(self, mapping: Mapping[int, "Polynomial"]) -> "Polynomial":
        """Replace variables by polynomials; unmapped variables stay."""
        out = Polynomial()
        for mono, coeff in self.terms.items():
            term = Polynomial.constant(coeff)
            for v, e in mono.pairs:
                factor = mapping.get(v)
                if factor is None:
                    factor = Polynomial.variable(v)
                term = term * factor**e
            out = out + term
        return out

    def evaluate(self, assignment: Mapping[int, float]) -> float:
        return sum(c * m.evaluate(assignment) for m, c in self.terms.items())

    def prune(self, eps: float) -> "Polynomial":
        return _wrap({m: c for m, c in self.terms.items() if abs(c) > eps})

    # -- misc ------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: mc[0])

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):  # pragma: no cover - not used as dict key in hot paths
        return hash(tuple(self.sorted_terms()))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = [f"{c:+g}·{m}" for m, c in self.sorted_terms()]
        return " ".join(parts)


def _coerce(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, (int, float)):
        return Polynomial.constant(float(x))
    raise DomainError(f"cannot coerce {type(x)!r} to Polynomial")


def _wrap(d: Dict[Monomial, float]) -> Polynomial:
    p = Polynomial.__new__(Polynomial)
    p.terms = d
    return p


def poly_arith(a: Polynomial, b, op: str):
    """Dispatch helper mirroring the operation table: add/mul/scale/substitute/evaluate."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        return a * float(b)
    if op == "substitute":
        return a.substitute(b)
    if op == "evaluate":
        return a.evaluate(b)
    raise DomainError(f"unknown polynomial op {op!r}")
