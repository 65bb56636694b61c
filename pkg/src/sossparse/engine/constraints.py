"""Variable registries and polynomial constraint systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..errors import DomainError
from ..polycore import Polynomial

DATA = "data"   # enters the top moment matrix
GRAM = "gram"   # gets its own bordered Gram moment block
FREE = "free"   # sign-free scalars, represented as +/- diagonal pairs


@dataclass(frozen=True)
class VariableGroup:
    name: str
    start: int
    size: int
    degree_cap: int
    kind: str = DATA

    @property
    def ids(self) -> range:
        return range(self.start, self.start + self.size)


class VariableRegistry:
    """Allocates contiguous global ids per named variable group."""

    def __init__(self):
        self.groups: List[VariableGroup] = []
        self._by_name: Dict[str, VariableGroup] = {}
        self._next = 0

    def add_group(self, name: str, size: int, degree_cap: int, kind: str = DATA) -> VariableGroup:
        if name in self._by_name:
            raise DomainError(f"variable group {name!r} already registered")
        if size <= 0 or degree_cap <= 0:
            raise DomainError("group size and degree cap must be positive")
        if kind not in (DATA, GRAM, FREE):
            raise DomainError(f"unknown group kind {kind!r}")
        g = VariableGroup(name, self._next, size, degree_cap, kind)
        self._next += size
        self.groups.append(g)
        self._by_name[name] = g
        return g

    def group(self, name: str) -> VariableGroup:
        try:
            return self._by_name[name]
        except KeyError:
            raise DomainError(f"unknown variable group {name!r}") from None

    def var(self, name: str, index: int = 0) -> int:
        g = self.group(name)
        if not (0 <= index < g.size):
            raise DomainError(f"index {index} out of range for group {name!r}")
        return g.start + index

    def group_of(self, var_id: int) -> VariableGroup:
        for g in self.groups:
            if g.start <= var_id < g.start + g.size:
                return g
        raise DomainError(f"variable id {var_id} is not registered")

    @property
    def total(self) -> int:
        return self._next

    def describe(self, var_id: int) -> str:
        g = self.group_of(var_id)
        return f"{g.name}[{var_id - g.start}]"


@dataclass
class ConstraintSystem:
    """Equalities p = 0 and inequalities p >= 0 over registered variables."""

    registry: VariableRegistry
    equalities: List[Polynomial] = field(default_factory=list)
    inequalities: List[Polynomial] = field(default_factory=list)
    relaxation_degree: int = 2
    ball_bound: Optional[Tuple[float, str]] = None  # (radius, data group name)

    def add_equality(self, p: Polynomial):
        self.equalities.append(p)

    def add_inequality(self, p: Polynomial):
        self.inequalities.append(p)

    def max_constraint_degree(self) -> int:
        degs = [p.degree for p in self.equalities + self.inequalities]
        return max(degs, default=0)

    def validate(self):
        if self.relaxation_degree % 2 != 0 or self.relaxation_degree <= 0:
            raise DomainError("relaxation degree must be a positive even integer")
        if self.relaxation_degree < self.max_constraint_degree():
            raise DomainError(
                f"relaxation degree {self.relaxation_degree} below max constraint "
                f"degree {self.max_constraint_degree()}"
            )
        n = self.registry.total
        for p in self.equalities + self.inequalities:
            for v in p.variables():
                if not (0 <= v < n):
                    raise DomainError(f"polynomial uses unregistered variable {v}")
        if self.ball_bound is not None:
            radius, group = self.ball_bound
            if radius <= 0:
                raise DomainError("ball bound radius must be positive")
            self.registry.group(group)

    def ball_inequality(self) -> Optional[Polynomial]:
        if self.ball_bound is None:
            return None
        radius, group = self.ball_bound
        g = self.registry.group(group)
        p = Polynomial.constant(radius * radius)
        for v in g.ids:
            xv = Polynomial.variable(v)
            p = p - xv * xv
        return p
