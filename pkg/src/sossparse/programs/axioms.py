"""k-sparsity axioms over direction variables v and support indicators z."""

from __future__ import annotations

from ..engine import ConstraintSystem, VariableRegistry
from ..errors import DomainError
from ..polycore import Polynomial


def build_k_sparse_axioms(d: int, k: int, degree: int = None) -> ConstraintSystem:
    """Equalities {z_i^2 = z_i}, {v_i z_i = v_i}, sum z = k, sum v^2 = 1.

    A vector v is k-sparse with unit norm iff some z completes it to a
    solution; z_i indicates membership of coordinate i in the support.
    """
    if not (1 <= k <= d):
        raise DomainError(f"need 1 <= k <= d, got k={k}, d={d}")
    reg = VariableRegistry()
    reg.add_group("v", d, degree or 2)
    reg.add_group("z", d, degree or 2)
    v = [Polynomial.variable(reg.var("v", i)) for i in range(d)]
    z = [Polynomial.variable(reg.var("z", i)) for i in range(d)]
    cs = ConstraintSystem(registry=reg, relaxation_degree=degree or 2)
    for i in range(d):
        cs.add_equality(z[i] * z[i] - z[i])
    for i in range(d):
        cs.add_equality(v[i] * z[i] - v[i])
    sum_z = Polynomial()
    sum_v2 = Polynomial()
    for i in range(d):
        sum_z = sum_z + z[i]
        sum_v2 = sum_v2 + v[i] * v[i]
    cs.add_equality(sum_z - float(k))
    cs.add_equality(sum_v2 - 1.0)
    return cs
