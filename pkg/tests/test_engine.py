import numpy as np
import pytest

from sossparse.engine import (
    ConstraintSystem,
    RelaxOptions,
    SolverConfig,
    VariableRegistry,
    assemble_relaxation,
    pseudo_expect,
    solve_sdp,
)
from sossparse.errors import DomainError, SizeCapError
from sossparse.polycore import Monomial, Polynomial


def single_var_system(equalities, degree=2):
    reg = VariableRegistry()
    reg.add_group("x", 1, degree)
    x = Polynomial.variable(reg.var("x", 0))
    cs = ConstraintSystem(registry=reg, relaxation_degree=degree)
    for eq in equalities(x):
        cs.add_equality(eq)
    return reg, cs


def test_forced_point_mass():
    # {x^2 = x, x = 1} forces E[x] = E[x^2] = 1
    _, cs = single_var_system(lambda x: [x * x - x, x - 1])
    res = solve_sdp(assemble_relaxation(cs), SolverConfig(max_iters=5000))
    assert res.feasible
    pe = res.pseudoexpectation
    x = Polynomial.variable(0)
    assert pseudo_expect(pe, x) == pytest.approx(1.0, abs=1e-6)
    assert pseudo_expect(pe, x * x) == pytest.approx(1.0, abs=1e-6)
    assert pseudo_expect(pe, Polynomial.constant(1.0)) == 1.0


def test_infeasible_ideal():
    # {x^2 = x, x = 1/2} pins E[x^2] to both 1/4 and 1/2
    _, cs = single_var_system(lambda x: [x * x - x, x - 0.5])
    res = solve_sdp(assemble_relaxation(cs), SolverConfig(max_iters=20000))
    assert res.status == "infeasible"


def test_infeasible_cone():
    # E[x] = 2 with ball |x|^2 <= 1 is PSD-infeasible at degree 2
    reg = VariableRegistry()
    reg.add_group("x", 1, 2)
    x = Polynomial.variable(0)
    cs = ConstraintSystem(registry=reg, relaxation_degree=2, ball_bound=(1.0, "x"))
    cs.add_equality(x - 2.0)
    res = solve_sdp(assemble_relaxation(cs), SolverConfig(max_iters=30000))
    assert res.status == "infeasible"


def test_moment_matrix_psd_on_squares():
    rng = np.random.default_rng(3)
    reg = VariableRegistry()
    reg.add_group("x", 2, 4)
    x0, x1 = Polynomial.variable(0), Polynomial.variable(1)
    cs = ConstraintSystem(registry=reg, relaxation_degree=4, ball_bound=(2.0, "x"))
    cs.add_equality(x0 + x1 - 1.0)
    res = solve_sdp(assemble_relaxation(cs), SolverConfig(max_iters=5000))
    assert res.feasible
    pe = res.pseudoexpectation
    for _ in range(100):
        coeffs = rng.normal(size=6)
        p = (
            coeffs[0]
            + coeffs[1] * x0
            + coeffs[2] * x1
            + coeffs[3] * x0 * x0
            + coeffs[4] * x0 * x1
            + coeffs[5] * x1 * x1
        )
        norm2 = sum(c * c for c in p.terms.values())
        assert pseudo_expect(pe, p * p) >= -1e-6 * norm2 - 1e-9


def test_pseudo_cauchy_schwarz():
    rng = np.random.default_rng(11)
    reg = VariableRegistry()
    reg.add_group("x", 2, 4)
    x0, x1 = Polynomial.variable(0), Polynomial.variable(1)
    cs = ConstraintSystem(registry=reg, relaxation_degree=4, ball_bound=(1.5, "x"))
    cs.add_equality(x0 * x0 + x1 * x1 - 1.0)
    res = solve_sdp(assemble_relaxation(cs), SolverConfig(max_iters=5000))
    assert res.feasible
    pe = res.pseudoexpectation
    for _ in range(50):
        f = rng.normal() + rng.normal() * x0 + rng.normal() * x1
        g = rng.normal() + rng.normal() * x0 + rng.normal() * x1
        lhs = pseudo_expect(pe, f * g) ** 2
        rhs = pseudo_expect(pe, f * f) * pseudo_expect(pe, g * g)
        assert lhs <= rhs + 1e-5


def test_ideal_closure_residuals():
    reg = VariableRegistry()
    reg.add_group("x", 2, 4)
    x0, x1 = Polynomial.variable(0), Polynomial.variable(1)
    cs = ConstraintSystem(registry=reg, relaxation_degree=4, ball_bound=(2.0, "x"))
    eq = x0 * x0 - x0  # x0 boolean
    cs.add_equality(eq)
    cs.add_equality(x0 + x1 - 1.0)
    res = solve_sdp(assemble_relaxation(cs), SolverConfig(max_iters=5000))
    assert res.feasible
    pe = res.pseudoexpectation
    for gamma in [Polynomial.constant(1.0), x0, x1, x0 * x1, x1 * x1]:
        assert abs(pseudo_expect(pe, eq * gamma)) <= 1e-6


def test_degree_overflow_rejected():
    _, cs = single_var_system(lambda x: [x - 1])
    res = solve_sdp(assemble_relaxation(cs), SolverConfig(max_iters=3000))
    x = Polynomial.variable(0)
    with pytest.raises(DomainError):
        pseudo_expect(res.pseudoexpectation, x * x * x)


def test_k_sparse_axioms_matrix_size():
    # d=2, k=1 at degree 2: moment matrix over {1, v1, v2, z1, z2}
    from sossparse.programs import build_k_sparse_axioms

    cs = build_k_sparse_axioms(2, 1)
    cs.relaxation_degree = 2
    prob = assemble_relaxation(cs)
    assert prob.block_sizes[0] == 5


def test_assemble_deterministic():
    def build():
        reg = VariableRegistry()
        reg.add_group("x", 3, 4)
        x = [Polynomial.variable(i) for i in range(3)]
        cs = ConstraintSystem(registry=reg, relaxation_degree=4, ball_bound=(3.0, "x"))
        cs.add_equality(x[0] * x[1] - 0.25)
        cs.add_inequality(1.0 - x[2] * x[2])
        return assemble_relaxation(cs)

    assert build().structurally_equal(build())


def test_size_cap():
    reg = VariableRegistry()
    reg.add_group("x", 40, 4)
    cs = ConstraintSystem(registry=reg, relaxation_degree=4)
    cs.add_equality(Polynomial.variable(0) - 1.0)
    with pytest.raises(SizeCapError) as exc:
        assemble_relaxation(cs, RelaxOptions(hard_cap=100))
    assert exc.value.count > 100
