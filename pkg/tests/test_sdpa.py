import pytest

from sossparse.engine import (
    Constraint,
    ConstraintSystem,
    SdpProblem,
    SdpaParseError,
    VariableRegistry,
    assemble_relaxation,
    export_sdpa,
    parse_sdpa,
)
from sossparse.polycore import Polynomial


def toy_problem():
    # max <I, X> s.t. X11 = 1 over a single 2x2 block
    return SdpProblem(
        block_sizes=[2],
        constraints=[Constraint(entries=((0, 0, 0, 1.0),), rhs=1.0)],
        objective=((0, 0, 0, 1.0), (0, 1, 1, 1.0)),
    )


def test_toy_layout():
    text = export_sdpa(toy_problem())
    lines = text.strip().splitlines()
    assert lines[0] == "1"
    assert lines[1] == "1"
    assert lines[2] == "2"
    assert lines[3] == "1.0"
    assert lines[4:] == ["0 1 1 1 1.0", "0 1 2 2 1.0", "1 1 1 1 1.0"]


def test_round_trip_toy():
    p = toy_problem()
    q = parse_sdpa(export_sdpa(p))
    assert p.structurally_equal(q)


def test_round_trip_assembled():
    reg = VariableRegistry()
    reg.add_group("x", 2, 4)
    x0, x1 = Polynomial.variable(0), Polynomial.variable(1)
    cs = ConstraintSystem(registry=reg, relaxation_degree=4, ball_bound=(2.0, "x"))
    cs.add_equality(x0 * x0 - x0)
    cs.add_equality(x0 * x1 - 0.125)
    cs.add_inequality(1.0 - x1)
    prob = assemble_relaxation(cs)
    again = parse_sdpa(export_sdpa(prob))
    assert prob.structurally_equal(again)
    # and a second serialization is byte-identical
    assert export_sdpa(prob) == export_sdpa(again)


def test_upper_triangular_only():
    text = export_sdpa(toy_problem())
    for line in text.strip().splitlines()[4:]:
        _, _, i, j, _ = line.split()
        assert int(i) <= int(j)


def test_comments_ignored():
    text = export_sdpa(toy_problem())
    with_comments = '"generated file\n* a comment\n' + text
    assert parse_sdpa(with_comments).structurally_equal(toy_problem())


def test_parse_error_has_line_number():
    bad = "1\n1\n2\n1.0\n1 1 2 1 5.0\n"  # i > j
    with pytest.raises(SdpaParseError) as exc:
        parse_sdpa(bad)
    assert exc.value.line_no == 5

    with pytest.raises(SdpaParseError):
        parse_sdpa("1\n2\n2\n1.0\n")  # block count mismatch
