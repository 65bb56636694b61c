"""Moment relaxation engine: constraint systems, SDP solver, certificates, SDPA IO."""

from .certify import (
    GramTerm,
    SosCertificate,
    SquareTerm,
    VerifyResult,
    gram_from_squares,
    squares_from_gram,
    verify_sos_certificate,
)
from .constraints import DATA, FREE, GRAM, ConstraintSystem, VariableGroup, VariableRegistry
from .relax import Constraint, RelaxationIndex, RelaxOptions, SdpProblem, assemble_relaxation
from .sdp import (
    PseudoExpectation,
    ResidualReport,
    SolveResult,
    SolverConfig,
    pseudo_expect,
    solve_sdp,
)
from .sdpa import SdpaParseError, export_sdpa, parse_sdpa

__all__ = [
    "ConstraintSystem",
    "VariableGroup",
    "VariableRegistry",
    "DATA",
    "GRAM",
    "FREE",
    "Constraint",
    "RelaxOptions",
    "RelaxationIndex",
    "SdpProblem",
    "assemble_relaxation",
    "SolverConfig",
    "SolveResult",
    "ResidualReport",
    "PseudoExpectation",
    "pseudo_expect",
    "solve_sdp",
    "export_sdpa",
    "parse_sdpa",
    "SdpaParseError",
    "SosCertificate",
    "GramTerm",
    "SquareTerm",
    "VerifyResult",
    "verify_sos_certificate",
    "gram_from_squares",
    "squares_from_gram",
]
