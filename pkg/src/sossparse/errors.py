"""Exception hierarchy shared across the package.

CLI exit codes are attached where a stable mapping exists:
2 config/domain, 3 solver inconclusive, 4 infeasible, 5 size cap,
6 construction failed, 7 missing ground truth.
"""


class SosSparseError(Exception):
    exit_code = 1


class DomainError(SosSparseError):
    """Invalid argument or parameter outside its documented range."""

    exit_code = 2


class ConfigError(SosSparseError):
    exit_code = 2


class MissingVariableError(DomainError):
    """Polynomial evaluation with an incomplete assignment."""


class SizeCapError(SosSparseError):
    """Assembled problem would exceed the configured moment-matrix cap."""

    exit_code = 5

    def __init__(self, message, count=None, cap=None):
        super().__init__(message)
        self.count = count
        self.cap = cap


class ConstructionFailedError(SosSparseError):
    """A generator's post-hoc validity check failed; carries the bound."""

    exit_code = 6

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = violations or {}


class MissingTruthError(SosSparseError):
    exit_code = 7


class DegenerateInputError(DomainError):
    """All data removed / empty input where a nonempty one is required."""
