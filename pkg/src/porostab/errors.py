"""Exception hierarchy shared by the solvers and the command line.

Each class carries the process exit code the CLI maps it to.
"""


class PorostabError(Exception):
    exit_code = 1


class DomainError(PorostabError, ValueError):
    """An input lies outside the mathematical domain of an operation."""

    exit_code = 2


class UsageError(PorostabError, ValueError):
    """Malformed request: bad option, empty list, unknown kind."""

    exit_code = 2


class NumericalError(PorostabError, RuntimeError):
    """A linear-algebra or time-stepping failure."""

    exit_code = 4


class DiagnosticError(NumericalError):
    """The solve ran but nothing physically admissible survived filtering.

    ``spectrum`` holds the raw eigenvalues for inspection.
    """

    def __init__(self, message, spectrum=None):
        super().__init__(message)
        self.spectrum = spectrum


class AssertionFailed(PorostabError):
    exit_code = 3
