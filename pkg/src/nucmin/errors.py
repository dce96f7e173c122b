"""Exception hierarchy.

Each error that can surface through the command line carries the exit code
the CLI reports for it.
"""


class NucminError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1
    code = "error"


class NonFiniteInput(NucminError, ValueError):
    exit_code = 5
    code = "non_finite_input"


class DimensionMismatch(NucminError, ValueError):
    exit_code = 4
    code = "dimension_mismatch"


class Infeasible(NucminError):
    """The linear constraint admits no solution at the configured tolerance."""

    exit_code = 2
    code = "infeasible"


class ZeroDictionary(NucminError):
    """A dictionary (or data) matrix is numerically zero."""

    exit_code = 3
    code = "zero_dictionary"


class NotFullRowRank(NucminError):
    code = "not_full_row_rank"


class NotSemiOrthogonal(NucminError, ValueError):
    code = "not_semi_orthogonal"


class NoNullSpace(NucminError):
    """No feasible perturbation exists; uniqueness probes are vacuous.

    This is a signal rather than a failure.
    """

    code = "no_null_space"


class MaxIterationsExceeded(NucminError):
    """Raised only on request; the oracle normally returns an unconverged report."""

    code = "max_iterations_exceeded"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ParseError(NucminError, ValueError):
    exit_code = 5
    code = "parse_error"


class IoError(NucminError, OSError):
    exit_code = 5
    code = "io_error"


class VerificationFailed(NucminError):
    exit_code = 6
    code = "verification_failed"
