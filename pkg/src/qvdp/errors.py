"""Exception types shared across the toolkit.

Every error carries a stable machine-readable ``code`` so that failures can
be reported uniformly over the wire (HTTP error bodies) and in sweep CSV
error columns.
"""


class QvdpError(Exception):
    """Base class for all toolkit errors."""

    code = "error"

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class InvalidDimensionError(QvdpError, ValueError):
    """Fock-space dimension too small for the requested construction."""

    code = "invalid-dimension"


class InvalidParamsError(QvdpError, ValueError):
    """Physical parameters violate their constraints (e.g. gamma1 <= 0)."""

    code = "invalid-params"


class TruncationError(QvdpError):
    """Adaptive Fock truncation could not satisfy the tail tolerance below the cap."""

    code = "truncation-failure"


class SolverError(QvdpError):
    """Linear solve failed or produced an unacceptable residual."""

    code = "solver-failure"


class MultiplicityError(SolverError):
    """The Liouvillian kernel is (numerically) more than one dimensional."""

    code = "multiplicity"


class StepSizeError(QvdpError):
    """A step-size precondition or a step-halving convergence check failed."""

    code = "step-size"


class InstabilityError(QvdpError):
    """Time integration produced NaN or overflow."""

    code = "instability"


class AnsatzError(QvdpError):
    """The reduced three-level linear system is singular."""

    code = "ansatz-failure"


class SweepError(QvdpError):
    """Every grid point of a sweep failed."""

    code = "sweep-failure"


class ConfigError(QvdpError, ValueError):
    """Malformed configuration input (CLI or sweep specification)."""

    code = "config-error"
