"""Exception types shared across the toolkit.

Validation errors (bad arguments, inconsistent state) map to CLI exit
code 1, numeric errors (failed convergence, singular evaluation points,
violated bounds) to exit code 2.
"""


class TorusLQGError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(TorusLQGError):
    """Arguments outside the documented domain of an operation."""


class NumericError(TorusLQGError):
    """A numerically meaningful failure during evaluation."""


class NonConvergence(NumericError):
    """A truncated series cannot meet its tolerance within the term cap."""


class SingularPoint(NumericError):
    """Evaluation requested exactly at a pole or lattice singularity."""


class SeibergViolationSum(NumericError):
    """Total insertion weight fails sum(alpha_i) > 0."""


class SeibergViolationLocal(NumericError):
    """Some insertion weight fails alpha_i < Q."""


class DuplicateInsertion(ValidationError):
    """Two insertion points coincide on the torus."""


class InvalidGamma(ValidationError):
    """Coupling outside (0, 2]."""


class IndexOutOfCutoff(ValidationError):
    """A Fourier index relabeling landed outside the stored cutoff."""


class InvalidCentralCharge(ValidationError):
    """Matter central charge outside the supported range."""


class NoAdmissibleRoot(NumericError):
    """The weight-matching quadratic has no Seiberg-admissible root."""


class TruncationTooTight(NumericError):
    """Estimated discarded tail mass exceeds the allowed budget."""


class SchemaMismatch(ValidationError):
    """An input file does not have the expected columns or header."""
