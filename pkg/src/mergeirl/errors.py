"""Exception types shared across the package."""


class MergeIrlError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(MergeIrlError, ValueError):
    """A value object or argument violates its contract."""


class DegenerateTrajectoryError(ValidationError):
    """Trajectory too short or malformed to differentiate."""


class ProjectionError(MergeIrlError, ValueError):
    """A point lies outside the projection corridor of a centerline.

    Carries the index of the first offending point.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class ExtrapolationError(MergeIrlError, ValueError):
    """An arc-length query falls outside the centerline domain."""


class CrossingOrderError(MergeIrlError, ValueError):
    """Follower/leader longitudinal order violated (negative headway)."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class BearingUndefinedError(MergeIrlError, ValueError):
    """Relative bearing undefined because two positions coincide."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class DependencyError(MergeIrlError, ValueError):
    """A required previously-trained parameter set is missing."""


class NumericalError(MergeIrlError, ArithmeticError):
    """Non-finite values or a failed factorization inside a numeric routine.

    `detail` may carry a trace of iterates for post-mortem inspection.
    """

    def __init__(self, message: str, detail=None):
        super().__init__(message)
        self.detail = detail


class DataFormatError(MergeIrlError, ValueError):
    """A data file violates the expected schema.

    Carries the offending row number when known.
    """

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class ConfigMismatchError(MergeIrlError, ValueError):
    """A parameter file was produced under an incompatible configuration."""
