"""Exception types shared across the package."""


class SdaError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(SdaError, ValueError):
    pass


class GridMismatchError(SdaError, ValueError):
    """Two distributions live on grids with different steps."""


class ContractViolation(SdaError, ValueError):
    """An operator was applied in a state where it is not applicable."""


class ProblemError(SdaError, ValueError):
    """A problem instance (or problem file) failed validation.

    ``field`` names the offending entry so CLI diagnostics can point at it.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ScheduleInvalidError(SdaError, ValueError):
    pass


class GenerationError(SdaError, RuntimeError):
    pass


class SearchInvariantError(SdaError, RuntimeError):
    """Raised when the search detects a broken ordering/frontier invariant."""


class SearchLimitError(SdaError, RuntimeError):
    """Expansion or wall-time cap hit before a goal was popped.

    ``incumbent`` is the cheapest goal schedule generated so far (or None).
    """

    def __init__(self, message, incumbent=None, stats=None):
        super().__init__(message)
        self.incumbent = incumbent
        self.stats = stats
