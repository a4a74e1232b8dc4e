"""Exception hierarchy shared by the spin modules."""


class SpinError(Exception):
    """Base class for every SpinMate error."""


class SpinValidationError(SpinError, ValueError):
    """Input outside what an operation accepts."""


class EnumerationBoundError(SpinValidationError):
    """Spin too large for an exhaustive or exact computation."""


class ImpossibleOutcomeError(SpinError):
    """Projection requested onto an outcome of (numerically) zero probability."""

    def __init__(self, twice_m: int, probability: float):
        self.twice_m = twice_m
        self.probability = probability
        super().__init__(
            f"outcome twice_m={twice_m} has probability {probability:.3e}; refusing to collapse"
        )


class InvariantViolation(SpinError):
    """An internal consistency check failed."""
