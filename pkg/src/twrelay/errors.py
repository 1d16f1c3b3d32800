"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Array arguments have an invalid or mismatched dimension."""


class DomainError(ValueError):
    """Scalar argument lies outside the function's domain."""


class DegenerateChannelError(ValueError):
    """Channel realization has zero norm where a positive norm is required."""


class ConvergenceError(RuntimeError):
    """Adaptive integration did not reach the requested tolerance.

    Carries the best available estimate and its error bound so callers can
    decide whether the partial result is still usable.
    """

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(f"{message} (best estimate {estimate:.6g}, error bound {error_bound:.3g})")
        self.estimate = estimate
        self.error_bound = error_bound


class InsufficientDataError(ValueError):
    """Too few usable points for the requested fit."""


class TargetOutOfRangeError(ValueError):
    """Requested target level is outside the range covered by the curve."""
