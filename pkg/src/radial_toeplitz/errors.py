"""Exception types shared across the package."""


class SymbolSyntaxError(ValueError):
    """Bad symbol text; carries the character position of the failure."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SupportUnknownError(Exception):
    """Structural support analysis inconclusive; sampling cannot certify."""


class AccuracyLossError(ArithmeticError):
    """Series cancellation exceeded the double-precision budget."""


class NonIntegrableError(ValueError):
    """Sampled integrand keeps growing out to the configured radius cap."""


class ToleranceNotMetError(ArithmeticError):
    """Quadrature could not reach the requested tolerance.

    Carries the best estimate (a LogReal) and the achieved log-domain error
    so callers can decide whether the partial result is usable.
    """

    def __init__(self, message, best, achieved_log_error):
        super().__init__(message)
        self.best = best
        self.achieved_log_error = achieved_log_error


class InsufficientKMaxError(ValueError):
    """Spectrum table too short for the requested counting threshold."""

    def __init__(self, lam, k_max, k_needed):
        super().__init__(
            f"tail bound fails at lambda={lam:g}: table ends at k_max={k_max}, "
            f"extend to roughly k={k_needed}"
        )
        self.lam = lam
        self.k_max = k_max
        self.k_needed = k_needed


class HypothesisViolationError(ValueError):
    """Input data violates a stated precondition (e.g. a* <= b fails)."""
