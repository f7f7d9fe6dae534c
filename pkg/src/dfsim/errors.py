"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Scenario configuration failed validation."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class UnphysicalRatesError(ValueError):
    """Requested rate table violates complete positivity."""


class StepSizeError(ValueError):
    """Requested integrator step violates the stability guard."""


class DivergenceError(RuntimeError):
    """Numerical solution left the physical region (NaN or blow-up)."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ConvergenceError(RuntimeError):
    """Iteration failed to reach the requested tolerance in the allowed span."""


class TruncationOverflowError(RuntimeError):
    """Intermediate state reached the top of the truncated space."""


class ExceptionalPointError(ValueError):
    """Closed-form coefficients are degenerate; use the numeric engine."""
