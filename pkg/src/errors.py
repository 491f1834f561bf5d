"""
Exception types shared by the numerics, design and CLI layers.
"""

from typing import Optional


class BFDesignError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(BFDesignError, ValueError):
    """An argument lies outside the domain of a function."""


class IntegrationError(BFDesignError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, estimate: float, abserr: float):
        super().__init__(f"{message} (best estimate {estimate!r}, abserr {abserr:.3g})")
        self.estimate = estimate
        self.abserr = abserr


class BracketError(BFDesignError, ValueError):
    """The function has no sign change on the supplied bracket."""

    def __init__(self, lo: float, hi: float, f_lo: float, f_hi: float):
        super().__init__(
            f"No sign change on [{lo!r}, {hi!r}]: f(lo) = {f_lo!r}, f(hi) = {f_hi!r}"
        )
        self.lo = lo
        self.hi = hi
        self.f_lo = f_lo
        self.f_hi = f_hi


class InfeasibleTargetError(BFDesignError):
    """The target power cannot be reached with any finite sample size."""

    def __init__(self, reason: str, limiting_power: Optional[float] = None):
        if limiting_power is not None:
            reason = f"{reason} (limiting power {limiting_power:.6g})"
        super().__init__(reason)
        self.limiting_power = limiting_power


class MonotonicityError(BFDesignError):
    """A power function expected to increase in n did not."""


class SuccessRegionError(BFDesignError):
    """The Bayes factor crossed the threshold more often than the region shape allows."""


class UsageError(BFDesignError, ValueError):
    """Command-line arguments or a config file are missing or malformed."""
