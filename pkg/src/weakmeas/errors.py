"""Exception hierarchy shared by every module."""


class WeakMeasurementError(Exception):
    """Base class for all errors raised by :mod:`weakmeas`."""


class DomainError(WeakMeasurementError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ConfigurationError(WeakMeasurementError, ValueError):
    """A grid or run configuration cannot represent the requested state."""


class DegenerateSetupError(WeakMeasurementError):
    """Post-selection has zero probability (or zero signal) for this setup."""


class SeriesConvergenceError(WeakMeasurementError, ArithmeticError):
    """A truncated series did not reach its tail tolerance."""
