"""Exception types shared across the package."""


class PricingError(Exception):
    """Base class for all domain errors raised by this package."""


class NonPositiveInput(PricingError):
    """A quantity that must be strictly positive is zero or negative."""


class NotPositiveDefinite(PricingError):
    """A correlation or covariance matrix is not symmetric positive definite."""


class NonpositiveStrike(PricingError):
    """An analytic derivative was requested where the conditional strike is <= 0."""


class OrderCapExceeded(PricingError):
    """An expansion or moment order beyond the supported cap was requested."""
