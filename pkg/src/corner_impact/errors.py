"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter lies outside the range where the model is defined."""


class DegenerateVelocityError(DomainError):
    """The multiple-impact map was asked to act on the zero velocity."""


class BoundViolation(AssertionError):
    """A numerically checked theoretical bound did not hold."""
