"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class CapacityError(ValueError):
    """Instance exceeds a dense-computation budget."""


class UnsupportedError(NotImplementedError):
    """Operation is not available for the given structure."""
