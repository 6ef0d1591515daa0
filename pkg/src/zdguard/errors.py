"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Dimensions, constants, or file contents violate a documented contract."""


class InfeasibleError(RuntimeError):
    """A solve step has no solution under its preconditions (e.g. non-Hurwitz A)."""


class NotAZeroError(ValueError):
    """The requested frequency is not an invariant zero of the system."""


class DesignError(RuntimeError):
    """Gain synthesis failed within its search budget."""
