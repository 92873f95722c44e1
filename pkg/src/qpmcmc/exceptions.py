"""Exception types raised by the simulator."""


class InvalidArgumentError(ValueError):
    """An argument is outside the domain an operation is defined on."""


class ConfigurationError(ValueError):
    """A configuration cannot be run as given (e.g. a search that would never halt)."""


class InvalidStateError(RuntimeError):
    """Internal numerical state became unusable, e.g. every selection weight underflowed."""
