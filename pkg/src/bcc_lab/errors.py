"""Exception types shared across the package."""


class BccLabError(ValueError):
    """Base class for all bcc_lab errors."""


class DimensionError(BccLabError):
    """Operands have incompatible shapes or lengths."""


class DomainError(BccLabError):
    """An argument is outside the operation's domain."""


class CapacityError(BccLabError):
    """An exact enumeration would exceed the supported size cap."""


class ProtocolError(BccLabError):
    """A transcript or protocol artifact is malformed for the requested use."""


class ParameterError(BccLabError):
    """Experiment parameters violate a stated constraint."""
