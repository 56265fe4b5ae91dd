class TorusPosetError(Exception):
    """Base class for library errors."""


class DimensionError(TorusPosetError, ValueError):
    pass


class ValidationError(TorusPosetError, ValueError):
    """Input failed a structural check; ``witness`` locates the failure."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
