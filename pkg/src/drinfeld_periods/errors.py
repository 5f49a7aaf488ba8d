"""Exception types.  Every error carries a JSON-friendly payload so the CLI can
report what to change (a larger m, a larger s, more depth, ...)."""


class DrinfeldError(Exception):
    """Base class; ``payload`` is a dict merged into structured error reports."""

    def __init__(self, message, **payload):
        super().__init__(message)
        self.payload = {"error": type(self).__name__, "message": message, **payload}


class FieldMismatchError(DrinfeldError):
    pass


class PrecisionError(DrinfeldError):
    """An operation needs information below the known precision."""


class RepresentationError(DrinfeldError):
    """The value exists in C_infinity but not on the configured (m, s) grid."""


class ConvergenceError(DrinfeldError):
    """A series was evaluated outside its certified domain."""


class RootFindingError(DrinfeldError):
    """Newton polygon, residue equation or Hensel step failed."""


class ValidationError(DrinfeldError):
    """Rejected configuration."""
