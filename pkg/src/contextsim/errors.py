"""Exception hierarchy shared by all simulator subsystems."""


class ContextSimError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(ContextSimError):
    """A config value is missing, out of range, or inconsistent.

    The message always names the offending field.
    """


class SimulationLogicError(ContextSimError):
    """An internal invariant was violated (e.g. a device transmitting twice
    in one slot). Indicates a bug in a scenario, not bad user input."""


class NumericalError(ContextSimError):
    """A filter or estimator produced non-finite or non-positive-definite
    quantities and cannot continue."""

    def __init__(self, message, seed=None):
        if seed is not None:
            message = f"{message} (run seed {seed})"
        super().__init__(message)
        self.seed = seed


class MetricError(ContextSimError):
    """A metric was requested on a trace that cannot support it."""


class ProtocolError(ContextSimError):
    """Base class for wire-format codec errors."""


class EncodeError(ProtocolError):
    """A field value does not fit its declared wire layout."""


class FramingError(ProtocolError):
    """A byte string has the wrong length for the frame type."""


class DecodeError(ProtocolError):
    """Frame bytes violate the layout (bad index, reserved bits set, ...)."""
