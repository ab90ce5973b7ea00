"""Exception types shared across the package."""


class HazevalError(Exception):
    """Base class for all package errors."""


class ConfigurationError(HazevalError):
    """Invalid or incomplete configuration; raised before any work starts."""


class CapabilityError(HazevalError):
    """A provider was asked for a capability it does not declare."""


class TransportError(HazevalError):
    """A provider call failed after exhausting its retry budget."""


class SchemaError(HazevalError):
    """A model reply violated its required output contract after the repair retry."""
