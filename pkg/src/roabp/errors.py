"""Exception types shared across the package."""


class RoabpError(Exception):
    """Base class for errors raised by this package."""


class FieldMismatchError(RoabpError, ValueError):
    """Operands live in different field contexts."""


class ShapeError(RoabpError, ValueError):
    """Dimension or length mismatch."""


class PartitionError(RoabpError, ValueError):
    """Variable blocks do not form a usable partition."""


class CapacityError(RoabpError, RuntimeError):
    """A symbolic expansion would exceed the configured term cap."""


class CharacteristicError(RoabpError, ValueError):
    """The field modulus is below the bound a construction requires."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class ParseError(RoabpError, ValueError):
    """An instance file could not be parsed; carries the offending line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line
