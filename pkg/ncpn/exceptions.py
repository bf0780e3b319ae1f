"""
Exception hierarchy for the ncpn engine.

Incomposable products are never errors: they are the zero element.
"""


class NcpnError(Exception):
    """Base class for every error raised by the engine."""


class QuiverError(NcpnError):
    """Malformed quiver, unknown arrow or mixed-quiver operands."""


class ExpressionError(NcpnError):
    """Syntax error or unknown name in the input language."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ReconstructionError(NcpnError):
    """A map DR^1 -> Der could not be turned back into a bivector."""


class RegistryError(NcpnError):
    """Unknown built-in name."""


class CheckUsageError(NcpnError):
    """Unknown check or wrong number of arguments."""


class RepresentationError(NcpnError):
    """Shape or dimension-vector mismatch at a representation point."""
