"""Exception hierarchy for the evrange pipeline."""


class EvrangeError(Exception):
    """Base class for all evrange-specific errors."""


class ConfigError(EvrangeError):
    """Invalid, missing, or unknown configuration key or value."""


class FormatError(EvrangeError):
    """Malformed event file. Carries a human-readable location."""

    def __init__(self, message: str, *, line: int | None = None, byte: int | None = None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if byte is not None:
            loc.append(f"byte offset {byte}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.line = line
        self.byte = byte


class OrderingError(FormatError):
    """Event timestamps regress somewhere in the stream."""


class GeometryError(EvrangeError):
    """Event coordinates fall outside the declared sensor geometry."""


class EmptyRoiError(EvrangeError):
    """Frame has no nonzero cell, so no region of interest exists."""


class SeparationError(EvrangeError):
    """Frame cannot be split into two distinct vertical groups."""


class LowConfidenceError(EvrangeError):
    """Correlation peak below the configured confidence floor."""


class NumericalIntegrityError(EvrangeError):
    """An internal numerical check failed (e.g. imaginary residue)."""


class ProjectionError(EvrangeError):
    """Point cannot be projected (at or behind the camera plane)."""
