"""Exception types shared across the toolkit."""


class GraphDenoiseError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(GraphDenoiseError, ValueError):
    """Operands have incompatible shapes or sizes."""


class FileFormatError(GraphDenoiseError, ValueError):
    """Malformed or unsupported image / CSV payload."""


class NumericError(GraphDenoiseError, RuntimeError):
    """A numeric routine failed its contract (non-convergence, size cap, ...)."""
