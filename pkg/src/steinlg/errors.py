"""Exception types shared across the toolkit.

Exit-code mapping used by the CLI: parse errors exit 2, inconclusive
computations exit 3, resource limits exit 4.
"""


class SteinLGError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SteinLGError):
    """Malformed input text; carries a 1-based line/column when known."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class ShapeError(SteinLGError, ValueError):
    """Dimension or shape mismatch between operands."""


class InconclusiveError(SteinLGError):
    """The computation hit its configured cap before reaching a verdict."""


class ResourceLimitError(SteinLGError):
    """A configured resource bound (pair queue, matrix size) was exceeded."""


class StripError(SteinLGError, ValueError):
    """Argument outside the strip covered by the series tail bound."""
