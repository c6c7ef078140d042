"""Exception hierarchy shared by all modules."""


class GraphentError(Exception):
    """Base class for library errors."""


class ValidationError(GraphentError, ValueError):
    """An argument violates a documented precondition."""


class ParseError(ValidationError):
    """Malformed text input; ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ResourceError(GraphentError):
    """The requested simulation exceeds the configured size cap."""


class ExportError(GraphentError):
    """A circuit cannot be represented in the requested output format."""
