"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input data or arguments outside an operation's contract."""


class ResourceLimitError(RuntimeError):
    """Problem size exceeds what the requested backend can handle."""
