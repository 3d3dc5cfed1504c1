"""Shared exception types."""


class DomainError(ValueError):
    """An input violates a documented precondition."""


class ResourceError(RuntimeError):
    """A computation would exceed a configured cap."""
