"""Exception hierarchy shared across the package."""


class TriadicaError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(TriadicaError):
    """A matrix or tensor has a shape inconsistent with its declared context."""
