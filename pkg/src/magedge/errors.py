"""Exception types shared across the package."""


class MagedgeError(Exception):
    """Base class for all library errors."""


class ConfigError(MagedgeError):
    """Invalid configuration: bad grid sizes, domains, or parameter ranges."""


class NumericsError(MagedgeError):
    """A numerical procedure failed or did not certify its own accuracy."""


class DomainError(MagedgeError):
    """An argument lies outside the mathematical domain of an operation."""


class GeometryError(MagedgeError):
    """Invalid boundary curve input (too few points, self-intersection)."""


class IncompleteSpectrumError(MagedgeError):
    """A spectral list does not cover the requested energy range."""
