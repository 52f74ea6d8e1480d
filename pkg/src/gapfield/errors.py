"""Exception hierarchy.

Numerical failures (``NumericalError`` and subclasses) map to CLI exit code 2,
configuration and usage problems to exit code 1.
"""
from __future__ import annotations


class GapfieldError(Exception):
    """Base class for every error raised by the package."""


class GeometryError(GapfieldError):
    pass


class DegenerateParametrizationError(GeometryError):
    pass


class UnsupportedGeometryError(GeometryError):
    pass


class AmbiguousGapError(GeometryError):
    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class InfeasibleTouchingError(GeometryError):
    pass


class DuplicatePointsError(GeometryError):
    pass


class ConfigError(GapfieldError):
    def __init__(self, message, key_path=""):
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)
        self.key_path = key_path


class DomainError(GapfieldError, ValueError):
    """Argument outside the domain of a formula."""


class InfiniteConductanceError(DomainError):
    pass


class InvalidFormError(DomainError):
    pass


class NumericalError(GapfieldError):
    pass


class QuadratureError(NumericalError):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class RefineFurtherError(NumericalError):
    def __init__(self, message, suggested_level=None):
        super().__init__(message)
        self.suggested_level = suggested_level


class IllConditionedError(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateSystemError(NumericalError):
    pass


class ExtrapolationError(NumericalError):
    pass


class SweepError(NumericalError):
    pass
