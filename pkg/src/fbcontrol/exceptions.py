"""Exception types raised across the package."""


class FbcontrolError(Exception):
    """Base class for all package errors."""


class ConfigError(FbcontrolError):
    """Invalid or inconsistent configuration value."""


class SeedError(FbcontrolError):
    """Point-cloud seeding failed (spacing too coarse for the shape)."""


class DegenerateBoundaryError(FbcontrolError):
    """A boundary point has too few boundary neighbours for a normal fit."""


class FoldOverError(FbcontrolError):
    """A displacement locally inverts orientation (det of the step map <= 0)."""


class StencilError(FbcontrolError):
    """Local least-squares basis is rank deficient at one or more points."""


class SolverError(FbcontrolError):
    """A linear solve did not reach the requested residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ExtrapolationError(FbcontrolError):
    """An interpolation target has no source neighbours in range."""


class UnknownSegmentError(FbcontrolError, KeyError):
    """Lookup of an unknown boundary segment id."""


class LineSearchError(FbcontrolError):
    """Armijo backtracking exhausted the allowed halvings."""


class InsufficientDataError(FbcontrolError):
    """Not enough usable points for a fit (e.g. all-plateau series)."""
