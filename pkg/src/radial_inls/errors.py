"""Exception and warning types shared across the package."""

from __future__ import annotations


class InvalidFieldError(ValueError):
    """Field values are non-finite or violate a declared tag."""


class GridTooSmallError(ValueError):
    """Grid has too few nodes for the requested stencil."""


class UnsupportedSingularityError(ValueError):
    """Weight exponent outside the supported range."""


class RegimeError(ValueError):
    """Parameters violate the hypotheses required by an operation."""


class PreconditionError(ValueError):
    """Input does not satisfy an operation's precondition."""


class DegenerateInputError(ValueError):
    """Input is degenerate (for example the zero field)."""


class BracketError(RuntimeError):
    """A root could not be bracketed in the search interval."""


class NumericalFailure(RuntimeError):
    """A linear solve or time step broke down."""


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


class ResolutionWarning(UserWarning):
    """Resampling or evolution lost grid resolution or support."""


class StepSizeWarning(UserWarning):
    """Time step exceeds the recommended dt <= h**2/2 guard."""
