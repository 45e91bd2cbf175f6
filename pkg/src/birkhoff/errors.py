"""Exception hierarchy shared across the library."""


class BirkhoffError(Exception):
    """Base class for all library errors."""


class ConfigError(BirkhoffError):
    """Bad user-supplied configuration (JSON specs, parameters)."""


class RangeError(BirkhoffError):
    """Index or argument outside a table / threshold range."""


class OverflowSampleError(BirkhoffError):
    """Non-finite intermediate while evaluating the discriminant."""


class IndexingError(BirkhoffError):
    """Root count mismatch while indexing the periodic spectrum."""


class ConvergenceError(BirkhoffError):
    """An iteration stagnated before reaching its residual target."""


class QuadratureError(BirkhoffError):
    """Interval-doubling quadrature did not converge."""


class GeometryError(BirkhoffError):
    """Contour rectangle collides with a neighboring gap."""


class BoundaryError(BirkhoffError):
    """Rectangle boundary passes too close to a root after retries."""


class SpectrumInconsistencyError(BirkhoffError):
    """(-1)^n Delta / 2 < 1 inside a gap: spectrum and discriminant disagree."""


class ThresholdError(BirkhoffError):
    """Neumann-series condition for the reduction is violated."""


class ConditioningError(BirkhoffError):
    """Linear solver breakdown in the reduction."""


class UndefinedNodeError(BirkhoffError):
    """Mean-value node requested for a vanishing action."""


class GridSizeError(BirkhoffError):
    """Band bookkeeping guard violated in the hierarchy recursion."""
