"""Exception hierarchy shared by all modules."""


class OneStableError(Exception):
    """Base class for package errors."""


class InvalidDirection(OneStableError):
    """A spectral-measure direction is zero, non-finite, or has the wrong shape."""


class EmptyMeasure(OneStableError):
    """A spectral measure with no atoms / zero total mass was supplied."""


class DimensionError(OneStableError):
    """Vector or grid dimension does not match the measure."""


class DegenerateMeasure(OneStableError):
    """The exponent vanishes on some direction: no non-degeneracy constant exists."""


class EmptyBatch(OneStableError):
    """A sample batch with n < 1 was requested."""


class UnsupportedScheme(OneStableError):
    """The requested sampling scheme is not available for this measure."""


class UnsupportedDimension(OneStableError):
    """The operation is only implemented for a restricted set of dimensions."""


class GridTooCoarse(OneStableError):
    """Frequency grid cannot resolve the density at the requested accuracy."""

    def __init__(self, msg, required_p_max=None):
        super().__init__(msg)
        self.required_p_max = required_p_max


class BoundarySupportError(OneStableError):
    """Input field does not vanish near the grid boundary."""


class ContractionFailure(OneStableError):
    """First remainder ratio too large for the Neumann series to be trusted."""

    def __init__(self, msg, ratio=None):
        super().__init__(msg)
        self.ratio = ratio


class MaxIterExceeded(OneStableError):
    """Neumann iteration did not reach the requested tolerance."""

    def __init__(self, msg, history=None):
        super().__init__(msg)
        self.history = history or []


class EvaluationError(OneStableError):
    """A user-supplied or built-in evaluator returned non-finite values."""


class GridError(OneStableError):
    """Grid layouts are inconsistent or malformed."""
