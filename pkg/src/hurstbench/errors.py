"""Exception hierarchy shared across the toolkit.

ValueError is reserved for violated preconditions (bad parameters, series too
short, lag out of range); the classes below mark failures that can occur on
structurally valid input.
"""


class HurstbenchError(Exception):
    """Base class for toolkit-specific failures."""


class EstimationError(HurstbenchError):
    """An estimator could not produce a usable estimate."""


class DegenerateSeriesError(EstimationError):
    """Input series carries no usable variation (constant, zero variance)."""


class EmbeddingError(HurstbenchError):
    """Circulant embedding produced a genuinely negative eigenvalue."""


class CaptureFormatError(HurstbenchError):
    """A capture CSV row could not be parsed."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number
