class InsufficientDataError(ValueError):
    """Too few observations for the requested estimate."""


class DegenerateSampleError(ValueError):
    """The sample has no spread; the estimate sits on a parameter boundary.

    The boundary estimate is attached as ``estimate`` when one exists.
    """

    def __init__(self, message: str, estimate: dict | None = None):
        super().__init__(message)
        self.estimate = estimate or {}


class FitInfeasibleError(ValueError):
    """The sample moments admit no parameters in the model family."""


class UnsupportedOperationError(NotImplementedError):
    """The operation has no closed form for this model."""
