class LLGError(Exception):
    """Base class for numerical failures raised by llgfrac."""


class SolverError(LLGError):
    """An iterative solve stopped before reaching its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message if residual is None else f"{message} (residual {residual:.3e})")
        self.residual = residual


class PicardError(SolverError):
    pass


class NonFiniteError(LLGError):
    pass


class StepError(LLGError):
    """Wraps a failure inside ``integrate`` with the index of the failing step."""

    def __init__(self, step, cause):
        super().__init__(f"step {step} failed: {cause}")
        self.step = step
        self.cause = cause
