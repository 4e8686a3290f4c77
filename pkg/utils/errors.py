"""Exception types shared by every package of the laboratory."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateConditioningError(ValueError):
    """Palm conditioning at a point where the one-point density vanishes."""


class KernelOverflowError(OverflowError):
    """A kernel value is out of range even after log-space evaluation."""


class PSDViolationError(ArithmeticError):
    """A correlation determinant is negative beyond roundoff."""


class SingularDriftError(ArithmeticError):
    """Drift requested at a configuration closer to a singularity than the floors allow."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""


class SamplerError(RuntimeError):
    """The ensemble sampler failed, also after retrying with perturbed streams."""


class IntegratorBlowupError(RuntimeError):
    """
    The adaptive integrator reached dt_min without an acceptable step.

    Parameters:
        message: human readable reason.
        telemetry: the integrator telemetry at the time of failure.
        time: simulated time reached.
    """
    def __init__(self, message, telemetry=None, time=None):
        super().__init__(message)
        self.telemetry = telemetry
        self.time = time


class InsufficientDrawsWarning(UserWarning):
    """Monte Carlo standard error is large relative to the estimate."""
