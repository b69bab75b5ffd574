"""Exception and warning types shared by all modules."""


class OptomechError(Exception):
    """Base class for all errors raised by rsbcool."""


class InvalidParameterError(OptomechError, ValueError):
    """A parameter bundle violates one of its invariants."""


class MissingParameterError(InvalidParameterError):
    """An operation needs a parameter the bundle leaves unset."""


class StepSizeError(InvalidParameterError):
    """Integration step too coarse for the fastest time scale."""


class PhysicsDomainError(OptomechError):
    """The requested quantity does not exist for these inputs."""


class HeatingRegimeError(PhysicsDomainError):
    """No cooling steady state: the upper sideband dominates."""


class NonPhysicalRatioError(PhysicsDomainError):
    """Measured sideband asymmetry exceeds the detailed-balance bound."""


class SubZeroPointError(PhysicsDomainError):
    """Mode energy below the zero-point energy."""


class FitError(OptomechError):
    """A fit did not converge."""


class DegenerateWindowError(FitError):
    """The fit window carries no usable information."""


class RegimeWarning(UserWarning):
    """An approximation is being used outside its stated regime."""
