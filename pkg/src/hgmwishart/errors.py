"""Exception hierarchy shared by all modules."""


class HgmError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(HgmError, ValueError):
    """Invalid parameters (poles, degrees of freedom, shapes)."""


class DomainError(HgmError, ValueError):
    """Argument outside the domain of a formula."""


class SingularityError(HgmError, ValueError):
    """Evaluation point on a singular locus of the differential system."""


class DiagonalSingularityError(SingularityError):
    """Two coordinates coincide (x_i == x_j) within the configured gap."""


class InitializationError(HgmError, RuntimeError):
    """No acceptable initial point for the holonomic gradient method."""


class IntegrationError(HgmError, RuntimeError):
    """The adaptive integrator failed (step size underflow)."""


class ToleranceWarning(UserWarning):
    """The absolute error control is too loose for the problem scale."""


class ConvergenceWarning(UserWarning):
    """A truncated series reached its degree cap before the stopping rule fired."""
