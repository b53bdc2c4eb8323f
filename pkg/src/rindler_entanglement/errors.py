"""Exception types raised across the package."""


class RindlerError(Exception):
    """Base class for all package errors."""


class DomainError(RindlerError, ValueError):
    """An argument lies outside the domain of the function."""


class NonConvergence(RindlerError, ArithmeticError):
    """An iterative or adaptive numerical procedure did not reach its tolerance."""

    def __init__(self, message, operation=None, diagnostics=None):
        super().__init__(message)
        self.operation = operation
        self.diagnostics = dict(diagnostics or {})


class InvalidDecay(DomainError):
    pass


class BranchBoundary(RindlerError, ValueError):
    """Proper time sits exactly on a boundary between pole branches."""

    def __init__(self, message, boundaries=()):
        super().__init__(message)
        self.boundaries = tuple(boundaries)


class WrongScenario(RindlerError, TypeError):
    pass


class DeltaScenario(WrongScenario):
    """Cross term is distributional; a finite-window brute force is meaningless."""


class ConditionNotMet(RindlerError, ValueError):
    """The PPT entanglement condition does not hold for the given components."""


class InvalidState(RindlerError, ValueError):
    pass


class DegenerateSamples(RindlerError, ValueError):
    pass
