"""Exception types shared across the solver library."""


class MumsError(Exception):
    """Base class for all library-specific errors."""


class ModelValidationError(MumsError):
    """A model object or parameter set violates its invariants."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InputError(MumsError):
    """A model document or command-line input could not be parsed."""


class SolverError(MumsError):
    """Base class for failures while solving a model."""


class RootSelectionError(SolverError):
    """The persistence root could not be located or tracked."""


class SingularSystemError(SolverError):
    """A linear system required by the solver is singular or too
    ill-conditioned to trust."""


class ResidualCheckError(SolverError):
    """A computed solution failed its defining residual checks."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class DomainError(SolverError):
    """A closed-form expression was evaluated outside its region of
    validity (for example a diverging infinite sum)."""


class AlgebraicSolutionWarning(RuntimeWarning):
    """The solution's transition probability lies outside [0, 1).

    Closed-form expressions remain valid as identities of the underlying
    linear difference equations, but the chain interpretation (states,
    occupancy probabilities, simulation) is lost.
    """
