"""Exception types raised across the package."""


class SteeringError(Exception):
    """Base class for all errors raised by steerdiscord."""


class InvalidState(SteeringError, ValueError):
    """A matrix or Bloch triple violates a density-matrix invariant.

    Parameters
    ----------
    invariant : str
        Name of the violated invariant (``"hermitian"``, ``"unit_trace"``,
        ``"positive_semidefinite"``, ``"shape"``).
    magnitude : float
        Size of the violation (max asymmetry, trace error, or most negative
        eigenvalue).
    """

    def __init__(self, invariant, magnitude, message=None):
        self.invariant = invariant
        self.magnitude = float(magnitude)
        if message is None:
            message = f"{invariant} violated (magnitude {self.magnitude:.3e})"
        super().__init__(message)


class NonPhysical(InvalidState):
    """Assembled density matrix has a negative eigenvalue beyond tolerance."""

    def __init__(self, min_eigenvalue, message=None):
        super().__init__("positive_semidefinite", min_eigenvalue, message)


class SingularFilter(SteeringError, ValueError):
    """Bob's marginal is (nearly) pure, so the local filter is undefined."""


class NotCanonical(SteeringError, ValueError):
    """Operation requires a canonical state (y = 0)."""


class DegenerateOutcome(SteeringError, ValueError):
    """One outcome of Bob's measurement has (numerically) zero probability."""


class PureBobMarginal(SteeringError, ValueError):
    """|y| is too close to 1 for the distance objective to be defined."""


class OutOfDomain(SteeringError, ValueError):
    """Parameters lie outside the admissible region."""


class Indeterminate(SteeringError, ArithmeticError):
    """A closed-form expression has no finite value at the requested point."""


class ExhaustedRejection(SteeringError, RuntimeError):
    """Rejection sampler acceptance rate fell below the configured floor."""


class OptimizationFailure(SteeringError, RuntimeError):
    """Numeric optimizer failed to meet its convergence contract."""
