"""Exception hierarchy.

Configuration problems and physics outcomes are kept apart so front ends can
map them to different exit codes.
"""


class IongateError(Exception):
    pass


class ConfigError(IongateError, ValueError):
    """Invalid or inconsistent input parameters."""


class PhysicsError(IongateError):
    """A computation finished but the physical situation is not usable."""


class ConvergenceError(PhysicsError):
    """The equilibrium solver hit its iteration cap."""


class OrderingError(PhysicsError):
    """Ions swapped order during a solve.

    Step damping should make this impossible, so seeing it points to a solver bug.
    """


class StabilityError(PhysicsError):
    """The linear chain is unstable along a transverse axis (zigzag)."""

    def __init__(self, message, min_eigenvalue):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class BoundaryMinimumError(PhysicsError):
    """The optimum of a scalar scan sits on the edge of the search range."""

    def __init__(self, message, value, curve):
        super().__init__(message)
        self.value = value
        self.curve = curve


class DegenerateDetuningError(PhysicsError):
    """No segment-amplitude direction produces any two-qubit phase."""
