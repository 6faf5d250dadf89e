"""Exception types shared across the package."""


class TreemodError(Exception):
    """Base class for all package errors."""


class GraphError(TreemodError):
    """Malformed or unusable graph input (self loop, disconnected, empty...)."""


class CapExceededError(TreemodError):
    """An exhaustive operation would exceed its configured cap."""

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class SolverError(TreemodError):
    """Solver failed to converge within its iteration budget."""

    def __init__(self, message: str, iterations: int = 0, worst_violation: float = float("inf")):
        super().__init__(message)
        self.iterations = iterations
        self.worst_violation = worst_violation


class NumericalError(TreemodError):
    """A numerical subroutine (factorization update, linear solve) failed."""


class InfeasiblePartitionError(TreemodError):
    """Vertex partition is not feasible; `block` names the offending block."""

    def __init__(self, message: str, block: int | None = None):
        super().__init__(message)
        self.block = block


class ToleranceError(TreemodError):
    """A structural property expected of an exact optimum failed at the
    configured tolerance; usually means the solve was too loose."""


class OracleDisagreementError(TreemodError):
    """Fast path and brute-force oracle disagree beyond tolerance."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
