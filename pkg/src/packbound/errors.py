"""Exception types shared across packbound."""


class PackboundError(Exception):
    """Base class for all packbound errors."""


class NotPsdError(PackboundError):
    """Raised by the Cholesky factorization when a pivot falls below -tol."""

    def __init__(self, pivot_index, pivot_value):
        super().__init__(f"matrix not PSD: pivot {pivot_index} = {pivot_value:.3e}")
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value


class NonConvergenceError(PackboundError):
    """Jacobi sweeps exhausted the sweep budget."""


class ShapeMismatchError(PackboundError, ValueError):
    pass


class InfeasibleDataError(PackboundError, ValueError):
    """Constraint matrices are linearly dependent."""


class SolverFailure(PackboundError):
    """An SDP solve ended with a status other than Optimal.

    The offending :class:`~packbound.sdp.SdpSolution` is kept in ``solution``.
    """

    def __init__(self, solution, message=None):
        super().__init__(message or f"solver status {solution.status.value}")
        self.solution = solution


class TooLargeError(PackboundError, ValueError):
    pass


class DegreeTooSmallError(PackboundError, ValueError):
    pass


class VerificationFailed(PackboundError):
    def __init__(self, report, message=None):
        super().__init__(message or "grid verification failed")
        self.report = report


class NotCertifiedError(PackboundError):
    pass


class ParseError(PackboundError, ValueError):
    pass
