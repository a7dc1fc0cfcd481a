"""Upper bounds for independent sets and packings via SDP and LP duality.

Submodules
----------
linalg
    Symmetric matrices, Cholesky and Jacobi routines for PSD checks.
sdp
    Primal-dual interior-point solver for block-diagonal SDPs.
theta
    Weighted theta-prime of finite graphs.
cayley
    Fourier analysis on Z_n and Z_2^m; Cayley-graph LPs and the Delsarte bound.
cohn_elkies
    Sphere-packing density bounds from radial auxiliary functions.
verifier
    Grid verification of density certificates.
cli
    The ``packbound`` command.
"""

from .cayley import (
    Boolean,
    CayleySpec,
    Cyclic,
    cayley_theta,
    delsarte_bound,
    delsarte_spec,
    dft,
    expand_to_graph,
    inverse_dft,
    is_positive_type,
)
from .cohn_elkies import Basis, RadialFunction, SphereSettings, ball_volume, sphere_bound
from .errors import (
    DegreeTooSmallError,
    InfeasibleDataError,
    NonConvergenceError,
    NotCertifiedError,
    NotPsdError,
    PackboundError,
    ParseError,
    ShapeMismatchError,
    SolverFailure,
    TooLargeError,
    VerificationFailed,
)
from .linalg import SymMatrix, cholesky, is_psd, jacobi_eigen, min_eigenvalue
from .sdp import SdpProblem, SdpSolution, SolverSettings, SolverStatus, check_solution, solve
from .theta import WeightedGraph, alpha_bruteforce, parse_graph, theta_prime
from .verifier import (
    MatrixRadialFunction,
    SphereSystem,
    density_bound_from_f,
    verify_conditions,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
