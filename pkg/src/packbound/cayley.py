"""Harmonic analysis on Z_n and Z_2^m and theta-prime of Cayley graphs.

For a Cayley graph the theta-prime SDP is invariant under translations,
so its optimal kernel is ``K(x, y) = f(x - y)``; the characters
diagonalize such kernels and the SDP collapses to an LP over the Fourier
coefficients ``fhat``::

    minimize    sum_chi fhat(chi)
    subject to  sum_chi fhat(chi) chi(x) <= 0   for x not in Sigma + {0}
                fhat(e) >= 1,  fhat >= 0,  fhat(chi) = fhat(chi^-1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import SolverFailure, TooLargeError
from .sdp import SolverSettings, lp_as_sdp, solve
from .theta import WeightedGraph

__all__ = [
    "Cyclic",
    "Boolean",
    "CayleySpec",
    "FourierVector",
    "character_table",
    "dft",
    "inverse_dft",
    "is_positive_type",
    "CayleyLp",
    "cayley_lp_model",
    "cayley_theta_lp",
    "cayley_theta",
    "CayleyResult",
    "expand_to_graph",
    "delsarte_lp_model",
    "delsarte_bound",
    "weight_class_sums",
    "delsarte_spec",
    "EXPAND_MAX_ORDER",
]

EXPAND_MAX_ORDER = 4096
DELSARTE_MAX_LENGTH = 24


@dataclass(frozen=True)
class Cyclic:
    """The cyclic group Z_n."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("group order must be >= 1")

    @property
    def order(self):
        return self.n

    def neg(self, x):
        return (-x) % self.n

    def add(self, x, y):
        return (x + y) % self.n

    def __str__(self):
        return f"Z_{self.n}"


@dataclass(frozen=True)
class Boolean:
    """The elementary abelian group Z_2^m; elements are m-bit integers."""

    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be >= 0")

    @property
    def order(self):
        return 1 << self.m

    def neg(self, x):
        return x

    def add(self, x, y):
        return x ^ y

    def __str__(self):
        return f"Z_2^{self.m}"


def _popcount(a):
    return np.bitwise_count(np.asarray(a, dtype=np.uint64)).astype(np.int64)


def character_table(group):
    """``T[u, x] = chi_u(x)``; complex for Z_n, exact +-1 for Z_2^m."""
    N = group.order
    idx = np.arange(N)
    if isinstance(group, Cyclic):
        return np.exp(2j * np.pi * np.outer(idx, idx) / N)
    return 1 - 2 * (_popcount(idx[:, None] & idx[None, :]) & 1)


@dataclass(frozen=True)
class CayleySpec:
    """A finite abelian group with a symmetric connection set ``sigma``."""

    group: Cyclic | Boolean
    sigma: frozenset

    def __init__(self, group, sigma=()):
        s = frozenset(int(x) for x in sigma)
        if any(not 0 <= x < group.order for x in s):
            raise ValueError("connection set element outside the group")
        if 0 in s:
            raise ValueError("0 must not be in the connection set")
        if any(group.neg(x) not in s for x in s):
            raise ValueError("connection set must be closed under negation")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "sigma", s)


@dataclass(frozen=True)
class FourierVector:
    """Fourier coefficients ``fhat(chi_u)`` indexed by ``u``."""

    group: Cyclic | Boolean
    coefficients: np.ndarray = field(repr=False)

    def is_real_mirror(self, tol=1e-12):
        """True iff the represented function is real-valued."""
        c = self.coefficients
        mirror = np.array([c[self.group.neg(u)] for u in range(c.size)])
        return bool(np.all(np.abs(c - np.conj(mirror)) <= tol))

    def inverse(self):
        return inverse_dft(self)


def _fwht(a):
    a = np.array(a, dtype=complex)
    h = 1
    N = a.size
    while h < N:
        a = a.reshape(-1, 2, h)
        a = np.stack([a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]], axis=1)
        h *= 2
    return a.reshape(N)


def dft(f, group):
    """``fhat(chi) = |G|^-1 sum_x f(x) conj(chi(x))``."""
    f = np.asarray(f, dtype=complex)
    if f.shape != (group.order,):
        raise ValueError(f"expected {group.order} values, got shape {f.shape}")
    if isinstance(group, Cyclic):
        c = np.fft.fft(f) / group.order
    else:
        c = _fwht(f) / group.order
    return FourierVector(group, c)


def inverse_dft(fv):
    """``f(x) = sum_chi fhat(chi) chi(x)``."""
    g = fv.group
    if isinstance(g, Cyclic):
        return np.fft.ifft(fv.coefficients) * g.order
    return _fwht(fv.coefficients)


def is_positive_type(f, group, tol=1e-9):
    """True iff ``f(x) = conj(f(-x))`` and every Fourier coefficient is >= -tol."""
    f = np.asarray(f, dtype=complex)
    mirror = np.array([f[group.neg(x)] for x in range(group.order)])
    if np.any(np.abs(f - np.conj(mirror)) > tol):
        return False
    c = dft(f, group).coefficients
    return bool(np.all(c.real >= -tol))


def _orbits(group):
    """Character pairs ``{u, -u}`` sorted by their smallest element."""
    seen = set()
    out = []
    for u in range(group.order):
        if u in seen:
            continue
        o = tuple(sorted({u, group.neg(u)}))
        seen.update(o)
        out.append(o)
    return out


@dataclass
class CayleyLp:
    """The Fourier-domain LP with the bookkeeping to read ``fhat`` back."""

    problem: object
    orbits: list
    rows: list  # representative group element per non-edge row
    n_vars: int


def cayley_lp_model(spec):
    group = spec.group
    orbits = _orbits(group)
    forbidden = set(spec.sigma) | {0}
    rows = []
    for x in range(group.order):
        if x in forbidden or group.neg(x) < x:
            continue
        rows.append(x)
    T = character_table(group)
    cols = np.array([np.sum(T[list(o)], axis=0).real for o in orbits])  # (orbits, N)
    A_ub = cols[:, rows].T if rows else np.zeros((0, len(orbits)))
    # fhat(e) >= 1  ->  -F_e <= -1
    e_row = np.zeros(len(orbits))
    e_row[0] = -1.0
    A_ub = np.vstack([A_ub, e_row])
    b_ub = np.concatenate([np.zeros(len(rows)), [-1.0]])
    cost = -np.array([len(o) for o in orbits], dtype=float)
    return CayleyLp(lp_as_sdp(cost, A_ub, b_ub), orbits, rows, len(orbits))


def cayley_theta_lp(spec):
    """LP (diagonal-block SDP) whose optimum is ``-theta'_e(Cayley(spec))``."""
    return cayley_lp_model(spec).problem


@dataclass
class CayleyResult:
    value: float
    fhat: np.ndarray
    dual_certificate: dict
    solution: object = field(default=None, repr=False)

    def to_json(self):
        out = {
            "value": self.value,
            "fhat": [float(v) for v in self.fhat],
            "dual_certificate": {str(k): float(v) for k, v in self.dual_certificate.items()},
        }
        if self.solution is not None:
            out["status"] = self.solution.status.value
            out["gap"] = self.solution.gap
        return out

    @classmethod
    def from_json(cls, data):
        dual = {
            (k if k == "e" else int(k)): float(v) for k, v in data["dual_certificate"].items()
        }
        return cls(float(data["value"]), np.asarray(data["fhat"], dtype=float), dual)


def cayley_theta(spec, settings=None):
    """Solve the Fourier LP; ``fhat`` is returned over the whole dual group."""
    model = cayley_lp_model(spec)
    sol = solve(model.problem, settings or SolverSettings())
    if not sol.optimal:
        raise SolverFailure(sol)
    F = sol.X[0][: model.n_vars]
    fhat = np.zeros(spec.group.order)
    for o, v in zip(model.orbits, F):
        fhat[list(o)] = v
    dual = {x: y for x, y in zip(model.rows, sol.y[: len(model.rows)])}
    dual["e"] = sol.y[-1]
    return CayleyResult(-sol.primal_value, fhat, dual, sol)


def expand_to_graph(spec):
    """The Cayley graph itself: ``x ~ y`` iff ``x - y`` in sigma; unit weights."""
    g = spec.group
    N = g.order
    if N > EXPAND_MAX_ORDER:
        raise TooLargeError(f"group order {N} exceeds {EXPAND_MAX_ORDER}")
    edges = []
    for x in range(N):
        for s in spec.sigma:
            y = g.add(x, g.neg(s))
            if x < y:
                edges.append((x, y))
    return WeightedGraph(N, edges)


@lru_cache(maxsize=None)
def _weight_class_sums(m):
    u = np.arange(1 << m, dtype=np.uint32)
    wt = np.bitwise_count(u).astype(np.intp)
    K = np.zeros((m + 1, m + 1))
    for i in range(m + 1):
        x = np.uint32((1 << i) - 1)
        sign = 1.0 - 2.0 * (np.bitwise_count(u & x) & 1)
        K[:, i] = np.bincount(wt, weights=sign, minlength=m + 1)
    K.setflags(write=False)
    return K


def weight_class_sums(m):
    """``K[j, i] = sum over u of weight j of (-1)^(u . x)`` for any ``x`` of weight i.

    Computed by enumerating all ``2^m`` words.
    """
    if not 0 <= m <= DELSARTE_MAX_LENGTH:
        raise ValueError(f"length must be in [0, {DELSARTE_MAX_LENGTH}]")
    return _weight_class_sums(m)


def delsarte_lp_model(m, d):
    """Weight-symmetrized Fourier LP on Z_2^m with sigma = {1 <= wt <= d-1}.

    One variable per Hamming weight of the character; one row per weight
    ``i >= d`` of the group element.
    """
    if not 1 <= d <= m <= DELSARTE_MAX_LENGTH:
        raise ValueError(f"need 1 <= d <= m <= {DELSARTE_MAX_LENGTH}")
    K = weight_class_sums(m)
    A_ub = K[:, d:].T
    e_row = np.zeros(m + 1)
    e_row[0] = -1.0
    A_ub = np.vstack([A_ub, e_row])
    b_ub = np.concatenate([np.zeros(m + 1 - d), [-1.0]])
    cost = -np.array([math.comb(m, j) for j in range(m + 1)], dtype=float)
    return lp_as_sdp(cost, A_ub, b_ub)


def delsarte_bound(m, d, settings=None):
    """Upper bound on the size of a binary code of length m and minimum distance d."""
    sol = solve(delsarte_lp_model(m, d), settings or SolverSettings())
    if not sol.optimal:
        raise SolverFailure(sol)
    return -sol.primal_value


def delsarte_spec(m, d):
    """The Cayley spec whose independent sets are the codes of minimum distance d."""
    g = Boolean(m)
    sigma = [x for x in range(1, g.order) if 1 <= bin(x).count("1") <= d - 1]
    return CayleySpec(g, sigma)
