"""Weighted theta-prime of finite graphs and an exact independence oracle.

``theta'_w(G)`` is the minimum ``M`` over symmetric ``K`` with
``K(x, x) <= M``, ``K(x, y) <= 0`` on non-adjacent pairs and
``K - sqrt(w) sqrt(w)^T`` PSD. Any feasible ``(M, K)`` bounds the maximum
weight of an independent set from above.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, SolverFailure, TooLargeError
from .linalg import SymMatrix, jacobi_eigen
from .sdp import SdpProblem, SolverSettings, solve

__all__ = [
    "WeightedGraph",
    "ThetaCertificate",
    "parse_graph",
    "read_graph",
    "format_graph",
    "theta_prime_sdp",
    "theta_prime",
    "alpha_bruteforce",
    "ALPHA_MAX_VERTICES",
]

ALPHA_MAX_VERTICES = 30


@dataclass(frozen=True)
class WeightedGraph:
    """Simple undirected graph with nonnegative vertex weights.

    Edges are stored as sorted pairs; duplicates collapse, loops raise.
    """

    n_vertices: int
    edges: frozenset
    weights: tuple

    def __init__(self, n_vertices, edges=(), weights=None):
        n = int(n_vertices)
        if n < 1:
            raise ValueError("a graph needs at least one vertex")
        norm = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} vertices")
            norm.add((min(u, v), max(u, v)))
        w = (1.0,) * n if weights is None else tuple(float(x) for x in weights)
        if len(w) != n:
            raise ValueError("need one weight per vertex")
        if not all(math.isfinite(x) and x >= 0 for x in w):
            raise ValueError("weights must be finite and nonnegative")
        object.__setattr__(self, "n_vertices", n)
        object.__setattr__(self, "edges", frozenset(norm))
        object.__setattr__(self, "weights", w)

    @classmethod
    def cycle(cls, n, weights=None):
        return cls(n, [(i, (i + 1) % n) for i in range(n)], weights)

    @classmethod
    def complete(cls, n, weights=None):
        return cls(n, itertools.combinations(range(n), 2), weights)

    @classmethod
    def petersen(cls):
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return cls(10, outer + spokes + inner)

    def adjacency(self):
        A = np.zeros((self.n_vertices, self.n_vertices), dtype=bool)
        for u, v in self.edges:
            A[u, v] = A[v, u] = True
        return A

    def nonedges(self):
        """Unordered non-adjacent pairs ``(x, y)``, ``x < y``, sorted."""
        return [
            (x, y)
            for x, y in itertools.combinations(range(self.n_vertices), 2)
            if (x, y) not in self.edges
        ]

    def with_weights(self, weights):
        return WeightedGraph(self.n_vertices, self.edges, weights)

    def with_edges(self, extra):
        return WeightedGraph(self.n_vertices, set(self.edges) | set(extra), self.weights)

    def is_independent(self, vertices):
        vs = sorted(set(vertices))
        return all((u, v) not in self.edges for u, v in itertools.combinations(vs, 2))


def parse_graph(text):
    """Parse the text graph format.

    First line ``n m``; then ``m`` lines ``u v`` (0-based); then optional
    lines ``w u value``. Blank lines and ``#`` comments are ignored.
    Unlisted weights default to 1.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line.split()))
    if not lines:
        raise ParseError("empty graph file")
    lineno, head = lines[0]
    try:
        n, m = int(head[0]), int(head[1])
        if len(head) != 2:
            raise ValueError
    except (ValueError, IndexError):
        raise ParseError(f"line {lineno}: expected 'n m'") from None
    edges, weights = [], [1.0] * max(n, 0)
    for lineno, tok in lines[1:]:
        try:
            if tok[0] == "w":
                if len(tok) != 3:
                    raise ValueError
                u, val = int(tok[1]), float(tok[2])
                if not 0 <= u < n:
                    raise ParseError(f"line {lineno}: vertex {u} out of range")
                weights[u] = val
            else:
                if len(tok) != 2:
                    raise ValueError
                u, v = int(tok[0]), int(tok[1])
                if u == v:
                    raise ParseError(f"line {lineno}: loop at vertex {u}")
                edges.append((u, v))
        except ParseError:
            raise
        except ValueError:
            raise ParseError(f"line {lineno}: cannot parse {' '.join(tok)!r}") from None
    if len(edges) != m:
        raise ParseError(f"header announces {m} edges, found {len(edges)}")
    try:
        return WeightedGraph(n, edges, weights)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_graph(path):
    with open(path) as fh:
        return parse_graph(fh.read())


def format_graph(g):
    edges = sorted(g.edges)
    out = [f"{g.n_vertices} {len(edges)}"]
    out += [f"{u} {v}" for u, v in edges]
    out += [f"w {i} {w:.17g}" for i, w in enumerate(g.weights) if w != 1.0]
    return "\n".join(out) + "\n"


def theta_prime_sdp(g):
    """SDP whose optimum is ``-theta'_w(g)`` (maximization form).

    Variables: ``Y = K - sqrt(w) sqrt(w)^T`` (dense PSD block) and one
    diagonal block ``[M, s_x (x in V), t_xy (non-edges)]`` of nonnegative
    scalars, with rows

    * ``Y_xx + s_x - M = -w_x``
    * ``Y_xy + t_xy = -sqrt(w_x w_y)``

    and objective ``-M``. ``M >= 0`` is implied by the first rows.
    """
    w = np.asarray(g.weights)
    if not np.any(w > 0):
        raise ValueError("theta' of an all-zero weighting is 0; nothing to solve")
    n = g.n_vertices
    non = g.nonedges()
    m = n + len(non)
    k = 1 + n + len(non)
    sw = np.sqrt(w)
    Ay = np.zeros((m, n, n))
    Ad = np.zeros((m, k))
    b = np.zeros(m)
    for x in range(n):
        Ay[x, x, x] = 1.0
        Ad[x, 0] = -1.0
        Ad[x, 1 + x] = 1.0
        b[x] = -w[x]
    for r, (x, y) in enumerate(non, start=n):
        Ay[r, y, x] = 0.5
        Ay[r, x, y] = 0.5
        Ad[r, r + 1] = 1.0
        b[r] = -sw[x] * sw[y]
    Cd = np.zeros(k)
    Cd[0] = -1.0
    return SdpProblem([n, -k], [np.zeros((n, n)), Cd], [Ay, Ad], b)


@dataclass(frozen=True)
class ThetaCertificate:
    """A feasible ``(M, K)`` for the theta-prime program."""

    M: float
    K: SymMatrix
    psd_margin: float
    max_nonedge_violation: float

    def verify(self, g, tol=1e-9):
        """Replay every constraint without the solver."""
        K = self.K.dense()
        sw = np.sqrt(np.asarray(g.weights))
        if K.shape != (g.n_vertices, g.n_vertices):
            return False
        if np.max(np.diag(K)) > self.M + tol:
            return False
        non = g.nonedges()
        if non and max(K[x, y] for x, y in non) > tol:
            return False
        return jacobi_eigen(K - np.outer(sw, sw))[0][-1] >= -tol

    def to_json(self):
        return {
            "value": self.M,
            "K": self.K.dense().tolist(),
            "psd_margin": self.psd_margin,
            "max_nonedge_violation": self.max_nonedge_violation,
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            float(data["value"]),
            SymMatrix.from_dense(np.asarray(data["K"], dtype=float)),
            float(data["psd_margin"]),
            float(data["max_nonedge_violation"]),
        )


def _repair(g, Y, sw):
    """Turn an interior-point iterate into an exactly feasible certificate.

    Positive non-edge entries are clipped to 0 and any PSD deficit from
    clipping is absorbed by a diagonal shift; ``M`` is then the largest
    diagonal entry.
    """
    K = Y + np.outer(sw, sw)
    for x, y in g.nonedges():
        if K[x, y] > 0:
            K[x, y] = K[y, x] = 0.0
    W = np.outer(sw, sw)
    margin = float(jacobi_eigen(K - W)[0][-1])
    if margin < 0:
        K += (-margin) * np.eye(g.n_vertices)
        margin = float(jacobi_eigen(K - W)[0][-1])
    non = g.nonedges()
    viol = max((K[x, y] for x, y in non), default=0.0)
    M = float(np.max(np.diag(K)))
    return ThetaCertificate(M, SymMatrix.from_dense(K), margin, float(viol))


def theta_prime(g, settings=None):
    """Solve for ``theta'_w(g)``.

    Returns
    -------
    value : float
        ``M`` of a repaired, solver-free-checkable certificate; an upper
        bound on the weighted independence number.
    cert : ThetaCertificate

    Raises
    ------
    SolverFailure
        If the SDP solve does not end Optimal.
    """
    w = np.asarray(g.weights)
    n = g.n_vertices
    if not np.any(w > 0):
        K = SymMatrix.from_dense(np.zeros((n, n)))
        return 0.0, ThetaCertificate(0.0, K, 0.0, 0.0)
    sol = solve(theta_prime_sdp(g), settings or SolverSettings())
    if not sol.optimal:
        raise SolverFailure(sol)
    cert = _repair(g, sol.X[0], np.sqrt(w))
    return cert.M, cert


def alpha_bruteforce(g):
    """Maximum weight of an independent set, by branch and bound.

    Returns
    -------
    value : float
    witness : tuple of int
        Sorted vertices of an optimal independent set.

    Raises
    ------
    TooLargeError
        Above :data:`ALPHA_MAX_VERTICES` vertices.
    """
    n = g.n_vertices
    if n > ALPHA_MAX_VERTICES:
        raise TooLargeError(f"{n} vertices exceeds the brute-force cap {ALPHA_MAX_VERTICES}")
    w = g.weights
    nbr = [0] * n
    for u, v in g.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    best = [0.0, 0]

    def weight_of(mask):
        total = 0.0
        while mask:
            low = mask & -mask
            total += w[low.bit_length() - 1]
            mask ^= low
        return total

    def branch(cand, chosen, value):
        if value > best[0]:
            best[0], best[1] = value, chosen
        if not cand or value + weight_of(cand) <= best[0]:
            return
        # branch on the candidate with most candidate neighbours
        v = max(
            (i for i in range(n) if cand >> i & 1),
            key=lambda i: (bin(nbr[i] & cand).count("1"), -i),
        )
        bit = 1 << v
        if nbr[v] & cand == 0:
            branch(cand & ~bit, chosen | bit, value + w[v])
            return
        branch(cand & ~bit & ~nbr[v], chosen | bit, value + w[v])
        branch(cand & ~bit, chosen, value)

    branch((1 << n) - 1, 0, 0.0)
    witness = tuple(i for i in range(n) if best[1] >> i & 1)
    return best[0], witness
