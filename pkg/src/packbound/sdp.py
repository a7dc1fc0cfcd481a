"""Primal-dual interior-point solver for small dense block-diagonal SDPs.

Problems are stored in the primal standard form::

    maximize    <C, X>
    subject to  <A_i, X> = b_i,   i = 1..m
                X = diag(X_1, ..., X_k) PSD

with the dual ``minimize b^T y  s.t.  sum_i y_i A_i - C = Z, Z PSD``.
Block orders follow the SDPA convention: a positive order is a dense
symmetric block, a negative order ``-k`` is a diagonal block holding ``k``
nonnegative scalars (``k`` blocks of order 1, i.e. LP variables).

The search direction is the HKM direction with a Mehrotra
predictor-corrector; the start point is a scaled identity on
row-normalized data.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InfeasibleDataError, ShapeMismatchError
from .linalg import jacobi_eigen

__all__ = [
    "SdpProblem",
    "SdpSolution",
    "SolverSettings",
    "SolverStatus",
    "CheckReport",
    "solve",
    "check_solution",
    "lp_as_sdp",
    "problem_to_json",
    "problem_from_json",
    "solution_to_json",
    "solution_from_json",
]

log = logging.getLogger(__name__)

STEP_FRACTION = 0.98


class SolverStatus(enum.Enum):
    OPTIMAL = "Optimal"
    MAX_ITERATIONS = "MaxIterations"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass(frozen=True)
class SolverSettings:
    gap_tol: float = 1e-8
    feas_tol: float = 1e-8
    max_iter: int = 100

    def __post_init__(self):
        if not (self.gap_tol > 0 and self.feas_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


def _symmetrize_lower(a):
    return np.tril(a) + np.swapaxes(np.tril(a, -1), -1, -2)


class SdpProblem:
    """Block-diagonal SDP in primal standard form (maximization).

    Parameters
    ----------
    blocks : sequence of int
        SDPA-style block orders; negative means diagonal.
    C : list of array_like
        Objective per block: ``(n, n)`` for dense blocks, ``(k,)`` for
        diagonal blocks. Dense blocks are read from the lower triangle.
    A : list of array_like
        Constraint data per block: ``(m, n, n)`` or ``(m, k)``.
    b : array_like
        Right-hand side, shape ``(m,)``.
    check_rank : bool
        Reject linearly dependent constraints (default True).
    """

    def __init__(self, blocks, C, A, b, check_rank=True):
        self.blocks = tuple(int(n) for n in blocks)
        if any(n == 0 for n in self.blocks):
            raise ShapeMismatchError("block order 0 is not allowed")
        self.b = np.array(b, dtype=float).ravel()
        m = self.b.size
        if len(C) != len(self.blocks) or len(A) != len(self.blocks):
            raise ShapeMismatchError("C and A need one entry per block")
        self.C = []
        self.A = []
        for n, c, a in zip(self.blocks, C, A):
            c = np.array(c, dtype=float)
            a = np.array(a, dtype=float)
            if n > 0:
                if c.shape != (n, n) or a.shape != (m, n, n):
                    raise ShapeMismatchError(
                        f"dense block of order {n}: got C {c.shape}, A {a.shape}"
                    )
                c = _symmetrize_lower(c)
                a = _symmetrize_lower(a)
            else:
                if c.shape != (-n,) or a.shape != (m, -n):
                    raise ShapeMismatchError(
                        f"diagonal block of size {-n}: got C {c.shape}, A {a.shape}"
                    )
            if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a))):
                raise ValueError("problem data must be finite")
            c.setflags(write=False)
            a.setflags(write=False)
            self.C.append(c)
            self.A.append(a)
        if not np.all(np.isfinite(self.b)):
            raise ValueError("problem data must be finite")
        self.b.setflags(write=False)
        if check_rank and m:
            rank = np.linalg.matrix_rank(self.constraint_matrix())
            if rank < m:
                raise InfeasibleDataError(
                    f"constraint matrices are linearly dependent (rank {rank} < m = {m})"
                )

    @property
    def n_constraints(self):
        return self.b.size

    @property
    def scalar_block_orders(self):
        """Block orders with every diagonal block expanded into order-1 blocks."""
        out = []
        for n in self.blocks:
            out.extend([n] if n > 0 else [1] * (-n))
        return out

    def constraint_matrix(self):
        """Rows are the constraints in svec coordinates (isometric)."""
        parts = []
        for n, a in zip(self.blocks, self.A):
            if n > 0:
                rows, cols = np.tril_indices(n)
                w = np.where(rows == cols, 1.0, np.sqrt(2.0))
                parts.append(a[:, rows, cols] * w)
            else:
                parts.append(a)
        return np.hstack(parts) if parts else np.zeros((self.b.size, 0))

    def op_A(self, X):
        """``(<A_i, X>)_i``."""
        out = np.zeros(self.b.size)
        for n, a, x in zip(self.blocks, self.A, X):
            if n > 0:
                out += a.reshape(a.shape[0], -1) @ x.ravel()
            else:
                out += a @ x
        return out

    def op_At(self, y):
        """``sum_i y_i A_i`` per block."""
        return [np.tensordot(y, a, axes=1) for a in self.A]

    def objective(self, X):
        return float(sum(_inner(n, c, x) for n, c, x in zip(self.blocks, self.C, X)))

    def __repr__(self):
        return f"SdpProblem(blocks={list(self.blocks)}, m={self.b.size})"


def _inner(n, a, b):
    return float(np.sum(a * b))


@dataclass
class SdpSolution:
    X: list | None
    y: np.ndarray
    Z: list
    primal_value: float
    dual_value: float
    gap: float
    primal_residual: float
    dual_residual: float
    status: SolverStatus
    iterations: int = 0
    schur_condition: float = float("nan")
    history: list = field(default_factory=list, repr=False)

    @property
    def optimal(self):
        return self.status is SolverStatus.OPTIMAL

    @property
    def value(self):
        """Midpoint of the primal/dual bracket."""
        return 0.5 * (self.primal_value + self.dual_value)


def _metrics(p, X, y, Z, bnorm, cnorm):
    pobj = p.objective(X)
    dobj = float(p.b @ y)
    rp = p.b - p.op_A(X)
    Aty = p.op_At(y)
    dres2 = 0.0
    for c, aty, z in zip(p.C, Aty, Z):
        dres2 += float(np.sum((aty - z - c) ** 2))
    pres = float(np.linalg.norm(rp)) / (1.0 + bnorm)
    dres = np.sqrt(dres2) / (1.0 + cnorm)
    gap = abs(dobj - pobj) / (1.0 + abs(pobj) + abs(dobj))
    return pobj, dobj, gap, pres, dres


def _max_step(n, x, dx):
    """Largest alpha with x + alpha*dx PSD (inf when unbounded)."""
    if n > 0:
        try:
            L = np.linalg.cholesky(x)
        except np.linalg.LinAlgError:
            return 0.0
        W = scipy.linalg.solve_triangular(L, dx, lower=True)
        W = scipy.linalg.solve_triangular(L, W.T, lower=True)
        lam = float(np.linalg.eigvalsh(0.5 * (W + W.T))[0])
    else:
        neg = dx < 0
        if not np.any(neg):
            return np.inf
        return float(np.min(-x[neg] / dx[neg]))
    return np.inf if lam >= 0 else -1.0 / lam


def solve(p, settings=None):
    """Solve ``p`` with a Mehrotra predictor-corrector HKM method.

    Returns an :class:`SdpSolution`; a non-optimal status carries the best
    iterate found (smallest of max(gap, residuals)).
    """
    settings = settings or SolverSettings()
    m = p.n_constraints
    blocks = p.blocks
    bnorm = float(np.linalg.norm(p.b))
    cnorm = float(np.sqrt(sum(np.sum(c * c) for c in p.C)))

    # row normalization and global scaling of b and C
    row = np.sqrt(
        sum(np.sum(a.reshape(m, -1) ** 2, axis=1) for a in p.A)
    ) if m else np.zeros(0)
    row = np.where(row > 0, row, 1.0)
    As = [a / row.reshape((-1,) + (1,) * (a.ndim - 1)) for a in p.A]
    Aflat = [a.reshape(m, -1) for a in As]
    bs_ = p.b / row
    sb = max(1.0, float(np.linalg.norm(bs_)))
    sc = max(1.0, cnorm)
    bs = bs_ / sb
    Cs = [c / sc for c in p.C]

    def unscale(X, y, Z):
        return [sb * x for x in X], sc * y / row, [sc * z for z in Z]

    def op_A(X):
        out = np.zeros(m)
        for n, af, x in zip(blocks, Aflat, X):
            out += af @ x.ravel()
        return out

    def op_At(y):
        return [np.tensordot(y, a, axes=1) for a in As]

    X, Z = [], []
    for n in blocks:
        tau = max(10.0, np.sqrt(abs(n)))
        X.append(tau * np.eye(n) if n > 0 else np.full(-n, tau))
        Z.append(tau * np.eye(n) if n > 0 else np.full(-n, tau))
    y = np.zeros(m)
    N = float(sum(abs(n) for n in blocks))

    history = []
    best = None
    status = SolverStatus.MAX_ITERATIONS
    cond = float("nan")
    stalls = 0
    it = 0
    for it in range(settings.max_iter + 1):
        Xo, yo, Zo = unscale(X, y, Z)
        pobj, dobj, gap, pres, dres = _metrics(p, Xo, yo, Zo, bnorm, cnorm)
        mu = sum(_inner(n, x, z) for n, x, z in zip(blocks, X, Z)) / N
        history.append(
            dict(iteration=it, primal_value=pobj, dual_value=dobj, gap=gap,
                 primal_residual=pres, dual_residual=dres, mu=mu)
        )
        merit = max(gap / settings.gap_tol, pres / settings.feas_tol, dres / settings.feas_tol)
        if best is None or merit <= best[0]:
            best = (merit, it, [x.copy() for x in Xo], yo.copy(), [z.copy() for z in Zo],
                    pobj, dobj, gap, pres, dres)
        if gap <= settings.gap_tol and pres <= settings.feas_tol and dres <= settings.feas_tol:
            status = SolverStatus.OPTIMAL
            break
        if it == settings.max_iter:
            break

        rp = bs - op_A(X)
        Aty = op_At(y)
        Rd = [c + z - aty for c, z, aty in zip(Cs, Z, Aty)]

        # M = B B^T with B_i = L_x^T A_i L_z^-T; factoring B^T by QR instead of
        # forming M halves the exponent of its condition number
        Zinv = []
        Bcols = []
        try:
            for n, a, x, z in zip(blocks, As, X, Z):
                if n > 0:
                    Lx = np.linalg.cholesky(x)
                    Lz = np.linalg.cholesky(z)
                    Lzi = scipy.linalg.solve_triangular(Lz, np.eye(n), lower=True)
                    zi = Lzi.T @ Lzi
                    Bcols.append(np.matmul(np.matmul(Lx.T, a), Lzi.T).reshape(m, -1))
                else:
                    zi = 1.0 / z
                    Bcols.append(a * np.sqrt(x * zi))
                Zinv.append(zi)
            B = np.hstack(Bcols)
            R = scipy.linalg.qr(B.T, mode="r", check_finite=True)[0][:m]
            diag = np.abs(np.diag(R))
            if m and (diag.min() == 0.0 or not np.all(np.isfinite(R))):
                raise np.linalg.LinAlgError("rank-deficient Schur factor")
        except (np.linalg.LinAlgError, ValueError):
            cond = float("inf")
            status = SolverStatus.NUMERICAL_FAILURE
            break

        def schur_solve(r):
            def once(v):
                w = scipy.linalg.solve_triangular(R, v, trans="T", lower=False)
                return scipy.linalg.solve_triangular(R, w, lower=False)

            dy = once(r)
            # one step of refinement against the unformed operator B B^T
            return dy + once(r - B @ (B.T @ dy))

        def direction(sigma_mu, corr):
            rhs = -rp.copy()
            for k, (n, x, zi, rd) in enumerate(zip(blocks, X, Zinv, Rd)):
                if n > 0:
                    G = sigma_mu * zi - x + x @ rd @ zi
                    if corr is not None:
                        G = G - corr[0][k] @ corr[1][k] @ zi
                    rhs += Aflat[k] @ G.ravel()
                else:
                    g = sigma_mu * zi - x + x * rd * zi
                    if corr is not None:
                        g = g - corr[0][k] * corr[1][k] * zi
                    rhs += Aflat[k] @ g
            dy = schur_solve(rhs)
            dX, dZ = primal_dual_step(dy, sigma_mu, corr)
            # refine dy against the map actually applied, so A(dX) = rp holds
            # to working accuracy rather than to the accuracy of the Schur solve
            for _ in range(2):
                e = op_A(dX) - rp
                if not np.all(np.isfinite(e)):
                    break
                dy = dy + schur_solve(e)
                dX, dZ = primal_dual_step(dy, sigma_mu, corr)
            return dX, dy, dZ

        def primal_dual_step(dy, sigma_mu, corr):
            Atdy = op_At(dy)
            dZ, dX = [], []
            for k, (n, x, zi, rd, atdy) in enumerate(zip(blocks, X, Zinv, Rd, Atdy)):
                dz = atdy - rd
                if n > 0:
                    dz = 0.5 * (dz + dz.T)
                    G = sigma_mu * zi - x - x @ dz @ zi
                    if corr is not None:
                        G = G - corr[0][k] @ corr[1][k] @ zi
                    dx = 0.5 * (G + G.T)
                else:
                    dx = sigma_mu * zi - x - x * dz * zi
                    if corr is not None:
                        dx = dx - corr[0][k] * corr[1][k] * zi
                dZ.append(dz)
                dX.append(dx)
            return dX, dZ

        def steps(dX, dZ):
            ap = min([1.0] + [STEP_FRACTION * _max_step(n, x, d) for n, x, d in zip(blocks, X, dX)])
            ad = min([1.0] + [STEP_FRACTION * _max_step(n, z, d) for n, z, d in zip(blocks, Z, dZ)])
            return ap, ad

        dXa, dya, dZa = direction(0.0, None)
        ap, ad = steps(dXa, dZa)
        mu_aff = sum(
            _inner(n, x + ap * dx, z + ad * dz)
            for n, x, dx, z, dz in zip(blocks, X, dXa, Z, dZa)
        ) / N
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0
        if gap <= settings.gap_tol:
            # the gap is already small enough: hold mu and only restore
            # feasibility, since shrinking mu further degrades conditioning
            sigma = 1.0
            dX, dy, dZ = direction(mu, None)
        else:
            dX, dy, dZ = direction(sigma * mu, (dXa, dZa))
        ap, ad = steps(dX, dZ)
        history[-1].update(alpha_primal=ap, alpha_dual=ad, sigma=sigma)

        if ap < 1e-10 and ad < 1e-10:
            stalls += 1
            if stalls >= 3:
                cond = float((diag.max() / diag.min()) ** 2) if m else 1.0
                status = SolverStatus.NUMERICAL_FAILURE
                break
        else:
            stalls = 0
        X = [x + ap * dx for x, dx in zip(X, dX)]
        y = y + ad * dy
        Z = [z + ad * dz for z, dz in zip(Z, dZ)]
        if not all(np.all(np.isfinite(x)) for x in X + Z) or not np.all(np.isfinite(y)):
            status = SolverStatus.NUMERICAL_FAILURE
            break

    if status is SolverStatus.OPTIMAL:
        Xo, yo, Zo = unscale(X, y, Z)
        return SdpSolution(Xo, yo, Zo, pobj, dobj, gap, pres, dres, status,
                           iterations=it, history=history)
    _, _, Xb, yb, Zb, pobj, dobj, gap, pres, dres = best
    if status is SolverStatus.MAX_ITERATIONS:
        log.warning("SDP solver hit max_iter=%d (gap %.2e)", settings.max_iter, gap)
    else:
        log.warning("SDP solver numerical failure at iteration %d", it)
    return SdpSolution(Xb, yb, Zb, pobj, dobj, gap, pres, dres, status,
                       iterations=it, schur_condition=cond, history=history)


@dataclass
class CheckReport:
    """A-posteriori certificate check, recomputed from problem data only.

    Residuals are absolute max-norms; ``None`` where the primal part was
    not supplied.
    """

    primal_residual: float | None
    dual_residual: float
    primal_value: float | None
    dual_value: float
    gap: float | None
    primal_min_eigs: list | None
    dual_min_eigs: list
    tol: float

    @property
    def primal_feasible(self):
        if self.primal_residual is None:
            return None
        return self.primal_residual <= self.tol and min(self.primal_min_eigs) >= -self.tol

    @property
    def dual_feasible(self):
        return self.dual_residual <= self.tol and min(self.dual_min_eigs) >= -self.tol

    @property
    def passed(self):
        ok = self.dual_feasible
        if self.primal_residual is not None:
            ok = ok and self.primal_feasible and self.gap <= self.tol
        return ok


def _block_min_eig(n, x):
    if n > 0:
        return float(jacobi_eigen(x)[0][-1])
    return float(np.min(x)) if x.size else 0.0


def check_solution(p, s, tol=1e-8):
    """Independently recompute residuals, PSD margins and gap of ``s``."""
    if len(s.Z) != len(p.blocks) or np.shape(s.y) != (p.n_constraints,):
        raise ShapeMismatchError("solution does not match problem shape")
    for n, z in zip(p.blocks, s.Z):
        if np.shape(z) != ((n, n) if n > 0 else (-n,)):
            raise ShapeMismatchError("dual slack block shape mismatch")
    y = np.asarray(s.y, dtype=float)
    Z = [np.asarray(z, dtype=float) for z in s.Z]
    Aty = p.op_At(y)
    dres = max(float(np.max(np.abs(aty - z - c))) for c, aty, z in zip(p.C, Aty, Z))
    dobj = float(p.b @ y)
    dual_eigs = [_block_min_eig(n, z) for n, z in zip(p.blocks, Z)]
    if s.X is None:
        return CheckReport(None, dres, None, dobj, None, None, dual_eigs, tol)
    if len(s.X) != len(p.blocks):
        raise ShapeMismatchError("primal block count mismatch")
    for n, x in zip(p.blocks, s.X):
        if np.shape(x) != ((n, n) if n > 0 else (-n,)):
            raise ShapeMismatchError("primal block shape mismatch")
    X = [np.asarray(x, dtype=float) for x in s.X]
    pres = float(np.max(np.abs(p.b - p.op_A(X)))) if p.n_constraints else 0.0
    pobj = p.objective(X)
    gap = abs(dobj - pobj) / (1.0 + abs(pobj) + abs(dobj))
    primal_eigs = [_block_min_eig(n, x) for n, x in zip(p.blocks, X)]
    return CheckReport(pres, dres, pobj, dobj, gap, primal_eigs, dual_eigs, tol)


def lp_as_sdp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, check_rank=True):
    """Embed ``max c^T x  s.t.  A_ub x <= b_ub, A_eq x = b_eq, x >= 0``.

    Inequalities receive explicit slacks, so the result is a single
    diagonal block ``[x, slacks]``.
    """
    c = np.asarray(c, dtype=float).ravel()
    nv = c.size
    A_ub = np.zeros((0, nv)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, nv)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, nv)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, nv)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if A_ub.shape[0] != b_ub.size or A_eq.shape[0] != b_eq.size:
        raise ShapeMismatchError("constraint rows and rhs lengths differ")
    mu, me = A_ub.shape[0], A_eq.shape[0]
    A = np.zeros((mu + me, nv + mu))
    A[:mu, :nv] = A_ub
    A[:mu, nv:] = np.eye(mu)
    A[mu:, :nv] = A_eq
    C = np.concatenate([c, np.zeros(mu)])
    return SdpProblem([-(nv + mu)], [C], [A], np.concatenate([b_ub, b_eq]),
                      check_rank=check_rank)


# -- JSON ------------------------------------------------------------------

FORMAT = "packbound-sdp/1"


def _triplets(n, k, a):
    out = []
    if n > 0:
        rows, cols = np.tril_indices(n)
        vals = a[rows, cols]
        for i, j, v in zip(rows, cols, vals):
            if v != 0.0:
                out.append([k, int(i), int(j), float(v)])
    else:
        for i in np.flatnonzero(a):
            out.append([k, int(i), int(i), float(a[i])])
    return out


def problem_to_json(p):
    """Serialize to a plain dict; the schema is documented in the README."""
    objective = []
    for k, (n, c) in enumerate(zip(p.blocks, p.C)):
        objective += _triplets(n, k, c)
    constraints = []
    for i in range(p.n_constraints):
        entries = []
        for k, (n, a) in enumerate(zip(p.blocks, p.A)):
            entries += _triplets(n, k, a[i])
        constraints.append(entries)
    return {
        "format": FORMAT,
        "sense": "maximize",
        "blocks": list(p.blocks),
        "objective": objective,
        "constraints": constraints,
        "rhs": [float(v) for v in p.b],
    }


def problem_from_json(data, check_rank=True):
    if data.get("format", FORMAT) != FORMAT:
        raise ValueError(f"unsupported SDP format {data.get('format')!r}")
    blocks = [int(n) for n in data["blocks"]]
    rhs = np.asarray(data["rhs"], dtype=float)
    m = rhs.size
    if len(data["constraints"]) != m:
        raise ShapeMismatchError("constraint count differs from rhs length")
    C = [np.zeros((n, n)) if n > 0 else np.zeros(-n) for n in blocks]
    A = [np.zeros((m, n, n)) if n > 0 else np.zeros((m, -n)) for n in blocks]
    for k, i, j, v in data["objective"]:
        if blocks[k] > 0:
            C[k][max(i, j), min(i, j)] = v
        else:
            C[k][i] = v
    for r, entries in enumerate(data["constraints"]):
        for k, i, j, v in entries:
            if blocks[k] > 0:
                A[k][r, max(i, j), min(i, j)] = v
            else:
                A[k][r, i] = v
    return SdpProblem(blocks, C, A, rhs, check_rank=check_rank)


def _blocks_to_list(X):
    return None if X is None else [np.asarray(x).tolist() for x in X]


def solution_to_json(s):
    return {
        "format": "packbound-sdp-solution/1",
        "status": s.status.value,
        "primal_value": s.primal_value,
        "dual_value": s.dual_value,
        "gap": s.gap,
        "primal_residual": s.primal_residual,
        "dual_residual": s.dual_residual,
        "iterations": s.iterations,
        "X": _blocks_to_list(s.X),
        "y": [float(v) for v in s.y],
        "Z": _blocks_to_list(s.Z),
    }


def solution_from_json(data):
    X = data.get("X")
    return SdpSolution(
        X=None if X is None else [np.asarray(x, dtype=float) for x in X],
        y=np.asarray(data["y"], dtype=float),
        Z=[np.asarray(z, dtype=float) for z in data["Z"]],
        primal_value=float(data["primal_value"]),
        dual_value=float(data["dual_value"]),
        gap=float(data["gap"]),
        primal_residual=float(data["primal_residual"]),
        dual_residual=float(data["dual_residual"]),
        status=SolverStatus(data["status"]),
        iterations=int(data.get("iterations", 0)),
    )


def _encode(obj, indent, level):
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            json.dumps(str(k)) + ": " + _encode(obj[k], indent, level + 1)
            for k in sorted(obj, key=str)
        ]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + pad + ("," + pad).join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    if isinstance(obj, enum.Enum):
        return _encode(obj.value, indent, level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialize non-finite number {x}")
        text = f"{x:.17g}"
        # keep floats recognizable as floats on re-parse
        return text if any(ch in text for ch in ".eE") else text + ".0"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    return json.dumps(obj)


def dumps(obj, indent=1):
    """Deterministic JSON text: sorted keys, reals at 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"
