"""Dense real symmetric linear algebra.

Small, dependency-light routines used to certify positive semidefiniteness
of SDP blocks and kernels: a semidefinite-aware Cholesky factorization, a
cyclic Jacobi eigensolver and the PSD predicate built on top of them.
All tolerances are relative to the largest absolute entry of the input.
"""

from __future__ import annotations

import numpy as np

from .errors import NonConvergenceError, NotPsdError

__all__ = [
    "SymMatrix",
    "cholesky",
    "jacobi_eigen",
    "is_psd",
    "min_eigenvalue",
    "dump_rows",
]

JACOBI_MAX_SWEEPS = 60


class SymMatrix:
    """Real symmetric matrix stored as its packed lower triangle.

    Only entries ``(i, j)`` with ``i >= j`` are kept, so the matrix cannot
    become asymmetric. Instances are immutable.

    Parameters
    ----------
    order : int
        Matrix order, at least 1.
    packed : array_like
        Lower triangle in row-major order, ``order * (order + 1) // 2``
        finite values.
    """

    __slots__ = ("_order", "_packed")

    def __init__(self, order, packed):
        order = int(order)
        if order < 1:
            raise ValueError("SymMatrix order must be >= 1")
        packed = np.array(packed, dtype=float).ravel()
        if packed.size != order * (order + 1) // 2:
            raise ValueError(
                f"expected {order * (order + 1) // 2} packed entries, got {packed.size}"
            )
        if not np.all(np.isfinite(packed)):
            raise ValueError("SymMatrix entries must be finite")
        packed.setflags(write=False)
        self._order = order
        self._packed = packed

    @classmethod
    def from_dense(cls, a):
        """Build from a square array, reading the lower triangle only."""
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        rows, cols = np.tril_indices(a.shape[0])
        return cls(a.shape[0], a[rows, cols])

    @classmethod
    def identity(cls, order):
        return cls.from_dense(np.eye(order))

    @classmethod
    def diag(cls, values):
        return cls.from_dense(np.diag(np.asarray(values, dtype=float)))

    @property
    def order(self):
        return self._order

    @property
    def packed(self):
        return self._packed

    def __getitem__(self, index):
        i, j = index
        if i < j:
            i, j = j, i
        if not (0 <= j <= i < self._order):
            raise IndexError(index)
        return float(self._packed[i * (i + 1) // 2 + j])

    def dense(self):
        n = self._order
        out = np.zeros((n, n))
        rows, cols = np.tril_indices(n)
        out[rows, cols] = self._packed
        out[cols, rows] = self._packed
        return out

    def __array__(self, dtype=None, copy=None):
        out = self.dense()
        return out if dtype is None else out.astype(dtype)

    def max_abs(self):
        return float(np.max(np.abs(self._packed)))

    def scaled(self, s):
        return SymMatrix(self._order, s * self._packed)

    def __add__(self, other):
        if not isinstance(other, SymMatrix) or other.order != self.order:
            return NotImplemented
        return SymMatrix(self._order, self._packed + other._packed)

    def __sub__(self, other):
        if not isinstance(other, SymMatrix) or other.order != self.order:
            return NotImplemented
        return SymMatrix(self._order, self._packed - other._packed)

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self._order == other._order and np.array_equal(self._packed, other._packed)

    def __hash__(self):
        return hash((self._order, self._packed.tobytes()))

    def __repr__(self):
        return f"SymMatrix(order={self._order})"


def _as_dense(a):
    if isinstance(a, SymMatrix):
        return a.dense()
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    # lower triangle is authoritative, as for SymMatrix
    return np.tril(a) + np.tril(a, -1).T


def cholesky(a, tol=1e-12):
    """Semidefinite Cholesky factorization ``a = L L^T``.

    Pivots in ``[-tol*scale, tol*scale]`` (``scale`` the largest absolute
    entry) are treated as zero, in which case the remaining column must
    vanish as well; this lets singular PSD matrices factor.

    Parameters
    ----------
    a : SymMatrix or array_like
    tol : float
        Relative pivot tolerance, ``tol >= 0``.

    Returns
    -------
    numpy.ndarray
        Lower-triangular factor.

    Raises
    ------
    NotPsdError
        If a pivot is below ``-tol*scale`` or a zero pivot has a nonzero
        column (a 2x2 minor with a negative eigenvalue).
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    work = _as_dense(a).copy()
    n = work.shape[0]
    scale = float(np.max(np.abs(work))) or 1.0
    zero_tol = tol * scale
    # a PSD matrix with pivot <= zero_tol has off-diagonal entries of at most
    # sqrt(zero_tol * max_diag) in that column
    col_tol = np.sqrt(zero_tol * scale) + zero_tol
    L = np.zeros((n, n))
    for j in range(n):
        pivot = work[j, j]
        if pivot < -zero_tol:
            raise NotPsdError(j, pivot)
        col = work[j + 1 :, j]
        if pivot <= zero_tol:
            if col.size and np.max(np.abs(col)) > col_tol:
                i = int(np.argmax(np.abs(col)))
                c = col[i]
                d = work[j + 1 + i, j + 1 + i]
                p = max(pivot, 0.0)
                lam = 0.5 * (p + d - np.hypot(p - d, 2.0 * c))
                raise NotPsdError(j, min(lam, -zero_tol * 2))
            continue
        root = np.sqrt(pivot)
        L[j, j] = root
        L[j + 1 :, j] = col / root
        v = L[j + 1 :, j]
        work[j + 1 :, j + 1 :] -= np.outer(v, v)
    return L


def _off_norm(A):
    return float(np.linalg.norm(A - np.diag(np.diag(A))))


def jacobi_eigen(a, tol=1e-14, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigen-decomposition by cyclic Jacobi rotations.

    Returns
    -------
    eigenvalues : numpy.ndarray
        In descending order.
    eigenvectors : numpy.ndarray
        Orthonormal columns matching ``eigenvalues``.

    Raises
    ------
    NonConvergenceError
        If the off-diagonal mass is still above ``tol * ||a||_F`` after
        ``max_sweeps`` sweeps.
    """
    A = _as_dense(a).copy()
    n = A.shape[0]
    V = np.eye(n)
    norm = np.linalg.norm(A)
    target = tol * norm
    if n > 1 and norm > 0:
        for _ in range(max_sweeps):
            off = _off_norm(A)
            if off <= target:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    if abs(apq) <= 1e-300 or abs(apq) < 1e-3 * target / n:
                        continue
                    tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                    c = 1.0 / np.hypot(1.0, t)
                    s = t * c
                    ap = A[:, p].copy()
                    aq = A[:, q]
                    A[:, p] = c * ap - s * aq
                    A[:, q] = s * ap + c * aq
                    ap = A[p, :].copy()
                    aq = A[q, :]
                    A[p, :] = c * ap - s * aq
                    A[q, :] = s * ap + c * aq
                    A[p, q] = A[q, p] = 0.0
                    vp = V[:, p].copy()
                    vq = V[:, q]
                    V[:, p] = c * vp - s * vq
                    V[:, q] = s * vp + c * vq
        else:
            off = _off_norm(A)
            if off > target:
                raise NonConvergenceError(
                    f"Jacobi: off-diagonal norm {off:.3e} after {max_sweeps} sweeps"
                )
    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]


def is_psd(a, tol=1e-9):
    """True iff :func:`cholesky` succeeds at relative tolerance ``tol``."""
    try:
        cholesky(a, tol)
    except NotPsdError:
        return False
    return True


def min_eigenvalue(a):
    """Smallest eigenvalue, via :func:`jacobi_eigen`."""
    return float(jacobi_eigen(a)[0][-1])


def dump_rows(a):
    """Plain-text rows at 17 significant digits, for debugging."""
    A = _as_dense(a)
    return "\n".join(" ".join(f"{x:.17g}" for x in row) for row in A) + "\n"
