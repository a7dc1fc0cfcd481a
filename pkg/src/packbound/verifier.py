"""Grid verification of density certificates for packings of N ball types.

A certificate is a symmetric matrix of radial functions ``f_ij`` given by
Fourier-side polynomials ``p_ij``. It certifies the density bound
``max_i f_ii(0)`` when

(i)   ``f_ij(r) <= 0`` for ``r >= r_i + r_j``,
(ii)  ``(p_ij(0)) - (sqrt(vol K_i) sqrt(vol K_j))`` is PSD,
(iii) ``(p_ij(t))`` is PSD for every ``t >= 0``.

All three are checked on finite grids in floating point. The time-domain
values come from :func:`packbound.cohn_elkies.transform_value`; nothing
here touches solver state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cohn_elkies import RadialFunction, ball_volume, transform_value
from .errors import NotCertifiedError, ShapeMismatchError

__all__ = [
    "SphereSystem",
    "MatrixRadialFunction",
    "GridSettings",
    "VerificationReport",
    "verify_conditions",
    "density_bound_from_f",
]


@dataclass(frozen=True)
class SphereSystem:
    n: int
    radii: tuple

    def __init__(self, n, radii=(1.0,)):
        radii = tuple(float(r) for r in radii)
        if n < 1 or not radii:
            raise ValueError("need n >= 1 and at least one radius")
        if not all(math.isfinite(r) and r > 0 for r in radii):
            raise ValueError("radii must be finite and positive")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "radii", radii)

    @property
    def N(self):
        return len(self.radii)

    @property
    def volumes(self):
        v = ball_volume(self.n)
        return np.array([v * r**self.n for r in self.radii])


@dataclass(frozen=True)
class MatrixRadialFunction:
    """``coeffs[i, j, k]`` is the coefficient of ``t^(2k)`` in ``p_ij``."""

    n: int
    coeffs: np.ndarray

    def __init__(self, n, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim == 1:
            c = c.reshape(1, 1, -1)
        if c.ndim != 3 or c.shape[0] != c.shape[1] or c.shape[2] < 1:
            raise ShapeMismatchError(f"coefficients must have shape (N, N, d+1), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if not np.array_equal(c, c.transpose(1, 0, 2)):
            raise ValueError("p_ij must equal p_ji coefficientwise")
        c.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_radial(cls, f):
        return cls(f.n, np.asarray(f.a).reshape(1, 1, -1))

    @property
    def N(self):
        return self.coeffs.shape[0]

    @property
    def degree(self):
        return self.coeffs.shape[2] - 1

    def entry(self, i, j):
        return RadialFunction(self.n, self.coeffs[i, j])

    def to_json(self):
        if self.N == 1:
            return {"n": self.n, "d": self.degree, "N": 1, "a": self.coeffs[0, 0].tolist()}
        return {"n": self.n, "d": self.degree, "N": self.N, "a": self.coeffs.tolist()}

    @classmethod
    def from_json(cls, data):
        N = int(data.get("N", 1))
        a = np.asarray(data["a"], dtype=float)
        if N == 1 and a.ndim == 1:
            a = a.reshape(1, 1, -1)
        if a.shape[:2] != (N, N):
            raise ShapeMismatchError(f"'a' does not hold {N}x{N} coefficient lists")
        if "d" in data and a.shape[2] != int(data["d"]) + 1:
            raise ShapeMismatchError("'d' does not match coefficient list length")
        return cls(int(data["n"]), a)


@dataclass(frozen=True)
class GridSettings:
    points: int = 4096
    tol: float = 1e-6
    range_scale: float = 10.0


def _time_domain(n, coeffs, r):
    out = np.zeros_like(r)
    for k, c in enumerate(coeffs):
        if c != 0:
            out = out + c * transform_value(n, k, r)
    return out


def _poly_in_t2(coeffs, t):
    s = t * t
    out = np.zeros_like(s)
    for c in coeffs[::-1]:
        out = out * s + c
    return out


@dataclass
class VerificationReport:
    """Margins of the three conditions; floating-point grid checks only."""

    separation_margin: float  # max f_ij(r) on r >= r_i + r_j, must be <= tol
    volume_margin: float  # min eigenvalue of fhat(0) - W', must be >= -tol
    positivity_margin: float  # min over t of min eigenvalue of (p_ij(t)), must be >= -tol
    pair_separation: dict
    tol: float
    points: int
    note: str = "floating-point grid check, not interval-certified"

    @property
    def condition_i(self):
        return self.separation_margin <= self.tol

    @property
    def condition_ii(self):
        return self.volume_margin >= -self.tol

    @property
    def condition_iii(self):
        return self.positivity_margin >= -self.tol

    @property
    def certified(self):
        return self.condition_i and self.condition_ii and self.condition_iii

    def to_json(self):
        return {
            "certified": self.certified,
            "separation_margin": self.separation_margin,
            "volume_margin": self.volume_margin,
            "positivity_margin": self.positivity_margin,
            "pair_separation": {f"{i},{j}": v for (i, j), v in self.pair_separation.items()},
            "tol": self.tol,
            "points": self.points,
            "note": self.note,
        }


def verify_conditions(f, sys, grid=None):
    """Check the three certificate conditions of ``f`` for ``sys`` on grids."""
    grid = grid or GridSettings()
    if isinstance(f, RadialFunction):
        f = MatrixRadialFunction.from_radial(f)
    if f.n != sys.n or f.N != sys.N:
        raise ShapeMismatchError(
            f"function is for n={f.n}, N={f.N}; system has n={sys.n}, N={sys.N}"
        )
    N = f.N
    base = grid.range_scale * math.sqrt(max(f.degree, 1))
    pair = {}
    for i in range(N):
        for j in range(i, N):
            sep = sys.radii[i] + sys.radii[j]
            r = np.linspace(sep, base * max(1.0, sep), grid.points)
            pair[(i, j)] = float(np.max(_time_domain(f.n, f.coeffs[i, j], r)))
    sqrt_vol = np.sqrt(sys.volumes)
    F0 = f.coeffs[:, :, 0] - np.outer(sqrt_vol, sqrt_vol)
    volume_margin = float(np.linalg.eigvalsh(F0)[0])
    t_max = base * max(1.0, 2.0 * max(sys.radii))
    t = np.linspace(0.0, t_max, grid.points)
    P = np.empty((grid.points, N, N))
    for i in range(N):
        for j in range(N):
            P[:, i, j] = _poly_in_t2(f.coeffs[i, j], t)
    positivity = float(np.min(np.linalg.eigvalsh(P)[:, 0]))
    return VerificationReport(
        max(pair.values()), volume_margin, positivity, pair, grid.tol, grid.points
    )


def density_bound_from_f(f, sys, grid=None):
    """``max_i f_ii(0)`` after a passing :func:`verify_conditions`.

    Raises
    ------
    NotCertifiedError
        If any margin is outside tolerance.
    """
    report = verify_conditions(f, sys, grid)
    if not report.certified:
        failed = [
            name
            for name, ok in (("i", report.condition_i), ("ii", report.condition_ii),
                             ("iii", report.condition_iii))
            if not ok
        ]
        raise NotCertifiedError(f"conditions {', '.join(failed)} fail at tol {report.tol:g}")
    if isinstance(f, RadialFunction):
        f = MatrixRadialFunction.from_radial(f)
    zero = np.zeros(1)
    return max(float(_time_domain(f.n, f.coeffs[i, i], zero)[0]) for i in range(f.N))
