"""Generalized Laguerre polynomials and the scaled basis used by the sphere SDP.

Coefficient arrays are ascending (``c[i]`` multiplies ``x**i``). When the
parameter ``alpha`` is a :class:`fractions.Fraction` the coefficient
recurrences run in exact rational arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "laguerre_eval",
    "laguerre_coefficients",
    "laguerre_at_zero",
    "dimension_alpha",
    "LaguerreBasis",
]


def dimension_alpha(n):
    """Laguerre parameter ``n/2 - 1`` of the radial Fourier transform in R^n, exactly."""
    return Fraction(n, 2) - 1


def laguerre_eval(k, alpha, x):
    """Evaluate ``L_k^alpha(x)`` with the three-term recurrence.

    ``(j+1) L_{j+1} = (2j + 1 + alpha - x) L_j - (j + alpha) L_{j-1}``

    Parameters
    ----------
    k : int
        Degree, ``k >= 0``.
    alpha : float
        Parameter, ``alpha > -1``.
    x : float or numpy.ndarray

    Returns
    -------
    float or numpy.ndarray
    """
    if k < 0:
        raise ValueError("degree must be nonnegative")
    alpha = float(alpha)
    if not alpha > -1:
        raise ValueError("alpha must exceed -1")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1)
    return cur if cur.ndim else float(cur)


@lru_cache(maxsize=None)
def _coefficients_exact(k, alpha):
    prev = [Fraction(1)]
    if k == 0:
        return tuple(prev)
    cur = [1 + alpha, Fraction(-1)]
    for j in range(1, k):
        nxt = [Fraction(0)] * (j + 2)
        for i, c in enumerate(cur):
            nxt[i] += (2 * j + 1 + alpha) * c
            nxt[i + 1] -= c
        for i, c in enumerate(prev):
            nxt[i] -= (j + alpha) * c
        prev, cur = cur, [c / (j + 1) for c in nxt]
    return tuple(cur)


def laguerre_coefficients(k, alpha):
    """Ascending monomial coefficients of ``L_k^alpha``, built by the recurrence.

    Exact ``Fraction`` values for rational ``alpha``, floats otherwise.
    """
    if isinstance(alpha, (int, Fraction)):
        return list(_coefficients_exact(k, Fraction(alpha)))
    alpha = float(alpha)
    prev = np.array([1.0])
    if k == 0:
        return prev
    cur = np.array([1.0 + alpha, -1.0])
    for j in range(1, k):
        nxt = np.zeros(j + 2)
        nxt[: j + 1] += (2 * j + 1 + alpha) * cur
        nxt[1:] -= cur
        nxt[:j] -= (j + alpha) * prev
        prev, cur = cur, nxt / (j + 1)
    return cur


def laguerre_at_zero(k, alpha):
    """``L_k^alpha(0) = binomial(k + alpha, k)``."""
    out = 1.0
    for j in range(1, k + 1):
        out *= (alpha + j) / j
    return out


@lru_cache(maxsize=None)
def _to_laguerre(mono, alpha):
    """Convert exact ascending monomial coefficients to the Laguerre basis."""
    mono = list(mono)
    out = [Fraction(0)] * len(mono)
    for k in range(len(mono) - 1, -1, -1):
        if mono[k] == 0:
            continue
        lk = _coefficients_exact(k, alpha)
        c = mono[k] / lk[k]
        out[k] = c
        for i in range(k + 1):
            mono[i] -= c * lk[i]
    return tuple(out)


@lru_cache(maxsize=None)
def _product_in_laguerre(i, j, alpha):
    """Exact linearization ``L_i L_j = sum_k c_k L_k``."""
    a = _coefficients_exact(i, alpha)
    b = _coefficients_exact(j, alpha)
    mono = [Fraction(0)] * (i + j + 1)
    for p, x in enumerate(a):
        for q, y in enumerate(b):
            mono[p + q] += x * y
    return _to_laguerre(tuple(mono), alpha)


class LaguerreBasis:
    """Scaled Laguerre basis ``P_k(s) = mu_k^{-1} L_k^{n/2-1}(2 pi s)``, ``k <= degree``.

    ``mu_k`` is the largest absolute monomial coefficient of
    ``L_k^{n/2-1}(2 pi t)`` in ``t``. Here the variable ``s`` stands for the
    squared radius, so ``P_k`` has degree ``k`` in ``s``.
    """

    def __init__(self, n, degree):
        if n < 1 or degree < 0:
            raise ValueError("need n >= 1 and degree >= 0")
        self.n = int(n)
        self.degree = int(degree)
        self.alpha_exact = dimension_alpha(n)
        self.alpha = float(self.alpha_exact)
        mu = []
        mono = []
        for k in range(self.degree + 1):
            c = np.array([float(v) for v in _coefficients_exact(k, self.alpha_exact)])
            c = c * (2.0 * math.pi) ** np.arange(k + 1)
            m = float(np.max(np.abs(c)))
            mu.append(m)
            mono.append(c / m)
        self.mu = np.array(mu)
        self._mono = mono

    def monomial_coefficients(self, k):
        """Ascending coefficients of ``P_k`` in ``s``."""
        return self._mono[k].copy()

    def to_monomial(self, coeffs):
        """Map coefficients in the ``P`` basis to monomial coefficients in ``s``."""
        coeffs = np.asarray(coeffs, dtype=float)
        out = np.zeros(coeffs.size)
        for k, c in enumerate(coeffs):
            out[: k + 1] += c * self._mono[k]
        return out

    def values_at_zero(self):
        return np.array(
            [laguerre_at_zero(k, self.alpha) for k in range(self.degree + 1)]
        ) / self.mu

    def evaluate(self, coeffs, s):
        """``sum_k coeffs[k] P_k(s)`` via the Laguerre recurrence."""
        s = np.asarray(s, dtype=float)
        x = 2.0 * math.pi * s
        out = np.zeros_like(x)
        for k, c in enumerate(coeffs):
            if c != 0:
                out = out + c * laguerre_eval(k, self.alpha, x) / self.mu[k]
        return out

    def product(self, i, j):
        """Coefficients of ``P_i P_j`` in the ``P`` basis (length ``i + j + 1``)."""
        c = _product_in_laguerre(min(i, j), max(i, j), self.alpha_exact)
        return np.array([float(v) for v in c]) * self.mu[: i + j + 1] / (self.mu[i] * self.mu[j])

    def times_s(self, coeffs):
        """Multiply by ``s`` in the ``P`` basis; the result has one more entry."""
        coeffs = np.asarray(coeffs, dtype=float)
        a = self.alpha
        mu = self.mu
        K = coeffs.size
        if K > self.degree:
            raise ValueError("product exceeds basis degree")
        out = np.zeros(K + 1)
        for k, c in enumerate(coeffs):
            if c == 0:
                continue
            out[k + 1] -= (k + 1) * c * mu[k + 1] / mu[k]
            out[k] += (2 * k + a + 1) * c
            if k:
                out[k - 1] -= (k + a) * c * mu[k - 1] / mu[k]
        return out / (2.0 * math.pi)
