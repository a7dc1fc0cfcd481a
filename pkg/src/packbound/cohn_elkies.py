"""Sphere-packing density bounds from radial auxiliary functions.

A candidate function is given on the Fourier side as
``fhat(u) = p(|u|) exp(-pi |u|^2)`` with an even polynomial
``p(t) = sum_k a_{2k} t^{2k}``. It yields the density bound ``f(0)`` for
unit-ball packings when

* ``f(x) <= 0`` for ``|x| >= 2``,
* ``fhat(0) = p(0) >= vol B_n``,
* ``fhat >= 0`` everywhere.

The search for ``p`` is a small SDP: both sign conditions become
sum-of-squares identities in ``s = t^2`` whose coefficients are matched in
a test basis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import DegreeTooSmallError, SolverFailure, VerificationFailed
from .laguerre import LaguerreBasis, laguerre_at_zero, laguerre_coefficients, laguerre_eval
from .sdp import SdpProblem, SolverSettings, solve

__all__ = [
    "Basis",
    "RadialFunction",
    "SphereSettings",
    "SphereReport",
    "SphereSdp",
    "ball_volume",
    "transform_value",
    "eval_f",
    "eval_fhat",
    "build_sphere_sdp",
    "sphere_bound",
]

SEPARATION = 2.0


class Basis(enum.Enum):
    MONOMIAL = "monomial"
    LAGUERRE = "laguerre"


def ball_volume(n):
    """Volume of the unit ball in R^n, ``pi^(n/2) / Gamma(n/2 + 1)``."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return math.exp(0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0))


def transform_value(n, k, r):
    """Radial profile of the inverse transform of ``|u|^(2k) exp(-pi |u|^2)``.

    Equals ``k! pi^-k exp(-pi r^2) L_k^{n/2-1}(pi r^2)``.
    """
    r = np.asarray(r, dtype=float)
    x = math.pi * r * r
    scale = math.exp(math.lgamma(k + 1) - k * math.log(math.pi))
    out = scale * np.exp(-x) * laguerre_eval(k, 0.5 * n - 1.0, x)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class RadialFunction:
    """Auxiliary function given by the even polynomial ``p``.

    ``a[k]`` is the coefficient of ``t^(2k)`` in ``p``.
    """

    n: int
    a: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        if self.n < 1 or not self.a:
            raise ValueError("need n >= 1 and at least one coefficient")
        if not all(math.isfinite(v) for v in self.a):
            raise ValueError("coefficients must be finite")

    @property
    def degree(self):
        return len(self.a) - 1

    def value_at_zero(self):
        """``f(0) = sum_k a_2k k! pi^-k L_k(0)``."""
        alpha = 0.5 * self.n - 1.0
        return float(sum(
            c * math.exp(math.lgamma(k + 1) - k * math.log(math.pi)) * laguerre_at_zero(k, alpha)
            for k, c in enumerate(self.a)
        ))

    def to_json(self):
        return {"n": self.n, "d": self.degree, "a": list(self.a)}

    @classmethod
    def from_json(cls, data):
        f = cls(int(data["n"]), data["a"])
        if "d" in data and int(data["d"]) != f.degree:
            raise ValueError("'d' does not match the number of coefficients")
        return f


def eval_fhat(f, t):
    """``p(t) exp(-pi t^2)``."""
    t = np.asarray(t, dtype=float)
    return eval_p(f, t) * np.exp(-math.pi * t * t)


def eval_p(f, t):
    t = np.asarray(t, dtype=float)
    s = t * t
    out = np.zeros_like(s)
    for c in reversed(f.a):
        out = out * s + c
    return out if out.ndim else float(out)


def eval_f(f, r):
    """``f(r) = sum_k a_2k transform_value(n, k, r)``."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    for k, c in enumerate(f.a):
        if c != 0:
            out = out + c * transform_value(f.n, k, r)
    return out if out.ndim else float(out)


# -- SDP model -------------------------------------------------------------


class _MonomialTest:
    """Identity matching on monomial coefficients in ``s``."""

    def __init__(self, n, d):
        self.n, self.d = n, d
        alpha = 0.5 * n - 1.0
        self.k_fact = np.array(
            [math.exp(math.lgamma(k + 1) - k * math.log(math.pi)) for k in range(d + 1)]
        )
        # inverse transform of s^k as a polynomial in s (Gaussian factor dropped)
        G = np.zeros((d + 1, d + 1))
        for k in range(d + 1):
            c = np.array([float(v) for v in laguerre_coefficients(k, alpha)])
            G[: k + 1, k] = self.k_fact[k] * c * math.pi ** np.arange(k + 1)
        self.transform = G
        self.at_zero = np.eye(d + 1)[0]
        self.f_at_zero = G[0]

    def product(self, i, j):
        out = np.zeros(i + j + 1)
        out[-1] = 1.0
        return out

    def times_s(self, c):
        return np.concatenate([[0.0], c])

    def p_to_monomial(self, coeffs):
        return np.asarray(coeffs, dtype=float)


class _LaguerreTest:
    """Identity matching in the scaled Laguerre basis.

    In this basis the radial Fourier transform is diagonal:
    ``L_k(2 pi |u|^2) exp(-pi |u|^2)`` transforms into
    ``(-1)^k L_k(2 pi |x|^2) exp(-pi |x|^2)``.
    """

    def __init__(self, n, d):
        self.n, self.d = n, d
        self.basis = LaguerreBasis(n, d)
        sign = (-1.0) ** np.arange(d + 1)
        self.transform = np.diag(sign)
        self.at_zero = self.basis.values_at_zero()
        self.f_at_zero = sign * self.at_zero

    def product(self, i, j):
        return self.basis.product(i, j)

    def times_s(self, c):
        return self.basis.times_s(c)

    def p_to_monomial(self, coeffs):
        return self.basis.to_monomial(coeffs)


@dataclass
class SphereSdp:
    """An assembled sphere SDP plus what is needed to read ``p`` back."""

    problem: SdpProblem
    n: int
    d: int
    basis: Basis
    block_names: list
    p_maps: list = field(repr=False)
    test: object = field(repr=False)

    def p_coefficients(self, X):
        """Coefficients of ``p`` (in the test basis) from the primal blocks."""
        out = np.zeros(self.d + 1)
        for name, Pm, x in zip(self.block_names, self.p_maps, X):
            if Pm is not None:
                out += Pm.reshape(self.d + 1, -1) @ np.ravel(x)
        return out

    def radial_function(self, X):
        a = self.test.p_to_monomial(self.p_coefficients(X))
        return RadialFunction(self.n, a)


def _gram_map(test, d, orders, shift):
    """Linear map from a Gram block to test-basis coefficients.

    Returns an array of shape ``(d + 1, order, order)``; ``shift`` is a list
    of polynomial factors (``'s'`` or ``'s-4'``) applied to ``b_i b_j``.
    """
    n = orders
    out = np.zeros((d + 1, n, n))
    for i in range(n):
        for j in range(i + 1):
            c = test.product(i, j)
            for op in shift:
                if op == "s":
                    c = test.times_s(c)
                elif op == "s-4":
                    c = test.times_s(c) - SEPARATION**2 * np.concatenate([c, [0.0]])
            out[: c.size, i, j] += c
            if i != j:
                out[: c.size, j, i] += c
    # symmetric Gram contributions: <G, X> = sum_ij G_ij X_ij counts (i,j) and (j,i)
    # once each, matching b^T X b
    return out


def build_sphere_sdp(n, d, basis=Basis.LAGUERRE):
    """Assemble the sphere-packing SDP for dimension ``n`` and degree ``d``.

    Unknowns are PSD Gram blocks in ``s = t^2``::

        p(s)  = Q_e(s) + s Q_o(s)                       (fhat >= 0)
        -g(s) = R_e(s) + s R_o(s)
                + (s - 4) (S_e(s) + s S_o(s))           (f <= 0 for s >= 4)

    where ``g(s) = exp(pi s) f(sqrt s)`` and ``Q_e(s) = v(s)^T Q_e v(s)`` etc.
    Each identity is matched coefficientwise in the test basis, and
    ``p(0) - slack = vol B_n``. The objective is ``-f(0)`` (maximized).
    """
    if d < 2:
        raise DegreeTooSmallError(f"degree d = {d} < 2 leaves the S block empty")
    if n < 1:
        raise ValueError("dimension must be >= 1")
    basis = Basis(basis)
    test = _MonomialTest(n, d) if basis is Basis.MONOMIAL else _LaguerreTest(n, d)
    e_order = d // 2 + 1
    o_order = (d - 1) // 2 + 1
    se_order = (d - 2) // 2 + 1
    so_order = (d - 3) // 2 + 1 if d >= 3 else 0

    specs = [
        ("Q_e", e_order, [], True),
        ("Q_o", o_order, ["s"], True),
        ("R_e", e_order, [], False),
        ("R_o", o_order, ["s"], False),
        ("S_e", se_order, ["s-4"], False),
    ]
    if so_order:
        specs.append(("S_o", so_order, ["s", "s-4"], False))

    m = d + 2
    blocks, C, A, names, p_maps = [], [], [], [], []
    for name, order, shift, is_p in specs:
        G = _gram_map(test, d, order, shift)
        a = np.zeros((m, order, order))
        if is_p:
            # identity rows see p through the transform: g = T p
            a[: d + 1] = np.tensordot(test.transform, G, axes=1)
            a[d + 1] = np.tensordot(test.at_zero, G, axes=1)
            c = -np.tensordot(test.f_at_zero, G, axes=1)
            p_maps.append(G)
        else:
            a[: d + 1] = G
            c = np.zeros((order, order))
            p_maps.append(None)
        blocks.append(order)
        C.append(c)
        A.append(a)
        names.append(name)
    # slack for p(0) >= vol B_n
    blocks.append(-1)
    C.append(np.zeros(1))
    slack = np.zeros((m, 1))
    slack[d + 1, 0] = -1.0
    A.append(slack)
    names.append("slack")
    p_maps.append(None)

    b = np.zeros(m)
    b[d + 1] = ball_volume(n)
    problem = SdpProblem(blocks, C, A, b)
    return SphereSdp(problem, n, d, basis, names, p_maps, test)


@dataclass(frozen=True)
class SphereSettings:
    solver: SolverSettings = SolverSettings()
    grid_points: int = 2048
    t_max: float | None = None
    r_max: float | None = None
    tol: float = 1e-6

    def ranges(self, d):
        default = 10.0 * math.sqrt(d)
        return (self.t_max or default, self.r_max or default)


@dataclass
class SphereReport:
    """Post-hoc floating-point grid checks (not a rigorous certificate)."""

    min_p: float
    max_f_outside: float
    a0_margin: float
    t_max: float
    r_max: float
    grid_points: int
    tol: float
    solver_status: str
    primal_value: float
    dual_value: float
    gap: float
    primal_residual: float
    dual_residual: float
    iterations: int
    note: str = "floating-point grid check, not interval-certified"

    @property
    def passed(self):
        return (
            self.min_p >= -self.tol
            and self.max_f_outside <= self.tol
            and self.a0_margin >= -self.tol
        )

    def to_json(self):
        out = dict(self.__dict__)
        out["passed"] = self.passed
        return out

    @classmethod
    def from_json(cls, data):
        names = [f.name for f in fields(cls)]
        return cls(**{k: data[k] for k in names if k in data})


def grid_check(f, d, settings):
    t_max, r_max = settings.ranges(d)
    t = np.linspace(0.0, t_max, settings.grid_points)
    r = np.linspace(SEPARATION, r_max, settings.grid_points)
    return (
        float(np.min(eval_p(f, t))),
        float(np.max(eval_f(f, r))),
        f.a[0] - ball_volume(f.n),
        t_max,
        r_max,
    )


def sphere_bound(n, d, settings=None, basis=Basis.LAGUERRE):
    """Solve the sphere SDP and verify the resulting function on grids.

    Returns
    -------
    bound : float
        ``f(0)`` of the solved function.
    f : RadialFunction
    report : SphereReport

    Raises
    ------
    SolverFailure
        If the SDP does not reach an optimal status.
    VerificationFailed
        If the solved function violates a grid check at ``settings.tol``.
    """
    settings = settings or SphereSettings()
    model = build_sphere_sdp(n, d, basis)
    sol = solve(model.problem, settings.solver)
    if not sol.optimal:
        raise SolverFailure(sol)
    f = model.radial_function(sol.X)
    min_p, max_f, a0_margin, t_max, r_max = grid_check(f, d, settings)
    report = SphereReport(
        min_p, max_f, a0_margin, t_max, r_max, settings.grid_points, settings.tol,
        sol.status.value, -sol.primal_value, -sol.dual_value, sol.gap,
        sol.primal_residual, sol.dual_residual, sol.iterations,
    )
    if not report.passed:
        raise VerificationFailed(report)
    return f.value_at_zero(), f, report
