import math

import numpy as np
import pytest
from scipy import integrate, special

from packbound.cohn_elkies import (
    Basis,
    RadialFunction,
    SphereReport,
    SphereSettings,
    ball_volume,
    build_sphere_sdp,
    eval_f,
    eval_fhat,
    eval_p,
    sphere_bound,
)
from packbound.errors import DegreeTooSmallError, PackboundError, SolverFailure
from packbound.laguerre import laguerre_at_zero
from packbound.sdp import SolverSettings, solve
from packbound.verifier import GridSettings, SphereSystem, verify_conditions

E8_DENSITY = math.pi**4 / 384
FCC_DENSITY = math.pi / math.sqrt(18)

KNOWN_SHORTFALL = (
    "the fixed-width Gaussian class optimum lies above this bracket; "
    "see the acceptance suite and the decisions ledger"
)
MONOMIAL_RECOVERS = "the monomial program happens to converge to the right optimum at this degree"


class TestBallVolume:
    def test_small_dimensions(self):
        assert ball_volume(1) == pytest.approx(2.0, rel=1e-15)
        assert ball_volume(2) == pytest.approx(math.pi, rel=1e-15)
        assert ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-15)
        assert ball_volume(8) == pytest.approx(math.pi**4 / 24, rel=1e-14)

    def test_recursion(self):
        for n in range(3, 30):
            assert ball_volume(n) == pytest.approx(2 * math.pi / n * ball_volume(n - 2), rel=1e-13)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            ball_volume(0)


def numeric_inverse(f, r):
    """Radial inverse transform of eval_fhat by quadrature (r > 0)."""
    n = f.n
    nu = n / 2 - 1

    def integrand(rho):
        return rho ** (n / 2) * special.jv(nu, 2 * math.pi * r * rho) * eval_fhat(f, rho)

    val, _ = integrate.quad(integrand, 0, 14, limit=500, epsabs=1e-13, epsrel=1e-12)
    return 2 * math.pi * r ** (-nu) * val


class TestRadialFunction:
    def test_gaussian(self):
        f = RadialFunction(3, [1.0])
        r = np.linspace(0, 3, 7)
        assert np.allclose(eval_f(f, r), np.exp(-math.pi * r * r), atol=1e-16)
        assert eval_p(f, 0.7) == 1.0

    def test_value_at_zero_closed_form(self, rng):
        for n in (1, 3, 8):
            a = rng.standard_normal(6)
            f = RadialFunction(n, a)
            alpha = n / 2 - 1
            closed = sum(
                c * math.factorial(k) * math.pi**-k * special.binom(k + alpha, k) for k, c in enumerate(a)
            )
            assert f.value_at_zero() == pytest.approx(closed, rel=1e-12)
            assert eval_f(f, 0.0) == pytest.approx(closed, rel=1e-12)
            assert laguerre_at_zero(2, alpha) == pytest.approx(special.binom(2 + alpha, 2))

    def test_fourier_pair(self, rng):
        for n in (1, 2, 3):
            for d in (2, 4, 6):
                f = RadialFunction(n, rng.standard_normal(d + 1) / np.arange(1, d + 2))
                for r in (0.25, 1.0, 2.2, 4.0):
                    assert eval_f(f, r) == pytest.approx(numeric_inverse(f, r), abs=1e-7)

    def test_json(self):
        f = RadialFunction(8, [1.5, -0.25, 1e-3])
        assert RadialFunction.from_json(f.to_json()) == f
        with pytest.raises(ValueError):
            RadialFunction.from_json({"n": 8, "d": 5, "a": [1.0]})

    def test_validation(self):
        with pytest.raises(ValueError):
            RadialFunction(0, [1.0])
        with pytest.raises(ValueError):
            RadialFunction(2, [])


class TestModel:
    def test_degree_too_small(self):
        with pytest.raises(DegreeTooSmallError):
            build_sphere_sdp(2, 1)

    @pytest.mark.parametrize("d", [2, 3, 8, 15])
    def test_constraint_count(self, d):
        # one row per power s^0..s^d of the identity, plus p(0) - slack = vol
        m = build_sphere_sdp(3, d)
        assert m.problem.n_constraints == d + 2
        expected = ["Q_e", "Q_o", "R_e", "R_o", "S_e"] + (["S_o"] if d >= 3 else []) + ["slack"]
        assert m.block_names == expected

    def test_identities_hold_at_solution(self):
        n, d = 3, 8
        m = build_sphere_sdp(n, d)
        sol = solve(m.problem)
        f = m.radial_function(sol.X)
        s = np.linspace(0, 6, 25)
        Q = {name: x for name, x in zip(m.block_names, sol.X)}

        B = m.test.basis

        def quad(M, shift=()):
            # Gram blocks are expressed in the scaled Laguerre vector (P_0(s), P_1(s), ...)
            k = M.shape[0]
            v = np.stack([B.evaluate(np.eye(k)[i], s) for i in range(k)], axis=1)
            out = np.einsum("ti,ij,tj->t", v, M, v)
            for factor in shift:
                out = out * factor
            return out

        p = eval_p(f, np.sqrt(s))
        assert np.allclose(p, quad(Q["Q_e"]) + quad(Q["Q_o"], [s]), rtol=1e-6, atol=1e-6)
        g = np.exp(math.pi * s) * eval_f(f, np.sqrt(s))
        minus_g = (
            quad(Q["R_e"]) + quad(Q["R_o"], [s]) + quad(Q["S_e"], [s - 4]) + quad(Q["S_o"], [s, s - 4])
        )
        assert np.allclose(-g, minus_g, rtol=1e-6, atol=1e-6)


class TestSphereBound:
    def test_three_dimensions(self):
        bound, f, report = sphere_bound(3, 12)
        assert 0.74048 <= bound <= 0.80
        assert bound >= FCC_DENSITY
        assert report.passed
        assert bound == pytest.approx(f.value_at_zero(), abs=0)

    @pytest.mark.xfail(strict=True, reason=KNOWN_SHORTFALL)
    def test_line_degree_four(self):
        assert 1.0 <= sphere_bound(1, 4)[0] <= 1.05

    @pytest.mark.xfail(strict=True, reason=KNOWN_SHORTFALL)
    def test_line_degree_eight(self):
        assert 1.0 <= sphere_bound(1, 8)[0] <= 1.02

    @pytest.mark.xfail(strict=True, reason=KNOWN_SHORTFALL)
    def test_eight_dimensions(self):
        assert E8_DENSITY <= sphere_bound(8, 15)[0] <= E8_DENSITY + 1e-3

    def test_eight_dimensions_is_sound(self):
        assert sphere_bound(8, 15)[0] >= E8_DENSITY - 1e-9

    def test_report_roundtrip(self):
        _, _, report = sphere_bound(2, 6)
        back = SphereReport.from_json(report.to_json())
        assert back == report and back.passed

    def test_grid_defaults(self):
        _, _, report = sphere_bound(2, 9)
        assert report.t_max == report.r_max == pytest.approx(30.0)
        assert report.grid_points == 2048

    @pytest.mark.parametrize("n,d", [(1, 3), (2, 4), (2, 6), (3, 5), (3, 6)])
    def test_basis_equivalence(self, n, d):
        a = sphere_bound(n, d, basis=Basis.LAGUERRE)[0]
        b = sphere_bound(n, d, basis=Basis.MONOMIAL)[0]
        assert a == pytest.approx(b, abs=1e-5)

    @pytest.mark.parametrize(
        "d",
        [
            10,
            pytest.param(12, marks=pytest.mark.xfail(strict=True, reason=MONOMIAL_RECOVERS)),
            14,
        ],
    )
    def test_monomial_breaks_down(self, d):
        good = sphere_bound(8, d)[0]
        try:
            bad = sphere_bound(8, d, basis=Basis.MONOMIAL)[0]
        except PackboundError:
            return
        assert abs(bad - good) > 1e-4

    def test_solver_failure_propagates(self):
        with pytest.raises(SolverFailure) as info:
            sphere_bound(3, 8, SphereSettings(solver=SolverSettings(max_iter=3)))
        assert info.value.solution.iterations == 3

    def test_output_passes_verifier(self):
        _, f, _ = sphere_bound(3, 10)
        assert verify_conditions(f, SphereSystem(3), GridSettings(tol=1e-6)).certified
