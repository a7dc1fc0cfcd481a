import math

import numpy as np
import pytest

from packbound.cohn_elkies import RadialFunction, ball_volume, eval_f, eval_p, sphere_bound
from packbound.errors import NotCertifiedError, ShapeMismatchError
from packbound.verifier import (
    GridSettings,
    MatrixRadialFunction,
    SphereSystem,
    density_bound_from_f,
    verify_conditions,
)


@pytest.fixture(scope="module")
def passing_f():
    return sphere_bound(3, 12)


class TestTypes:
    def test_sphere_system(self):
        s = SphereSystem(3, [1.0, 0.5])
        assert s.N == 2
        assert np.allclose(s.volumes, [ball_volume(3), ball_volume(3) / 8])
        with pytest.raises(ValueError):
            SphereSystem(3, [1.0, -1.0])
        with pytest.raises(ValueError):
            SphereSystem(3, [])

    def test_matrix_function_symmetry(self):
        c = np.zeros((2, 2, 3))
        c[0, 1, 0] = 1.0
        with pytest.raises(ValueError):
            MatrixRadialFunction(3, c)
        with pytest.raises(ShapeMismatchError):
            MatrixRadialFunction(3, np.zeros((2, 3, 3)))

    def test_json_n1_and_n2(self):
        f = MatrixRadialFunction(2, [1.0, 0.5])
        assert MatrixRadialFunction.from_json(f.to_json()).coeffs.shape == (1, 1, 2)
        assert MatrixRadialFunction.from_json({"n": 2, "d": 1, "a": [1.0, 0.5]}).N == 1
        c = np.arange(12, dtype=float).reshape(2, 2, 3)
        c = c + c.transpose(1, 0, 2)
        g = MatrixRadialFunction(4, c)
        back = MatrixRadialFunction.from_json(g.to_json())
        assert back.N == 2 and np.array_equal(back.coeffs, g.coeffs)
        with pytest.raises(ShapeMismatchError):
            MatrixRadialFunction.from_json({"n": 4, "N": 3, "a": g.to_json()["a"]})

    def test_dimension_mismatch(self, passing_f):
        with pytest.raises(ShapeMismatchError):
            verify_conditions(passing_f[1], SphereSystem(2))
        with pytest.raises(ShapeMismatchError):
            verify_conditions(passing_f[1], SphereSystem(3, [1.0, 1.0]))


class TestSingleType:
    def test_passing_run(self, passing_f):
        bound, f, _ = passing_f
        rep = verify_conditions(f, SphereSystem(3), GridSettings(tol=1e-6))
        assert rep.certified
        assert rep.separation_margin <= 1e-6
        assert rep.volume_margin >= -1e-6
        assert rep.positivity_margin >= -1e-6

    def test_consistent_with_sphere_bound(self, passing_f):
        bound, f, _ = passing_f
        assert density_bound_from_f(f, SphereSystem(3)) == pytest.approx(bound, abs=1e-9)

    def test_gaussian_fails_separation(self):
        f = RadialFunction(1, [ball_volume(1)])
        rep = verify_conditions(f, SphereSystem(1))
        assert not rep.condition_i
        assert rep.condition_ii and rep.condition_iii
        with pytest.raises(NotCertifiedError):
            density_bound_from_f(f, SphereSystem(1))

    def test_scaling(self, passing_f):
        bound, f, _ = passing_f
        c = 3.5
        g = RadialFunction(3, [c * a for a in f.a])
        rep = verify_conditions(g, SphereSystem(3))
        assert rep.condition_ii
        assert density_bound_from_f(g, SphereSystem(3)) == pytest.approx(c * bound, rel=1e-12)

    def test_failure_injection(self, passing_f):
        _, f, _ = passing_f
        tol = 1e-6
        for k in range(len(f.a)):
            a = list(f.a)
            a[k] *= 1.1
            g = RadialFunction(3, a)
            rep = verify_conditions(g, SphereSystem(3), GridSettings(tol=tol))
            # recompute the margins on the same grid independently of the report
            r = np.linspace(2.0, 10 * math.sqrt(g.degree), 4096)
            t = np.linspace(0.0, 10 * math.sqrt(g.degree) * 2, 4096)
            bad = (
                np.max(eval_f(g, r)) > tol
                or np.min(eval_p(g, t)) < -tol
                or g.a[0] - ball_volume(3) < -tol
            )
            assert rep.certified == (not bad)

    def test_volume_condition(self):
        f = RadialFunction(2, [0.5 * ball_volume(2)])
        rep = verify_conditions(f, SphereSystem(2))
        assert rep.volume_margin == pytest.approx(-0.5 * ball_volume(2))
        assert not rep.condition_ii


class TestTwoTypes:
    def test_rank_one_combination(self, passing_f):
        bound, g, _ = passing_f
        v = np.array([1.0, 1.0])
        coeffs = np.einsum("i,j,k->ijk", v, v, np.array(g.a))
        f = MatrixRadialFunction(3, coeffs)
        rep = verify_conditions(f, SphereSystem(3, [1.0, 1.0]))
        assert rep.positivity_margin >= -1e-9
        assert set(rep.pair_separation) == {(0, 0), (0, 1), (1, 1)}
        assert rep.certified
        assert density_bound_from_f(f, SphereSystem(3, [1.0, 1.0])) == pytest.approx(bound, abs=1e-9)

    def test_mixed_radii_flag_short_pairs(self, passing_f):
        _, g, _ = passing_f
        v = np.array([1.0, 0.5])
        f = MatrixRadialFunction(3, np.einsum("i,j,k->ijk", v, v, np.array(g.a)))
        rep = verify_conditions(f, SphereSystem(3, [1.0, 0.5]))
        # g is only nonpositive beyond distance 2, so pairs separated by 1.5 or 1 fail
        assert rep.pair_separation[(0, 0)] <= 1e-6
        assert rep.pair_separation[(0, 1)] > 1e-6
        assert rep.pair_separation[(1, 1)] > 1e-6
        assert not rep.certified

    def test_indefinite_matrix_flagged(self):
        c = np.zeros((2, 2, 1))
        c[0, 0, 0] = c[1, 1, 0] = 1.0
        c[0, 1, 0] = c[1, 0, 0] = 2.0
        rep = verify_conditions(MatrixRadialFunction(2, c), SphereSystem(2, [1.0, 1.0]))
        assert rep.positivity_margin == pytest.approx(-1.0)
        assert not rep.condition_iii
