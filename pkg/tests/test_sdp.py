import itertools
import json

import numpy as np
import pytest

from conftest import complementary_pair_problem
from packbound.errors import InfeasibleDataError, ShapeMismatchError
from packbound.sdp import (
    SdpProblem,
    SolverSettings,
    SolverStatus,
    check_solution,
    dumps,
    lp_as_sdp,
    problem_from_json,
    problem_to_json,
    solution_from_json,
    solution_to_json,
    solve,
)


def trace_one():
    return SdpProblem([1], [np.eye(1)], [np.ones((1, 1, 1))], [1.0])


def lambda_max_problem():
    return SdpProblem([3], [np.diag([1.0, 2.0, 3.0])], [np.eye(3)[None]], [1.0])


class TestSolveExamples:
    def test_trace_one(self):
        s = solve(trace_one())
        assert s.status is SolverStatus.OPTIMAL
        assert s.primal_value == pytest.approx(1.0, abs=1e-8)

    def test_lambda_max(self):
        s = solve(lambda_max_problem())
        assert s.optimal
        assert s.primal_value == pytest.approx(3.0, abs=1e-7)
        # optimal X is the top eigenprojector
        assert s.X[0][2, 2] == pytest.approx(1.0, abs=1e-6)

    def test_complementary_pairs(self, rng):
        for _ in range(10):
            p, truth, *_ = complementary_pair_problem(rng)
            s = solve(p)
            assert s.optimal
            assert abs(s.primal_value - truth) <= 1e-7 * (1 + abs(truth))
            assert s.gap <= 1e-8
            assert s.primal_residual <= 1e-8 and s.dual_residual <= 1e-8

    def test_optimal_iterates_are_psd(self, rng):
        p, *_ = complementary_pair_problem(rng)
        s = solve(p)
        rep = check_solution(p, s, tol=1e-6)
        assert rep.passed

    def test_max_iterations_returns_best_iterate(self, rng):
        p, *_ = complementary_pair_problem(rng)
        s = solve(p, SolverSettings(max_iter=2))
        assert s.status is SolverStatus.MAX_ITERATIONS
        assert s.X is not None and s.iterations == 2


class TestProperties:
    def test_weak_duality_along_the_path(self, rng):
        p, *_ = complementary_pair_problem(rng)
        s = solve(p)
        tol = SolverSettings().feas_tol
        for h in s.history:
            if h["primal_residual"] <= tol and h["dual_residual"] <= tol:
                assert h["dual_value"] >= h["primal_value"] - 10 * SolverSettings().gap_tol * (
                    1 + abs(h["primal_value"])
                )

    def test_determinism(self, rng):
        p, *_ = complementary_pair_problem(rng)
        a, b = solve(p), solve(p)
        assert a.iterations == b.iterations
        assert all(np.array_equal(x, y) for x, y in zip(a.X, b.X))
        assert np.array_equal(a.y, b.y)

    @pytest.mark.parametrize("s", [0.01, 3.0, 250.0])
    def test_scaling_covariance(self, rng, s):
        p, truth, *_ = complementary_pair_problem(rng)
        q = SdpProblem(p.blocks, [s * c for c in p.C], p.A, p.b)
        v1 = solve(p).primal_value
        v2 = solve(q).primal_value
        assert v2 == pytest.approx(s * v1, rel=1e-8, abs=1e-9)


class TestValidation:
    def test_dependent_constraints(self):
        A = np.zeros((2, 2, 2))
        A[0] = np.eye(2)
        A[1] = 2 * np.eye(2)
        with pytest.raises(InfeasibleDataError):
            SdpProblem([2], [np.eye(2)], [A], [1.0, 2.0])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            SdpProblem([2], [np.eye(3)], [np.zeros((1, 2, 2))], [1.0])
        with pytest.raises(ShapeMismatchError):
            SdpProblem([0], [np.eye(1)], [np.zeros((1, 1, 1))], [1.0])

    def test_bad_settings(self):
        with pytest.raises(ValueError):
            SolverSettings(gap_tol=0)
        with pytest.raises(ValueError):
            SolverSettings(max_iter=0)


class TestCheckSolution:
    def test_exact_residuals_on_example(self):
        p = trace_one()
        s = solve(p)
        rep = check_solution(p, s)
        assert rep.primal_residual <= 1e-12
        assert rep.dual_residual <= 1e-12

    def test_corrupted_primal_is_flagged(self):
        p = lambda_max_problem()
        s = solve(p)
        s.X[0][0, 0] += 1.0
        rep = check_solution(p, s)
        assert rep.primal_residual > 0.5
        assert not rep.passed

    def test_dual_only(self):
        p = lambda_max_problem()
        s = solve(p)
        s.X = None
        rep = check_solution(p, s)
        assert rep.primal_residual is None and rep.primal_feasible is None
        assert rep.dual_feasible

    def test_shape_mismatch(self):
        s = solve(trace_one())
        with pytest.raises(ShapeMismatchError):
            check_solution(lambda_max_problem(), s)


class TestLp:
    def test_single_variable(self):
        s = solve(lp_as_sdp([1.0], [[1.0]], [1.0]))
        assert s.primal_value == pytest.approx(1.0, abs=1e-8)

    def test_two_variables(self):
        s = solve(lp_as_sdp([1.0, 1.0], [[1.0, 1.0]], [1.0]))
        assert s.primal_value == pytest.approx(1.0, abs=1e-8)

    def test_equalities(self):
        # max x - y, x + y = 2, x <= 1.5
        s = solve(lp_as_sdp([1.0, -1.0], [[1.0, 0.0]], [1.5], [[1.0, 1.0]], [2.0]))
        assert s.primal_value == pytest.approx(1.0, abs=1e-7)

    @staticmethod
    def vertex_enumeration(c, A, b):
        """Best objective over basic feasible points of {A x <= b, x >= 0}."""
        nv = len(c)
        G = np.vstack([A, -np.eye(nv)])
        h = np.concatenate([b, np.zeros(nv)])
        best = -np.inf
        for rows in itertools.combinations(range(len(h)), nv):
            M = G[list(rows)]
            if abs(np.linalg.det(M)) < 1e-10:
                continue
            x = np.linalg.solve(M, h[list(rows)])
            if np.all(G @ x <= h + 1e-9):
                best = max(best, c @ x)
        return best

    def test_random_lps_against_vertices(self, rng):
        for _ in range(15):
            nv = int(rng.integers(2, 6))
            mu = int(rng.integers(nv, 8))
            A = rng.uniform(0.1, 2.0, (mu, nv))  # positive rows keep it bounded
            b = rng.uniform(1.0, 3.0, mu)
            c = rng.standard_normal(nv)
            truth = self.vertex_enumeration(c, A, b)
            s = solve(lp_as_sdp(c, A, b))
            assert s.optimal
            assert s.primal_value == pytest.approx(truth, abs=1e-7 * (1 + abs(truth)))


class TestJson:
    def test_problem_roundtrip(self, rng):
        p, *_ = complementary_pair_problem(rng)
        q = problem_from_json(json.loads(dumps(problem_to_json(p))))
        assert q.blocks == p.blocks
        assert np.array_equal(q.b, p.b)
        for a, b in zip(p.A, q.A):
            assert np.array_equal(np.tril(a) if a.ndim == 3 else a, np.tril(b) if b.ndim == 3 else b)
        assert solve(q).primal_value == solve(p).primal_value

    def test_schema(self):
        doc = problem_to_json(trace_one())
        assert doc["blocks"] == [1]
        assert doc["objective"] == [[0, 0, 0, 1.0]]
        assert doc["constraints"] == [[[0, 0, 0, 1.0]]]
        assert doc["rhs"] == [1.0]

    def test_solution_roundtrip(self, rng):
        p, *_ = complementary_pair_problem(rng)
        s = solve(p)
        t = solution_from_json(json.loads(dumps(solution_to_json(s))))
        assert t.status is s.status
        assert np.array_equal(t.y, s.y)
        assert all(np.array_equal(a, b) for a, b in zip(t.X, s.X))
        assert check_solution(p, t).passed == check_solution(p, s).passed

    def test_dumps_uses_17_digits(self):
        text = dumps({"x": 0.1, "k": 3, "ok": True})
        assert "0.10000000000000001" in text
        assert json.loads(text) == {"x": 0.1, "k": 3, "ok": True}
