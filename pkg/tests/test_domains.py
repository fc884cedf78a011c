import numpy as np
import pytest

import projfree as pf
from projfree.errors import (CapabilityError, ContractViolationError,
                             ConvergenceError)

from conftest import make_domains


class TestLinearMinimize:
    def test_ball_closed_form(self):
        dom = pf.Ball(2, 1.0)
        v = dom.linear_minimize(np.array([3.0, 4.0]))
        np.testing.assert_allclose(v, [-0.6, -0.8], atol=1e-12)

    def test_simplex_vertex_of_minimum_coordinate(self):
        dom = pf.Simplex(3)
        v = dom.linear_minimize(np.array([2.0, -1.0, 5.0]))
        np.testing.assert_allclose(v, [0.0, 1.0, 0.0])

    def test_simplex_all_positive_direction_gives_origin(self):
        dom = pf.Simplex(3)
        v = dom.linear_minimize(np.array([2.0, 1.0, 5.0]))
        np.testing.assert_allclose(v, [0.0, 0.0, 0.0])

    def test_trace_norm_rank_one_direction(self):
        # independent oracle: exact SVD of the 2x2 direction
        dom = pf.TraceNormBall(2, 2, 2.0)
        g = np.array([[1.0, 0.0], [0.0, 0.0]])
        v = dom.linear_minimize(g.reshape(-1))
        U, s, Vt = np.linalg.svd(g)
        expected = -dom.delta * np.outer(U[:, 0], Vt[0]).reshape(-1)
        np.testing.assert_allclose(v, expected, atol=1e-6)
        np.testing.assert_allclose(v.reshape(2, 2), [[-2.0, 0.0], [0.0, 0.0]],
                                   atol=1e-6)

    def test_trace_norm_matches_svd_oracle_on_random_directions(self, rng):
        dom = pf.TraceNormBall(4, 3, 1.5, lo_tol=1e-10, lo_max_iters=200_000)
        for _ in range(25):
            g = rng.standard_normal(12)
            v = dom.linear_minimize(g)
            G = g.reshape(4, 3)
            U, s, Vt = np.linalg.svd(G)
            best = -dom.delta * np.outer(U[:, 0], Vt[0]).reshape(-1)
            # LO values must agree even if the singular pair is not unique
            assert float(g @ v) <= float(g @ best) + 1e-6

    def test_lo_beats_sampled_feasible_points(self, rng, domains):
        for kind, dom in domains.items():
            Z = np.stack([dom.sample(rng) for _ in range(1000)])
            for _ in range(5):
                g = rng.standard_normal(dom.dim)
                v = dom.linear_minimize(g)
                assert float(g @ v) <= float(np.min(Z @ g)) + 1e-6, kind

    def test_lo_output_is_feasible(self, rng, domains):
        for kind, dom in domains.items():
            tol = 1e-6 if kind == "trace_norm_ball" else 1e-9
            for _ in range(20):
                v = dom.linear_minimize(rng.standard_normal(dom.dim))
                assert dom.contains(v, tol=tol), kind

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ContractViolationError):
            pf.Ball(3, 1.0).linear_minimize(np.ones(4))

    def test_non_finite_direction_rejected(self):
        with pytest.raises(ContractViolationError):
            pf.Ball(2, 1.0).linear_minimize(np.array([np.nan, 0.0]))

    def test_power_iteration_budget_error_carries_residual(self):
        dom = pf.TraceNormBall(6, 6, 1.0, lo_max_iters=2)
        # near-tied spectrum: slow power-iteration convergence
        g = np.diag([1.0, 1.0 - 1e-9, 0.5, 0.4, 0.3, 0.2]).reshape(-1)
        with pytest.raises(ConvergenceError) as exc:
            dom.linear_minimize(g + 1e-3 * np.arange(36))
        assert exc.value.residual is not None


class TestFeasibility:
    def test_origin_feasible_everywhere(self, domains):
        for kind, dom in domains.items():
            assert dom.contains(dom.origin(), tol=0.0), kind

    def test_ball_origin_zero_tolerance(self):
        assert pf.Ball(2, 1.0).contains(np.zeros(2), tol=0.0)

    def test_simplex_sum_violation(self):
        assert not pf.Simplex(2).contains(np.array([0.5, 0.6]), tol=1e-9)

    def test_simplex_negative_coordinate(self):
        assert not pf.Simplex(2).contains(np.array([-0.1, 0.5]), tol=1e-9)

    def test_trace_norm_boundary(self):
        # nuclear norm of [[2,0],[0,0]] is exactly 2 (rank one)
        dom = pf.TraceNormBall(2, 2, 2.0)
        assert dom.contains(np.array([2.0, 0.0, 0.0, 0.0]), tol=1e-9)
        assert not dom.contains(np.array([2.1, 0.0, 0.0, 0.0]), tol=1e-9)

    def test_custom_domain_without_checker(self):
        dom = pf.CustomDomain(2, 1.0, lo_fn=lambda g: np.zeros(2))
        with pytest.raises(CapabilityError):
            dom.contains(np.zeros(2))


class TestProjection:
    def test_ball_radial_scaling(self):
        np.testing.assert_allclose(pf.Ball(2, 1.0).project(np.array([2.0, 0.0])),
                                   [1.0, 0.0])

    def test_ball_interior_fixed(self):
        p = np.array([0.3, 0.4])
        np.testing.assert_allclose(pf.Ball(2, 1.0).project(p), p)

    def test_simplex_projection_vs_grid_oracle(self):
        dom = pf.Simplex(2)
        p = np.array([0.8, 0.8])
        proj = dom.project(p)
        np.testing.assert_allclose(proj, [0.5, 0.5], atol=1e-12)
        # brute-force oracle: best grid point of the simplex
        grid = np.linspace(0, 1, 401)
        best, best_d = None, np.inf
        for a in grid:
            for b in grid:
                if a + b <= 1.0:
                    d = (a - 0.8) ** 2 + (b - 0.8) ** 2
                    if d < best_d:
                        best, best_d = (a, b), d
        np.testing.assert_allclose(proj, best, atol=5e-3)

    def test_projection_idempotent_and_nonexpansive(self, rng):
        for dom in (pf.Ball(4, 1.2), pf.Box.symmetric(4, 0.7), pf.Simplex(4)):
            for _ in range(200):
                p = 3.0 * rng.standard_normal(dom.dim)
                q = 3.0 * rng.standard_normal(dom.dim)
                pp, qq = dom.project(p), dom.project(q)
                np.testing.assert_allclose(dom.project(pp), pp, atol=1e-9)
                assert (np.linalg.norm(pp - qq)
                        <= np.linalg.norm(p - q) + 1e-9)

    def test_projection_beats_sampled_points(self, rng):
        for dom in (pf.Ball(3, 1.0), pf.Box.symmetric(3, 0.5), pf.Simplex(3)):
            Z = np.stack([dom.sample(rng) for _ in range(500)])
            for _ in range(20):
                p = 2.5 * rng.standard_normal(dom.dim)
                proj = dom.project(p)
                assert (np.linalg.norm(p - proj)
                        <= np.min(np.linalg.norm(Z - p, axis=1)) + 1e-9)

    def test_trace_norm_has_no_exact_projection(self):
        with pytest.raises(CapabilityError):
            pf.TraceNormBall(2, 2, 1.0).project(np.zeros(4))


class TestClip:
    def test_inside_fixed(self):
        np.testing.assert_allclose(pf.clip_to_ball(np.array([0.5, 0.0]), 1.0),
                                   [0.5, 0.0])

    def test_rescale(self):
        np.testing.assert_allclose(pf.clip_to_ball(np.array([3.0, 4.0]), 1.0),
                                   [0.6, 0.8])

    def test_radius_two(self):
        np.testing.assert_allclose(pf.clip_to_ball(np.array([0.0, -6.0]), 2.0),
                                   [0.0, -2.0])

    def test_norm_bounded_and_fixed_points(self, rng):
        for _ in range(300):
            p = 4.0 * rng.standard_normal(3)
            c = pf.clip_to_ball(p, 1.3)
            assert np.linalg.norm(c) <= 1.3 + 1e-12
            if np.linalg.norm(p) <= 1.3:
                np.testing.assert_array_equal(c, p)


class TestGeometry:
    def test_diameter_is_twice_radius(self, domains):
        for dom in domains.values():
            assert dom.diameter == pytest.approx(2 * dom.radius)

    def test_samples_are_feasible(self, rng, domains):
        for kind, dom in domains.items():
            tol = 1e-6 if kind == "trace_norm_ball" else 1e-9
            for _ in range(200):
                assert dom.contains(dom.sample(rng), tol=tol), kind

    def test_sample_norm_within_enclosing_ball(self, rng, domains):
        for kind, dom in domains.items():
            for _ in range(100):
                assert np.linalg.norm(dom.sample(rng)) <= dom.radius + 1e-9

    def test_box_must_contain_origin(self):
        with pytest.raises(ContractViolationError):
            pf.Box(np.array([0.5, -1.0]), np.array([1.0, 1.0]))

    def test_box_lo_picks_corners(self):
        dom = pf.Box(np.array([-1.0, -2.0]), np.array([0.5, 3.0]))
        np.testing.assert_allclose(dom.linear_minimize(np.array([1.0, -1.0])),
                                   [-1.0, 3.0])

    def test_trace_norm_describe_has_oracle_knobs(self):
        d = pf.TraceNormBall(2, 3, 1.0, lo_tol=1e-7).describe()
        assert d["lo_tol"] == 1e-7 and d["rows"] == 2 and d["cols"] == 3
