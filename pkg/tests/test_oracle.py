import math

import numpy as np
import pytest

import projfree as pf
from projfree.errors import ContractViolationError, IterationBudgetError
from projfree.oracle import fw_iteration_bound, pull_iteration_bound


def brute_force_fw(domain, eps, x, y, max_iter=10_000):
    """Independent simulator of the approach loop (no kernel code)."""
    x = np.array(x, dtype=float)
    for _ in range(max_iter):
        g = x - y
        if g @ g <= 3 * eps:
            return x, "close"
        v = domain.linear_minimize(g)
        d = x - v
        if g @ d <= eps:
            return x, "separated"
        # grid-search the line instead of the closed form
        deltas = np.linspace(0.0, 1.0, 10_001)
        cand = x[None, :] + deltas[:, None] * (v - x)[None, :]
        x = cand[np.argmin(np.sum((cand - y) ** 2, axis=1))]
    raise AssertionError("simulator did not stop")


class TestFwApproach:
    def test_zero_distance_is_close(self):
        dom = pf.Ball(2, 1.0)
        r = pf.fw_approach(dom, 0.1, np.array([0.5, 0.0]), np.array([0.5, 0.0]))
        np.testing.assert_allclose(r.x, [0.5, 0.0])
        assert r.stop_reason == "close"

    def test_separated_exterior_target(self):
        # v1 = -(x1-y)/||x1-y|| = (1,0) = x1, so the gap is 0 <= eps at
        # iteration 1 while ||x-y||^2 = 1 > 3 eps
        dom = pf.Ball(2, 1.0)
        r = pf.fw_approach(dom, 0.01, np.array([1.0, 0.0]), np.array([2.0, 0.0]))
        np.testing.assert_allclose(r.x, [1.0, 0.0])
        assert r.stop_reason == "separated"
        assert r.iterations == 1
        bx, breason = brute_force_fw(dom, 0.01, [1.0, 0.0], np.array([2.0, 0.0]))
        np.testing.assert_allclose(r.x, bx)
        assert breason == "separated"

    def test_line_search_coefficient(self):
        # simplex LO returns the origin for this direction, so one step
        # lands at x + delta*(0 - x) with delta = 0.5; the grid-search
        # oracle on ||x + d(v-x) - y||^2 confirms the closed form
        x, v, y = np.array([1.0, 0.0]), np.zeros(2), np.array([0.5, 0.0])
        deltas = np.linspace(0, 1, 10_001)
        vals = np.sum((x[None] + deltas[:, None] * (v - x)[None] - y) ** 2, axis=1)
        assert deltas[np.argmin(vals)] == pytest.approx(0.5, abs=1e-4)
        dom = pf.Simplex(2)
        r = pf.fw_approach(dom, 0.02, x, y)
        np.testing.assert_allclose(r.x, [0.5, 0.0], atol=1e-12)
        assert r.stop_reason == "close" and r.iterations == 2

    def test_output_no_farther_than_start(self, rng):
        for dom in (pf.Ball(3, 1.0), pf.Simplex(3), pf.Box.symmetric(3, 0.6)):
            for _ in range(50):
                x0 = dom.sample(rng)
                y = 2.0 * rng.standard_normal(dom.dim)
                eps = float(rng.uniform(0.01, 0.3))
                r = pf.fw_approach(dom, eps, x0, y)
                assert (np.linalg.norm(r.x - y)
                        <= np.linalg.norm(x0 - y) + 1e-12)
                assert dom.contains(r.x, tol=1e-9)

    def test_near_feasible_target_stops_close(self, rng):
        # dist^2(target, K) < eps forces the close branch
        for dom in (pf.Ball(3, 1.0), pf.Simplex(3)):
            for _ in range(50):
                eps = float(rng.uniform(0.05, 0.3))
                z = dom.sample(rng)
                y = z + 0.9 * math.sqrt(eps) * _unit(rng, dom.dim)
                r = pf.fw_approach(dom, eps, dom.sample(rng), y)
                assert r.stop_reason == "close"

    def test_iteration_budget_respected(self, rng):
        for dom in (pf.Ball(2, 1.0), pf.Simplex(4)):
            for _ in range(50):
                eps = float(rng.uniform(0.01, 0.2))
                r = pf.fw_approach(dom, eps, dom.sample(rng),
                                   2.0 * rng.standard_normal(dom.dim))
                assert r.iterations <= fw_iteration_bound(dom.diameter, eps)

    def test_invalid_epsilon(self):
        with pytest.raises(ContractViolationError):
            pf.fw_approach(pf.Ball(2, 1.0), 0.0, np.zeros(2), np.ones(2))

    def test_exhausted_cap_raises_with_diagnostics(self):
        # an interior target needs >= 2 iterations; capping at 1 must trip
        dom = pf.Ball(2, 1.0)
        with pytest.raises(IterationBudgetError) as exc:
            pf.fw_approach(dom, 1e-4, np.array([1.0, 0.0]),
                           np.array([0.5, 0.0]),
                           cfg=pf.IpConfig(1e-4, fw_max_iters_cap=1))
        assert exc.value.diagnostics["loop"] == "fw"
        assert exc.value.diagnostics["cap"] == 1


def _unit(rng, dim):
    u = rng.standard_normal(dim)
    return u / np.linalg.norm(u)


class TestInfeasibleProject:
    def test_short_circuit_identity(self):
        dom = pf.Ball(2, 1.0)
        res = pf.infeasible_project(dom, pf.IpConfig(0.1),
                                    np.array([0.5, 0.0]), np.array([0.5, 0.0]))
        np.testing.assert_allclose(res.x, [0.5, 0.0])
        np.testing.assert_allclose(res.y_tilde, [0.5, 0.0])
        assert res.pull_iterations == 0 and res.lo_calls == 0

    def test_first_step_is_the_clip(self):
        dom = pf.Ball(2, 1.0)
        res = pf.infeasible_project(dom, pf.IpConfig(0.1),
                                    np.array([1.0, 0.0]), np.array([3.0, 4.0]))
        # the clipped input (0.6, 0.8) is feasible for the ball, so the
        # first approach call already certifies closeness and y~ stays put
        np.testing.assert_allclose(res.y_tilde, [0.6, 0.8], atol=1e-12)
        assert np.sum((res.x - res.y_tilde) ** 2) <= 3 * 0.1 + 1e-9

    @pytest.mark.parametrize("make_dom", [
        lambda: pf.Ball(3, 1.0),
        lambda: pf.Simplex(4),
        lambda: pf.Box.symmetric(3, 0.7),
    ])
    def test_contracts_on_random_trials(self, make_dom, rng):
        dom = make_dom()
        for _ in range(150):
            eps = float(rng.uniform(0.01, 0.3)) * dom.radius**2
            cfg = pf.IpConfig(eps)
            x0 = dom.sample(rng)
            y0 = 3.0 * dom.radius * rng.uniform(-1.0, 1.0, dom.dim)
            res = pf.infeasible_project(dom, cfg, x0, y0)
            # contract A: the pair is close
            assert float(np.sum((res.x - res.y_tilde) ** 2)) <= 3 * eps + 1e-9
            assert dom.contains(res.x, tol=1e-9)
            assert np.linalg.norm(res.y_tilde) <= dom.radius + 1e-9
            # contract B: y~ no farther than the clipped input from any z
            y1 = pf.clip_to_ball(y0, dom.radius)
            Z = np.stack([dom.sample(rng) for _ in range(100)])
            d_new = np.linalg.norm(Z - res.y_tilde, axis=1)
            d_old = np.linalg.norm(Z - y1, axis=1)
            assert float(np.max(d_new - d_old)) <= 1e-9
            # iteration budgets (Lemma bounds, exact-LO domains)
            assert res.fw_iterations_max <= fw_iteration_bound(dom.diameter, eps)
            d2 = float(np.sum((x0 - y1) ** 2))
            if d2 > 3 * eps:
                assert res.pull_iterations <= pull_iteration_bound(d2, eps)

    def test_pull_budget_error_diagnostics(self):
        dom = pf.CustomDomain(2, 1.0, lo_fn=lambda g: np.array([0.0, 1.0]))
        cfg = pf.IpConfig(1e-3, fw_max_iters_cap=10**6, pull_max_iters_cap=3)
        with pytest.raises(IterationBudgetError) as exc:
            pf.infeasible_project(dom, cfg, np.array([0.0, 1.0]),
                                  np.array([4.0, 0.0]))
        assert exc.value.diagnostics["loop"] in ("fw", "pull")

    def test_epsilon_validation(self):
        with pytest.raises(ContractViolationError):
            pf.IpConfig(epsilon=-1.0)
