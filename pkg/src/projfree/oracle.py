"""Infeasible-projection oracle built from linear optimizations.

Given a feasible anchor x0 and an arbitrary y0, the oracle returns a
pair (x, y~) with x feasible, y~ inside the enclosing R-ball,
||x - y~||^2 <= 3*eps, and y~ no farther than the (clipped) input from
any feasible point. It alternates a line-search Frank-Wolfe approach
toward the current infeasible point with small pull steps of that point
toward the feasible iterate.

Iteration budgets: a Frank-Wolfe call is expected to stop within
ceil(27 D^2 / (4 eps)) iterations and the pull loop within
max(d2*(d2 - eps)/(4 eps^2) + 1, 1) where d2 = ||x0 - y1||^2; crossing
a bound logs a warning (inexact LOs may overshoot slightly), crossing
twice the bound raises, since that signals a broken LO oracle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .domains import as_point, clip_to_ball
from .errors import ContractViolationError, IterationBudgetError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IpConfig:
    """Error tolerance plus optional hard caps on the inner loops.

    When a cap is None it is set per call to twice the analytical bound
    for the current inputs.
    """

    epsilon: float
    fw_max_iters_cap: int | None = None
    pull_max_iters_cap: int | None = None

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ContractViolationError("epsilon must be positive")


@dataclass(frozen=True)
class FwResult:
    x: np.ndarray
    stop_reason: str  # "close" (dist^2 <= 3 eps) or "separated" (gap <= eps)
    iterations: int
    lo_calls: int


@dataclass(frozen=True)
class IpResult:
    x: np.ndarray
    y_tilde: np.ndarray
    fw_iterations_total: int
    pull_iterations: int
    lo_calls: int
    fw_iterations_max: int = 0


def fw_iteration_bound(diameter: float, eps: float) -> int:
    return int(math.ceil(27.0 * diameter * diameter / (4.0 * eps)))


def pull_iteration_bound(dist2: float, eps: float) -> int:
    raw = max(dist2 * (dist2 - eps) / (4.0 * eps * eps) + 1.0, 1.0)
    return int(math.ceil(raw))


_REASONS = {kernels.STOP_CLOSE: "close", kernels.STOP_SEPARATED: "separated"}


def fw_approach(domain, epsilon: float, x_init, target,
                cfg: IpConfig | None = None) -> FwResult:
    """Approach `target` from the feasible `x_init` by Frank-Wolfe.

    Returns a feasible x no farther from the target than x_init,
    stopping as soon as ||x - target||^2 <= 3*eps ("close") or the FW
    gap certifies the target is separated from K ("separated").
    """
    if epsilon <= 0:
        raise ContractViolationError("epsilon must be positive")
    x_init = as_point(x_init, domain.dim)
    target = as_point(target, domain.dim)
    bound = fw_iteration_bound(domain.diameter, epsilon)
    cap = cfg.fw_max_iters_cap if cfg and cfg.fw_max_iters_cap else 2 * bound
    x, code, iters, lo_calls = kernels.fw_approach(domain, x_init, target,
                                                   epsilon, cap)
    if code == -1:
        raise IterationBudgetError(
            "Frank-Wolfe loop exceeded its cap; the LO oracle looks broken",
            diagnostics={"loop": "fw", "iterations": iters, "cap": cap,
                         "bound": bound, "epsilon": epsilon})
    if iters > bound:
        logger.warning("FW used %d iterations, past the %d bound "
                       "(eps=%g, kind=%s)", iters, bound, epsilon, domain.kind)
    return FwResult(x, _REASONS[code], iters, lo_calls)


def infeasible_project(domain, cfg: IpConfig, x0, y0) -> IpResult:
    """Return (x, y~) meeting both oracle contracts for tolerance eps.

    x0 must be feasible; y0 is first rescaled into the enclosing ball
    (y1), the pull step size is gamma = 2*eps / ||x0 - y1||^2, and the
    call short-circuits to (x0, y1) when ||x0 - y1||^2 <= 3*eps already.
    """
    eps = cfg.epsilon
    x0 = as_point(x0, domain.dim)
    y0 = as_point(y0, domain.dim)
    y1 = clip_to_ball(y0, domain.radius)
    diff = x0 - y1
    dist2 = float(diff @ diff)
    if dist2 <= 3.0 * eps:
        return IpResult(x0, y1, 0, 0, 0, 0)
    gamma = 2.0 * eps / dist2
    fw_bound = fw_iteration_bound(domain.diameter, eps)
    fw_cap = cfg.fw_max_iters_cap or 2 * fw_bound
    pull_bound = pull_iteration_bound(dist2, eps)
    pull_cap = cfg.pull_max_iters_cap or 2 * pull_bound
    x, y, fw_total, fw_max, pulls, lo_calls, status = kernels.pull_loop(
        domain, x0, y1, eps, gamma, fw_cap, pull_cap)
    if status != kernels.STATUS_OK:
        loop = "fw" if status == kernels.STATUS_FW_BUDGET else "pull"
        raise IterationBudgetError(
            f"infeasible projection {loop} loop exceeded its cap",
            diagnostics={"loop": loop, "pull_iterations": pulls,
                         "fw_iterations_max": fw_max, "fw_cap": fw_cap,
                         "pull_cap": pull_cap, "epsilon": eps,
                         "initial_dist2": dist2, "kind": domain.kind})
    if fw_max > fw_bound:
        logger.warning("FW inner call used %d iterations, past the %d bound "
                       "(kind=%s)", fw_max, fw_bound, domain.kind)
    if pulls > pull_bound:
        logger.warning("pull loop used %d iterations, past the %d bound "
                       "(kind=%s)", pulls, pull_bound, domain.kind)
    return IpResult(x, y, fw_total, pulls, lo_calls, fw_max)
