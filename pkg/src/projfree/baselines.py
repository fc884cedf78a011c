"""Projection-based reference learner (online gradient descent).

Serves two roles: the projection-based contender in experiments (with a
full-SVD projection when run on trace-norm domains), and the
epsilon -> 0 equivalence oracle for the blocked projection-free learner
on domains with closed-form projections.
"""

from __future__ import annotations

import math

import numpy as np

from .domains import TraceNormBall, as_point
from .driver import ObserveRecord
from .errors import ContractViolationError


def _scaled_simplex_project(v: np.ndarray, z: float) -> np.ndarray:
    """Project onto {x >= 0, sum(x) <= z}."""
    w = np.maximum(v, 0.0)
    if float(np.sum(w)) <= z:
        return w
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - z
    idx = np.arange(1, v.shape[0] + 1)
    rho = int(np.max(np.nonzero(u - css / idx > 0)[0]))
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def nuclear_projection(domain: TraceNormBall, p) -> np.ndarray:
    """Euclidean projection onto the trace-norm ball via a full SVD:
    the singular values are projected onto {s >= 0, sum(s) <= delta}."""
    p = as_point(p, domain.dim)
    X = p.reshape(domain.rows, domain.cols)
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    if float(np.sum(s)) <= domain.delta:
        return p
    s = _scaled_simplex_project(s, domain.delta)
    return (U @ (s[:, None] * Vt)).reshape(-1)


class ProjectedOgd:
    """x <- project(x - eta_t * grad) with eta_t = D/(G sqrt(T)) for a
    known horizon ('static') or D/(G sqrt(t)) anytime."""

    def __init__(self, domain, lipschitz: float, horizon: int | None = None,
                 mode: str = "static", x_start=None, projection=None,
                 c: float = 1.0):
        if mode not in ("static", "anytime"):
            raise ContractViolationError("mode must be 'static' or 'anytime'")
        if mode == "static" and horizon is None:
            raise ContractViolationError("static step size needs the horizon")
        if lipschitz <= 0:
            raise ContractViolationError("lipschitz constant must be positive")
        self.domain = domain
        self.lipschitz = float(lipschitz)
        self.horizon = horizon
        self.mode = mode
        self.c = float(c)
        self._project = projection if projection is not None else domain.project
        if x_start is None:
            x_start = domain.origin()
        self._x = as_point(x_start, domain.dim)
        self.round = 0

    def _step_size(self) -> float:
        t = self.horizon if self.mode == "static" else self.round
        return self.c * self.domain.diameter / (self.lipschitz * math.sqrt(t))

    def predict(self) -> np.ndarray:
        return self._x

    def update(self, grad) -> int:
        grad = as_point(grad, self.domain.dim)
        self.round += 1
        self._x = self._project(self._x - self._step_size() * grad)
        return 0

    def observe(self, loss) -> ObserveRecord:
        x = self._x
        value = float(loss.value(x))
        self.update(loss.grad(x))
        return ObserveRecord(loss_value=value, lo_calls_delta=0)

    def diagnostics(self) -> dict:
        return {"mode": self.mode, "round": self.round,
                "step_size": self._step_size() if self.round or
                self.mode == "static" else None}
