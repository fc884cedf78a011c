"""Dynamic-regret ensemble: blocked-gradient experts on a geometric
step-size grid, combined by exponentially weighted averaging.

The grid covers every path-length the environment might realize, and
the multiplicative-weights meta learner tracks whichever expert's step
size happens to fit; its meta regret against expert i is at most
(sqrt(2T)/4) * (1 + 2 ln(i+1)) for losses in [0, 1].
"""

from __future__ import annotations

import math

import numpy as np

from .bogd import BogdIp, BogdParams
from .domains import as_point
from .driver import ObserveRecord
from .errors import ContractViolationError, LossOutOfRangeError

_RANGE_SLACK = 1e-9


def validate_unit_loss(value: float) -> float:
    """Clamp values within 1e-9 of [0, 1]; larger violations raise."""
    if value < -_RANGE_SLACK or value > 1.0 + _RANGE_SLACK:
        raise LossOutOfRangeError(
            f"loss value {value} escapes [0, 1]; the stream is not scaled")
    return min(1.0, max(0.0, value))


def step_size_grid(T: int, diameter: float, lipschitz: float,
                   c: float = 1.0) -> list[float]:
    """eta_i = c * 2^(i-1) * (7 D^2 / (2 G^2 T))^(3/4) for i = 1..N,
    with N = ceil(0.75 * log2(1 + 4T/7)) + 1."""
    if T < 1 or diameter <= 0 or lipschitz <= 0:
        raise ContractViolationError("need T >= 1, D > 0, G > 0")
    N = math.ceil(0.75 * math.log2(1.0 + 4.0 * T / 7.0) - 1e-9) + 1
    base = (7.0 * diameter**2 / (2.0 * lipschitz**2 * T)) ** 0.75
    return [c * 2.0 ** (i - 1) * base for i in range(1, N + 1)]


def initial_weights(n: int) -> np.ndarray:
    """Prior C/(i(i+1)) with C = 1 + 1/N; sums to one for every N."""
    C = 1.0 + 1.0 / n
    i = np.arange(1, n + 1, dtype=np.float64)
    return C / (i * (i + 1.0))


class Pold:
    """Weighted-average ensemble of blocked-gradient experts."""

    def __init__(self, domain, horizon: int, lipschitz: float,
                 diameter: float | None = None, x_start=None,
                 alpha: float | None = None, c: float = 1.0):
        self.domain = domain
        self.horizon = int(horizon)
        D = domain.diameter if diameter is None else float(diameter)
        self.step_sizes = step_size_grid(self.horizon, D, float(lipschitz), c)
        if x_start is None:
            x_start = domain.origin()
        x_start = as_point(x_start, domain.dim)
        self.experts = [BogdIp(domain, BogdParams.from_eta(eta, self.horizon),
                               x_start=x_start)
                        for eta in self.step_sizes]
        self.weights = initial_weights(len(self.experts))
        self.alpha = math.sqrt(8.0 / self.horizon) if alpha is None else float(alpha)
        self.round = 0
        # cumulative meta/expert losses, exposed for the meta-regret check
        self.cum_loss = 0.0
        self.cum_expert_losses = np.zeros(len(self.experts))

    @property
    def num_experts(self) -> int:
        return len(self.experts)

    def predict(self) -> np.ndarray:
        pts = np.stack([e.predict() for e in self.experts])
        return self.weights @ pts

    def update_from_losses(self, values, grads) -> int:
        """Multiplicative-weights update from per-expert loss values,
        then gradient updates of every expert at its own point."""
        if len(values) != self.num_experts or len(grads) != self.num_experts:
            raise ContractViolationError("need one value and gradient per expert")
        vals = np.array([validate_unit_loss(float(v)) for v in values])
        scaled = self.weights * np.exp(-self.alpha * vals)
        self.weights = scaled / scaled.sum()
        lo = 0
        for expert, grad in zip(self.experts, grads):
            lo += expert.update(grad)
        self.cum_expert_losses += vals
        self.round += 1
        return lo

    def observe(self, loss) -> ObserveRecord:
        x = self.predict()
        value = validate_unit_loss(float(loss.value(x)))
        self.cum_loss += value
        points = [e.predict() for e in self.experts]
        values = [loss.value(p) for p in points]
        grads = [loss.grad(p) for p in points]
        lo = self.update_from_losses(values, grads)
        return ObserveRecord(loss_value=value, lo_calls_delta=lo)

    def meta_regret_bound(self, expert_index: int) -> float:
        """Guaranteed meta-regret cap against expert i (0-based index)."""
        i = expert_index + 1
        return math.sqrt(2.0 * self.horizon) / 4.0 * (1.0 + 2.0 * math.log(i + 1.0))

    def diagnostics(self) -> list[dict]:
        return [{"expert": i + 1, "eta": self.step_sizes[i],
                 "weight": float(self.weights[i]),
                 "cum_loss": float(self.cum_expert_losses[i])}
                for i in range(self.num_experts)]
