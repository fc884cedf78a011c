"""Blocked online gradient descent over an infeasible-projection oracle.

The learner submits a fixed feasible point for a whole block of K
rounds while summing the observed gradients; at the block boundary it
takes one gradient step from the near-feasible iterate y~ and calls the
infeasible-projection oracle to obtain the next block's pair (x, y~).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import as_point
from .driver import ObserveRecord
from .errors import ContractViolationError
from .oracle import IpConfig, infeasible_project


@dataclass(frozen=True)
class BogdParams:
    """Step size, block size and oracle tolerance (plus optional horizon).

    `from_eta` ties them together by the schedule K = ceil(eta^(-2/3)),
    eps = eta^(2/3); raw combinations stay available for ablations.
    """

    eta: float
    block_size: int
    epsilon: float
    horizon: int | None = None

    def __post_init__(self):
        if self.eta <= 0 or self.epsilon <= 0 or self.block_size < 1:
            raise ContractViolationError("eta, epsilon and block size must be positive")
        if self.horizon is not None and self.horizon < 1:
            raise ContractViolationError("horizon must be positive when given")

    @classmethod
    def from_eta(cls, eta: float, horizon: int | None = None) -> "BogdParams":
        if eta <= 0:
            raise ContractViolationError("eta must be positive")
        # the 1e-9 guard keeps e.g. eta = T^(-3/4) on square T at K = sqrt(T)
        # exactly despite pow() rounding the exponent up by one ulp
        block = max(1, math.ceil(eta ** (-2.0 / 3.0) - 1e-9))
        return cls(eta=eta, block_size=block, epsilon=eta ** (2.0 / 3.0),
                   horizon=horizon)

    @classmethod
    def for_horizon(cls, T: int, c: float = 1.0) -> "BogdParams":
        """The schedule eta = c * T^(-3/4) for a known horizon."""
        if T < 1:
            raise ContractViolationError("horizon must be positive")
        return cls.from_eta(c * float(T) ** -0.75, horizon=T)


class _KahanAcc:
    """Compensated vector accumulator for very high dimensions."""

    def __init__(self, dim):
        self.s = np.zeros(dim)
        self.c = np.zeros(dim)

    def add(self, v):
        y = v - self.c
        t = self.s + y
        self.c = (t - self.s) - y
        self.s = t

    def reset(self):
        self.s[:] = 0.0
        self.c[:] = 0.0

    @property
    def value(self):
        return self.s


class _PlainAcc:
    def __init__(self, dim):
        self.s = np.zeros(dim)

    def add(self, v):
        self.s += v

    def reset(self):
        self.s[:] = 0.0

    @property
    def value(self):
        return self.s


class BogdIp:
    """One blocked-gradient learner instance over a domain."""

    def __init__(self, domain, params: BogdParams, x_start=None,
                 ip_config: IpConfig | None = None,
                 compensated: bool | None = None):
        self.domain = domain
        self.params = params
        if x_start is None:
            x_start = domain.origin()
        x_start = as_point(x_start, domain.dim)
        if not domain.contains(x_start, tol=1e-9):
            raise ContractViolationError("start point is not feasible")
        self._x = np.array(x_start, copy=True)
        self._y = np.array(x_start, copy=True)
        self._ip = ip_config or IpConfig(epsilon=params.epsilon)
        # compensated summation only pays off at very high dimension
        if compensated is None:
            compensated = domain.dim > 100_000
        self._acc = (_KahanAcc if compensated else _PlainAcc)(domain.dim)
        self.round_in_block = 0
        self.block_index = 1
        self.lo_calls_total = 0
        self.ip_calls_total = 0
        self.rounds_seen = 0

    @property
    def x(self) -> np.ndarray:
        return self._x

    @property
    def y_tilde(self) -> np.ndarray:
        return self._y

    def predict(self) -> np.ndarray:
        return self._x

    def update(self, grad) -> int:
        """Fold in the gradient at the current block point; at block
        boundaries run the oracle step. Returns the LO calls spent."""
        grad = as_point(grad, self.domain.dim)
        self._acc.add(grad)
        self.round_in_block += 1
        self.rounds_seen += 1
        at_boundary = self.round_in_block == self.params.block_size
        at_horizon = (self.params.horizon is not None
                      and self.rounds_seen == self.params.horizon)
        if not (at_boundary or at_horizon):
            return 0
        y_next = self._y - self.params.eta * self._acc.value
        res = infeasible_project(self.domain, self._ip, self._x, y_next)
        self._x = res.x
        self._y = res.y_tilde
        self._acc.reset()
        self.round_in_block = 0
        self.block_index += 1
        self.ip_calls_total += 1
        self.lo_calls_total += res.lo_calls
        return res.lo_calls

    def observe(self, loss) -> ObserveRecord:
        x = self._x
        value = float(loss.value(x))
        lo = self.update(loss.grad(x))
        return ObserveRecord(loss_value=value, lo_calls_delta=lo)

    def diagnostics(self) -> dict:
        return {"eta": self.params.eta, "block_size": self.params.block_size,
                "epsilon": self.params.epsilon, "block_index": self.block_index,
                "lo_calls_total": self.lo_calls_total}
