"""Adaptive-regret ensemble over geometric covering intervals.

Dyadic intervals [i*2^k, (i+1)*2^k - 1] partition every scale; one
blocked-gradient expert is spawned per interval with step size
|I|^(-3/4) and the active ones (at most floor(log2 t) + 1 per round)
are combined by a parameter-free potential-based meta learner driven by
each expert's cumulative regret R and absolute-regret mass C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bogd import BogdIp, BogdParams
from .domains import as_point
from .driver import ObserveRecord
from .errors import ContractViolationError, UndefinedPotentialError
from .pold import validate_unit_loss

ANH_VARIANTS = ("paper", "classic")


@dataclass(frozen=True)
class GcInterval:
    level: int
    index: int

    @property
    def start(self) -> int:
        return self.index * 2**self.level

    @property
    def end(self) -> int:
        return (self.index + 1) * 2**self.level - 1

    @property
    def length(self) -> int:
        return 2**self.level

    def __str__(self):
        return f"[{self.start},{self.end}]"


def gc_intervals_starting_at(t: int, max_level: int = 30) -> list[GcInterval]:
    """All covering intervals whose first round is t: one per level
    k = 0 .. v2(t), where v2 is the 2-adic valuation."""
    if t < 1:
        raise ContractViolationError("rounds are 1-based")
    out = []
    level = 0
    while t % (2**level) == 0 and level <= max_level:
        out.append(GcInterval(level=level, index=t // 2**level))
        level += 1
    return out


def anh_potential(regret: float, abs_regret: float) -> float:
    """exp([R]+^2 / 3C), with the conventions: 1 whenever [R]+ = 0, the
    C < 0 case evaluated literally, and C = 0 with [R]+ > 0 undefined."""
    rp = max(regret, 0.0)
    if rp == 0.0:
        return 1.0
    if abs_regret == 0.0:
        raise UndefinedPotentialError(
            "potential undefined at C = 0 with positive clipped regret")
    return math.exp(rp * rp / (3.0 * abs_regret))


def anh_weight(regret: float, abs_regret: float, variant: str = "paper") -> float:
    """Raw meta weight from the potential, before flooring/normalizing.

    'paper' shifts C on both sides of the difference and can go
    negative once C > 1; 'classic' shifts R instead and is nonnegative.
    """
    if variant == "paper":
        return 0.5 * (anh_potential(regret + 1.0, abs_regret + 1.0)
                      - anh_potential(regret + 1.0, abs_regret - 1.0))
    if variant == "classic":
        return 0.5 * (anh_potential(regret + 1.0, abs_regret + 1.0)
                      - anh_potential(regret - 1.0, abs_regret + 1.0))
    raise ContractViolationError(f"unknown variant {variant!r}; pick from {ANH_VARIANTS}")


def _weight_exponents(regret: float, abs_regret: float, variant: str):
    """(a, b) with raw weight = (e^a - e^b)/2, or None when [R+1]+ = 0."""
    rp = regret + 1.0
    if rp <= 0.0:
        return None
    q = rp * rp / 3.0
    if variant == "paper":
        if abs_regret == 1.0:
            raise UndefinedPotentialError(
                "potential undefined at C = 0 with positive clipped regret")
        return q / (abs_regret + 1.0), q / (abs_regret - 1.0)
    rm = max(regret - 1.0, 0.0)
    return q / (abs_regret + 1.0), rm * rm / (3.0 * (abs_regret + 1.0))


class IntervalRoster:
    """Incremental covering-interval schedule: after advancing to round
    t the roster holds exactly the intervals containing t."""

    def __init__(self, max_level: int = 30):
        self.max_level = int(max_level)
        self.current_round = 1
        self.intervals: list[GcInterval] = list(
            gc_intervals_starting_at(1, self.max_level))

    def advance(self) -> tuple[list[GcInterval], list[GcInterval]]:
        """Move to the next round; returns (dropped, created)."""
        self.current_round += 1
        t = self.current_round
        dropped = [i for i in self.intervals if i.end < t]
        self.intervals = [i for i in self.intervals if i.end >= t]
        created = gc_intervals_starting_at(t, self.max_level)
        self.intervals.extend(created)
        return dropped, created


@dataclass
class ActiveExpert:
    interval: GcInterval
    learner: BogdIp
    regret: float = 0.0
    abs_regret: float = 0.0


class Pola:
    """Interval-scheduled ensemble with the potential-based meta learner."""

    def __init__(self, domain, x_start=None, anh_variant: str = "paper",
                 max_level: int = 30, c: float = 1.0):
        if anh_variant not in ANH_VARIANTS:
            raise ContractViolationError(
                f"unknown variant {anh_variant!r}; pick from {ANH_VARIANTS}")
        self.domain = domain
        self.anh_variant = anh_variant
        self.max_level = int(max_level)
        self.c = float(c)
        if x_start is None:
            x_start = domain.origin()
        self._last_prediction = as_point(x_start, domain.dim)
        self._roster = IntervalRoster(self.max_level)
        self.active: list[ActiveExpert] = [
            self._make_expert(i) for i in self._roster.intervals]
        self.lo_calls_total = 0

    @property
    def current_round(self) -> int:
        return self._roster.current_round

    def _make_expert(self, interval: GcInterval) -> ActiveExpert:
        eta = self.c * float(interval.length) ** -0.75
        params = BogdParams.from_eta(eta, horizon=interval.length)
        return ActiveExpert(interval,
                            BogdIp(self.domain, params,
                                   x_start=self._last_prediction))

    def normalized_weights(self) -> np.ndarray:
        """Meta weights over the active set: raw potential weights
        floored at zero, uniform fallback when all vanish. Computed in
        exp-scaled form so long intervals cannot overflow."""
        n = len(self.active)
        exps = []
        for e in self.active:
            ab = _weight_exponents(e.regret, e.abs_regret, self.anh_variant)
            if ab is None or ab[0] <= ab[1]:
                exps.append(None)  # zero or negative raw weight: floored
            else:
                exps.append(ab)
        live = [ab for ab in exps if ab is not None]
        if not live:
            return np.full(n, 1.0 / n)
        top = max(a for a, _ in live)
        w = np.zeros(n)
        for i, ab in enumerate(exps):
            if ab is not None:
                a, b = ab
                w[i] = math.exp(a - top) * (1.0 - math.exp(b - a))
        return w / w.sum()

    def predict(self) -> np.ndarray:
        weights = self.normalized_weights()
        pts = np.stack([e.learner.predict() for e in self.active])
        return weights @ pts

    def observe(self, loss) -> ObserveRecord:
        x = self.predict()
        meta_value = validate_unit_loss(float(loss.value(x)))
        lo = 0
        for e in self.active:
            xi = e.learner.predict()
            vi = validate_unit_loss(float(loss.value(xi)))
            e.regret += meta_value - vi
            e.abs_regret += abs(meta_value - vi)
            lo += e.learner.update(loss.grad(xi))
        self.lo_calls_total += lo
        self._last_prediction = x
        dropped, created = self._roster.advance()
        ended = {(i.level, i.index) for i in dropped}
        self.active = [e for e in self.active
                       if (e.interval.level, e.interval.index) not in ended]
        self.active.extend(self._make_expert(i) for i in created)
        return ObserveRecord(loss_value=meta_value, lo_calls_delta=lo)

    def diagnostics(self) -> list[dict]:
        weights = self.normalized_weights()
        return [{"interval": str(e.interval), "level": e.interval.level,
                 "regret": e.regret, "abs_regret": e.abs_regret,
                 "weight": float(weights[i])}
                for i, e in enumerate(self.active)]
