"""Regret evaluators: static, dynamic (with path length), and the
windowed adaptive variants, all against offline comparator oracles."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError
from .streams import comparator_sequence, offline_minimize


@dataclass
class RunTrace:
    """Per-round record of one online run."""

    losses: list[float]
    lo_calls: list[int] = field(default_factory=list)
    wall_ns: list[int] = field(default_factory=list)
    algo_id: str = ""
    points: list[np.ndarray] | None = None
    complete: bool = True

    def __post_init__(self):
        n = len(self.losses)
        if not self.lo_calls:
            self.lo_calls = [0] * n
        if not self.wall_ns:
            self.wall_ns = [0] * n
        for name, seq in (("lo_calls", self.lo_calls), ("wall_ns", self.wall_ns)):
            if len(seq) != n:
                raise ContractViolationError(f"{name} length differs from losses")
        if self.points is not None and len(self.points) != n:
            raise ContractViolationError("points length differs from losses")

    def __len__(self):
        return len(self.losses)

    @property
    def cum_loss(self) -> float:
        return float(sum(self.losses))

    @property
    def total_lo_calls(self) -> int:
        return int(sum(self.lo_calls))


def _comparator_loss(stream, u: np.ndarray, start: int, end: int) -> float:
    return float(sum(stream.loss_at(t).value(u) for t in range(start, end + 1)))


def static_regret(trace: RunTrace, stream, iterations: int = 2000,
                  tol: float = 1e-6) -> float:
    """Cumulative loss minus the best fixed point's cumulative loss."""
    T = len(trace)
    comp = comparator_sequence(stream, "fixed", iterations, tol)
    u = comp.points[0]
    return trace.cum_loss - _comparator_loss(stream, u, 1, T)


def dynamic_regret(trace: RunTrace, comparators, stream):
    """Loss gap against an arbitrary comparator sequence, plus its path
    length sum_t ||u_{t-1} - u_t||."""
    pts = np.asarray(comparators, dtype=np.float64)
    T = len(trace)
    if pts.shape[0] != T:
        raise ContractViolationError("need one comparator per round")
    seen = set()
    for row in pts:
        key = row.tobytes()
        if key not in seen:
            seen.add(key)
            if not stream.domain.contains(row, tol=1e-6):
                raise ContractViolationError("infeasible comparator point")
    comp_loss = float(sum(stream.loss_at(t).value(pts[t - 1])
                          for t in range(1, T + 1)))
    path = float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
    return trace.cum_loss - comp_loss, path


def _window_regret(trace, stream, start, end, x0, iterations, tol):
    avg = stream.average_loss(start, end)
    u, info = offline_minimize(avg, stream.domain, stream.lipschitz,
                               iterations, tol, x0=x0)
    played = float(sum(trace.losses[start - 1:end]))
    return played - _comparator_loss(stream, u, start, end), u, info


def strongly_adaptive_regret(trace: RunTrace, stream, tau: int,
                             stride: int = 1, iterations: int = 2000,
                             tol: float = 1e-6) -> float:
    """Worst static regret over length-tau windows starting on the
    stride grid s in {1, 1+stride, ...}."""
    T = len(trace)
    if not 1 <= tau <= T:
        raise ContractViolationError("need 1 <= tau <= T")
    if stride < 1:
        raise ContractViolationError("stride must be >= 1")
    worst = -np.inf
    warm = None
    for s in range(1, T - tau + 2, stride):
        reg, warm, _ = _window_regret(trace, stream, s, s + tau - 1, warm,
                                      iterations, tol)
        worst = max(worst, reg)
    return float(worst)


def weak_adaptive_regret(trace: RunTrace, stream, stride: int = 1,
                         iterations: int = 2000, tol: float = 1e-6) -> float:
    """Worst static regret over windows with both endpoints on the
    stride grid (all windows at stride 1)."""
    T = len(trace)
    if stride < 1:
        raise ContractViolationError("stride must be >= 1")
    worst = -np.inf
    for s in range(1, T + 1, stride):
        warm = None
        ends = sorted({*range(s, T + 1, stride), T})
        for e in ends:
            reg, warm, _ = _window_regret(trace, stream, s, e, warm,
                                          iterations, tol)
            worst = max(worst, reg)
    return float(worst)


@dataclass
class RegretReport:
    static: float
    dynamic: float
    dynamic_path_length: float
    strongly_adaptive: dict[int, float]
    weak_adaptive: float | None = None
    oracle: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"static": self.static, "dynamic": self.dynamic,
                "dynamic_path_length": self.dynamic_path_length,
                "strongly_adaptive": {str(k): v for k, v in
                                      sorted(self.strongly_adaptive.items())},
                "weak_adaptive": self.weak_adaptive,
                "oracle": self.oracle}

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.as_dict(), **kwargs)


def build_report(trace: RunTrace, stream, taus=(), stride: int | None = None,
                 comparator_mode: str = "per_segment",
                 include_weak: bool = False, iterations: int = 2000,
                 tol: float = 1e-6) -> RegretReport:
    """Assemble every metric for one trace, recording oracle metadata."""
    comp = comparator_sequence(stream, comparator_mode, iterations, tol)
    dyn, path = dynamic_regret(trace, comp.points, stream)
    sa = {}
    for tau in taus:
        st = stride if stride is not None else max(1, tau // 8)
        sa[int(tau)] = strongly_adaptive_regret(trace, stream, tau, st,
                                                iterations, tol)
    weak = None
    if include_weak:
        weak = weak_adaptive_regret(trace, stream, stride or 1, iterations, tol)
    return RegretReport(
        static=static_regret(trace, stream, iterations, tol),
        dynamic=dyn, dynamic_path_length=path, strongly_adaptive=sa,
        weak_adaptive=weak,
        oracle={"comparator_mode": comparator_mode,
                "solver": {"iterations_cap": iterations, "tolerance": tol},
                "comparator_solves": comp.solver_info})
