"""The predict -> observe interaction contract and the online loop.

Every learner exposes `predict()` (side-effect free, returns a feasible
point) and `observe(loss)` (advances exactly one round, returns an
accounting record). The driver reveals the round's loss to the learner
only after the prediction's value has been recorded, so the adversary's
function can never leak into the prediction.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import ContractViolationError, LearnerAbortedError
from .metrics import RunTrace


@dataclass(frozen=True)
class ObserveRecord:
    loss_value: float
    lo_calls_delta: int = 0


class OnlineLearner(Protocol):
    def predict(self) -> np.ndarray: ...

    def observe(self, loss) -> ObserveRecord: ...


def drive(learner, stream, T: int, algo_id: str = "",
          keep_points: bool = False) -> RunTrace:
    """Run the online protocol for T rounds and collect the trace.

    The loss recorded at round t is f_t at the round-t prediction,
    evaluated before the learner updates. A learner exception aborts
    the run with the partial trace attached (flagged incomplete).
    """
    if T < 0 or T > stream.horizon:
        raise ContractViolationError(
            f"T={T} outside the stream horizon {stream.horizon}")
    losses: list[float] = []
    lo_calls: list[int] = []
    wall_ns: list[int] = []
    points: list[np.ndarray] | None = [] if keep_points else None
    for t in range(1, T + 1):
        loss = stream.loss_at(t)
        start = time.perf_counter_ns()
        try:
            x = learner.predict()
            value = float(loss.value(x))
            rec = learner.observe(loss)
        except Exception as exc:
            partial = RunTrace(losses=losses, lo_calls=lo_calls,
                               wall_ns=wall_ns, algo_id=algo_id,
                               points=points, complete=False)
            raise LearnerAbortedError(
                f"learner failed at round {t}: {exc}", trace=partial) from exc
        wall_ns.append(time.perf_counter_ns() - start)
        losses.append(value)
        lo_calls.append(int(rec.lo_calls_delta))
        if points is not None:
            points.append(np.array(x, copy=True))
    return RunTrace(losses=losses, lo_calls=lo_calls, wall_ns=wall_ns,
                    algo_id=algo_id, points=points, complete=True)
