"""Exception types shared across the package."""


class ContractViolationError(ValueError):
    """A caller broke an operation's precondition (dimension mismatch,
    infeasible start point, out-of-range round index, ...)."""


class LossOutOfRangeError(ValueError):
    """A loss value left [0, 1] by more than the tolerated slack; the
    meta-algorithms' guarantees are void, so this signals an unscaled
    stream rather than silently clamping."""


class CapabilityError(NotImplementedError):
    """The domain does not support the requested operation (e.g. exact
    projection on a trace-norm ball, feasibility check on a custom
    domain without a registered checker)."""


class FileFormatError(ValueError):
    """A data file line failed to parse; the message names the line."""


class ConvergenceError(RuntimeError):
    """An iterative solver (power iteration, offline comparator solver)
    did not reach its tolerance within its budget.

    Attributes:
        residual: last measured convergence residual.
        iterations: iterations performed.
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class IterationBudgetError(RuntimeError):
    """An inner loop exceeded its hard iteration cap. For the
    Frank-Wolfe / pull loops this indicates a broken linear
    optimization oracle, since the caps sit at twice the proven
    worst-case bounds.

    Attributes:
        diagnostics: dict with loop name, iteration count and cap.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class UndefinedPotentialError(ValueError):
    """The meta-weight potential was evaluated at C = 0 with positive
    clipped regret, where exp([R]+^2 / 3C) is undefined."""


class LearnerAbortedError(RuntimeError):
    """A learner raised mid-run; carries the partial trace.

    Attributes:
        trace: the partial RunTrace (flagged incomplete).
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
