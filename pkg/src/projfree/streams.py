"""Non-stationary loss streams with certified [0, 1] scaling.

Each stream owns a domain, a drift schedule (a sign flip of its targets
or features every `segment_length` rounds) and a scale factor computed
at construction so the supremum of the raw loss over the domain is at
most 1/scale_factor. Streams are pure functions of (spec, t): the same
seed reproduces the same losses bitwise.
"""

from __future__ import annotations

import math

import numpy as np

from .domains import Domain, TraceNormBall, as_point
from .errors import ContractViolationError, ConvergenceError, FileFormatError


class LossFunction:
    """One round's convex loss: scaled value plus a subgradient."""

    __slots__ = ("value", "grad", "round")

    def __init__(self, value, grad, round: int = 0):
        self.value = value
        self.grad = grad
        self.round = round


class Stream:
    kind = "abstract"

    def __init__(self, domain: Domain, horizon: int, segment_length: int,
                 seed: int = 0):
        if horizon < 1:
            raise ContractViolationError("horizon must be >= 1")
        if segment_length < 1:
            raise ContractViolationError("segment_length must be >= 1")
        self.domain = domain
        self.horizon = int(horizon)
        self.segment_length = int(segment_length)
        self.seed = int(seed)
        self.scale_factor = 1.0
        self.lipschitz = 1.0

    def segment_of(self, t: int) -> int:
        return (t - 1) // self.segment_length

    def sign(self, t: int) -> float:
        return 1.0 if self.segment_of(t) % 2 == 0 else -1.0

    def segments(self) -> list[tuple[int, int]]:
        """(first, last) round of every segment."""
        out = []
        a = 1
        while a <= self.horizon:
            b = min(a + self.segment_length - 1, self.horizon)
            out.append((a, b))
            a = b + 1
        return out

    def loss_at(self, t: int) -> LossFunction:
        if not 1 <= t <= self.horizon:
            raise ContractViolationError(
                f"round {t} outside 1..{self.horizon}")
        return self._build(t)

    def _build(self, t: int) -> LossFunction:
        raise NotImplementedError

    def average_loss(self, start: int, end: int) -> LossFunction:
        """Mean of the rounds in [start, end]; kinds with sufficient
        statistics override this with a closed form."""
        if not 1 <= start <= end <= self.horizon:
            raise ContractViolationError("bad window")
        losses = [self.loss_at(t) for t in range(start, end + 1)]
        inv = 1.0 / len(losses)

        def value(x):
            return inv * sum(l.value(x) for l in losses)

        def grad(x):
            g = losses[0].grad(x).copy()
            for l in losses[1:]:
                g += l.grad(x)
            return inv * g

        return LossFunction(value, grad)

    def describe(self) -> dict:
        return {"kind": self.kind, "horizon": self.horizon,
                "segment_length": self.segment_length, "seed": self.seed,
                "scale_factor": self.scale_factor,
                "lipschitz": self.lipschitz,
                "domain": self.domain.describe()}


def _unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    u = rng.standard_normal(dim)
    nrm = float(np.linalg.norm(u))
    if nrm == 0.0:
        u = np.zeros(dim)
        u[0] = 1.0
        return u
    return u / nrm


class DriftingQuadratic(Stream):
    """f_t(x) = s * ||x - c_t||^2 with the center c_t flipping sign each
    segment; s = 1/(R + ||c||)^2 certifies the [0, 1] range."""

    kind = "drifting_quadratic"

    def __init__(self, domain, horizon, segment_length, seed=0,
                 center_scale: float = 0.5):
        super().__init__(domain, horizon, segment_length, seed)
        rng = np.random.default_rng(self.seed)
        self.center = center_scale * domain.radius * _unit_vector(rng, domain.dim)
        reach = domain.radius + float(np.linalg.norm(self.center))
        self.scale_factor = 1.0 / reach**2
        self.lipschitz = 2.0 * self.scale_factor * reach
        signs = np.array([self.sign(t) for t in range(1, horizon + 1)])
        self._sign_prefix = np.concatenate([[0.0], np.cumsum(signs)])

    def center_at(self, t: int) -> np.ndarray:
        return self.sign(t) * self.center

    def _build(self, t):
        c = self.center_at(t)
        s = self.scale_factor

        def value(x):
            d = x - c
            return s * float(d @ d)

        def grad(x):
            return (2.0 * s) * (x - c)

        return LossFunction(value, grad, t)

    def average_loss(self, start, end):
        if not 1 <= start <= end <= self.horizon:
            raise ContractViolationError("bad window")
        sbar = (self._sign_prefix[end] - self._sign_prefix[start - 1]) / (end - start + 1)
        c, s = self.center, self.scale_factor
        cc = float(c @ c)

        def value(x):
            return s * (float(x @ x) - 2.0 * sbar * float(c @ x) + cc)

        def grad(x):
            return (2.0 * s) * (x - sbar * c)

        return LossFunction(value, grad)


class PiecewiseLinear(Stream):
    """f_t(x) = (<s_t u, x> + R) / (2R) for a fixed unit direction u
    whose sign flips each segment."""

    kind = "piecewise_linear"

    def __init__(self, domain, horizon, segment_length, seed=0):
        super().__init__(domain, horizon, segment_length, seed)
        rng = np.random.default_rng(self.seed)
        self.slope = _unit_vector(rng, domain.dim)
        self.scale_factor = 1.0 / (2.0 * domain.radius)
        self.lipschitz = self.scale_factor
        signs = np.array([self.sign(t) for t in range(1, horizon + 1)])
        self._sign_prefix = np.concatenate([[0.0], np.cumsum(signs)])

    def _build(self, t):
        g = (self.sign(t) * self.scale_factor) * self.slope
        offset = self.scale_factor * self.domain.radius

        def value(x):
            return float(g @ x) + offset

        def grad(x):
            return g.copy()

        return LossFunction(value, grad, t)

    def average_loss(self, start, end):
        if not 1 <= start <= end <= self.horizon:
            raise ContractViolationError("bad window")
        sbar = (self._sign_prefix[end] - self._sign_prefix[start - 1]) / (end - start + 1)
        g = (sbar * self.scale_factor) * self.slope
        offset = self.scale_factor * self.domain.radius
        return LossFunction(lambda x: float(g @ x) + offset,
                            lambda x: g.copy())


class MatrixCompletion(Stream):
    """Absolute-error reconstruction of drifting rating entries over a
    trace-norm ball; each round observes an equal slice of the shuffled
    ratings and the target values flip sign each segment."""

    kind = "matrix_completion"

    def __init__(self, domain: TraceNormBall, horizon, segment_length,
                 triples, seed=0):
        if not isinstance(domain, TraceNormBall):
            raise ContractViolationError("matrix completion needs a trace-norm domain")
        super().__init__(domain, horizon, segment_length, seed)
        triples = list(triples)
        self.entries_per_round = len(triples) // self.horizon
        if self.entries_per_round < 1:
            raise ContractViolationError(
                f"{len(triples)} ratings cannot cover horizon {self.horizon}")
        rng = np.random.default_rng(self.seed)
        order = rng.permutation(len(triples))
        used = self.entries_per_round * self.horizon
        rows = np.array([triples[i][0] for i in order[:used]], dtype=np.intp)
        cols = np.array([triples[i][1] for i in order[:used]], dtype=np.intp)
        if rows.size and (rows.min() < 0 or rows.max() >= domain.rows
                          or cols.min() < 0 or cols.max() >= domain.cols):
            raise ContractViolationError("rating indices escape the matrix shape")
        self._idx = rows * domain.cols + cols
        self._vals = np.array([triples[i][2] for i in order[:used]])
        max_abs = float(np.max(np.abs(self._vals))) if used else 1.0
        self.scale_factor = 1.0 / (self.entries_per_round * (domain.delta + max_abs))
        self.lipschitz = self.scale_factor * math.sqrt(self.entries_per_round)

    def _build(self, t):
        q = self.entries_per_round
        sl = slice((t - 1) * q, t * q)
        idx = self._idx[sl]
        target = self.sign(t) * self._vals[sl]
        s = self.scale_factor
        dim = self.domain.dim

        def value(x):
            return s * float(np.sum(np.abs(x[idx] - target)))

        def grad(x):
            g = np.zeros(dim)
            np.add.at(g, idx, s * np.sign(x[idx] - target))
            return g

        return LossFunction(value, grad, t)


class MulticlassLogistic(Stream):
    """Multivariate logistic loss over a trace-norm ball of class-score
    weights; features flip sign each segment. Each round averages an
    equal slice of the example stream."""

    kind = "multiclass_logistic"

    def __init__(self, domain: TraceNormBall, horizon, segment_length,
                 features, labels, seed=0):
        if not isinstance(domain, TraceNormBall):
            raise ContractViolationError("multiclass logistic needs a trace-norm domain")
        super().__init__(domain, horizon, segment_length, seed)
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.intp)
        if features.ndim != 2 or features.shape[1] != domain.cols:
            raise ContractViolationError("feature dimension must match domain columns")
        if labels.min() < 0 or labels.max() >= domain.rows:
            raise ContractViolationError("labels must index domain rows")
        if domain.rows < 2:
            raise ContractViolationError("need at least two classes")
        self.examples_per_round = features.shape[0] // self.horizon
        if self.examples_per_round < 1:
            raise ContractViolationError(
                f"{features.shape[0]} examples cannot cover horizon {self.horizon}")
        rng = np.random.default_rng(self.seed)
        order = rng.permutation(features.shape[0])
        used = self.examples_per_round * self.horizon
        self._features = features[order[:used]]
        self._labels = labels[order[:used]]
        max_norm = float(np.max(np.linalg.norm(self._features, axis=1)))
        h = domain.rows
        # log(1 + (h-1) exp(2 delta max||e||)) without overflow
        z = 2.0 * domain.delta * max_norm
        self.scale_factor = 1.0 / float(np.logaddexp(0.0, math.log(h - 1) + z))
        self.lipschitz = 2.0 * self.scale_factor * max_norm

    @staticmethod
    def _raw_value_probs(X, e, label):
        scores = X @ e
        margins = np.delete(scores - scores[label], label)
        top = max(0.0, float(np.max(margins)))
        lse = top + math.log(math.exp(-top) + float(np.sum(np.exp(margins - top))))
        probs = np.exp(margins - lse)
        return lse, probs

    def _build(self, t):
        q = self.examples_per_round
        sl = slice((t - 1) * q, t * q)
        feats = self.sign(t) * self._features[sl]
        labels = self._labels[sl]
        s = self.scale_factor
        h, d = self.domain.rows, self.domain.cols

        def value(x):
            X = x.reshape(h, d)
            total = 0.0
            for e, l in zip(feats, labels):
                lse, _ = self._raw_value_probs(X, e, l)
                total += lse
            return s * total / q

        def grad(x):
            X = x.reshape(h, d)
            G = np.zeros((h, d))
            for e, l in zip(feats, labels):
                _, probs = self._raw_value_probs(X, e, l)
                full = np.insert(probs, l, -float(np.sum(probs)))
                G += np.outer(full, e)
            return (s / q) * G.reshape(-1)

        return LossFunction(value, grad, t)


def load_ratings_file(path, limit=None):
    """Tab-separated `user item rating timestamp` lines with 1-based
    indices; returns up to `limit` (row, col, value) triples 0-based."""
    out = []
    if limit == 0:
        return out
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) < 4:
                raise FileFormatError(f"{path}:{ln}: expected 4 tab-separated fields")
            try:
                user, item, rating = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise FileFormatError(f"{path}:{ln}: {exc}") from exc
            if user < 1 or item < 1:
                raise FileFormatError(f"{path}:{ln}: indices are 1-based")
            out.append((user - 1, item - 1, rating))
            if limit is not None and len(out) >= limit:
                break
    return out


def load_multiclass_file(path, dim, limit=None):
    """libsvm-style `label idx:val ...` lines with 1-based feature
    indices; returns (features array, labels array) with 0-based labels."""
    feats, labels = [], []
    if limit == 0:
        return np.zeros((0, dim)), np.zeros(0, dtype=np.intp)
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            try:
                label = int(parts[0])
                row = np.zeros(dim)
                for tok in parts[1:]:
                    idx, val = tok.split(":")
                    j = int(idx) - 1
                    if not 0 <= j < dim:
                        raise ValueError(f"feature index {idx} outside 1..{dim}")
                    row[j] = float(val)
            except (ValueError, IndexError) as exc:
                raise FileFormatError(f"{path}:{ln}: {exc}") from exc
            labels.append(label - 1)
            feats.append(row)
            if limit is not None and len(feats) >= limit:
                break
    return np.array(feats), np.array(labels, dtype=np.intp)


def synthetic_ratings(rows, cols, count, seed=0, rank=2):
    """Low-rank ratings in the MovieLens value range, for fixtures."""
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((rows, rank))
    V = rng.standard_normal((cols, rank))
    M = U @ V.T
    M = 1.0 + 4.0 * (M - M.min()) / (M.max() - M.min())
    out = []
    for _ in range(count):
        i = int(rng.integers(rows))
        j = int(rng.integers(cols))
        out.append((i, j, round(float(M[i, j]))))
    return out


def synthetic_multiclass(count, dim, classes, seed=0):
    """Linearly separable-ish labeled features, for fixtures."""
    rng = np.random.default_rng(seed)
    prototypes = rng.standard_normal((classes, dim))
    feats = np.empty((count, dim))
    labels = np.empty(count, dtype=np.intp)
    for i in range(count):
        l = int(rng.integers(classes))
        feats[i] = prototypes[l] + 0.5 * rng.standard_normal(dim)
        labels[i] = l
    return feats, labels


def offline_minimize(loss: LossFunction, domain: Domain, lipschitz: float,
                     iterations: int = 2000, tol: float = 1e-6,
                     x0=None, strict: bool = True):
    """Projected-gradient comparator oracle: step 1/(G sqrt(i)),
    converged once the gradient-mapping residual drops below tol.

    Returns (point, info dict). Non-convergence raises unless
    strict=False, which returns the smallest-residual iterate instead.
    """
    x = domain.origin() if x0 is None else as_point(x0, domain.dim)
    best_x, best_res = x, math.inf
    for i in range(1, iterations + 1):
        step = 1.0 / (lipschitz * math.sqrt(i))
        x_next = domain.project(x - step * loss.grad(x))
        res = float(np.linalg.norm(x - x_next)) / step
        if res < best_res:
            best_res, best_x = res, x_next
        x = x_next
        if res < tol:
            return x, {"converged": True, "iterations": i, "residual": res}
    if strict:
        raise ConvergenceError(
            f"comparator solver residual {best_res:.3g} after {iterations} "
            f"iterations (tol {tol})", residual=best_res, iterations=iterations)
    return best_x, {"converged": False, "iterations": iterations,
                    "residual": best_res}


class ComparatorResult:
    """Comparator sequence plus its path length and solver metadata."""

    def __init__(self, points: np.ndarray, path_length: float, solver_info):
        self.points = points
        self.path_length = path_length
        self.solver_info = list(solver_info)

    def __iter__(self):
        yield self.points
        yield self.path_length


def comparator_sequence(stream: Stream, mode: str = "fixed",
                        iterations: int = 2000, tol: float = 1e-6,
                        strict: bool = True) -> ComparatorResult:
    """Offline comparators: the single best fixed point ('fixed') or the
    per-segment minimizers held constant within segments ('per_segment')."""
    T = stream.horizon
    if mode == "fixed":
        u, info = offline_minimize(stream.average_loss(1, T), stream.domain,
                                   stream.lipschitz, iterations, tol,
                                   strict=strict)
        return ComparatorResult(np.tile(u, (T, 1)), 0.0, [info])
    if mode != "per_segment":
        raise ContractViolationError("mode must be 'fixed' or 'per_segment'")
    points = np.zeros((T, stream.domain.dim))
    infos = []
    prev = None
    path = 0.0
    for a, b in stream.segments():
        u, info = offline_minimize(stream.average_loss(a, b), stream.domain,
                                   stream.lipschitz, iterations, tol,
                                   x0=prev, strict=strict)
        points[a - 1:b] = u
        infos.append(info)
        if prev is not None:
            path += float(np.linalg.norm(u - prev))
        prev = u
    return ComparatorResult(points, path, infos)
