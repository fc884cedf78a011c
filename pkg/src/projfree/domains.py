"""Convex decision sets exposed through linear-optimization oracles.

Every domain K contains the origin and ships the radius R of its
enclosing Euclidean ball (diameter D = 2R). Decision points are plain
1-D float64 numpy arrays; matrix domains store points row-major
flattened so the algorithms stay dimension-agnostic.
"""

from __future__ import annotations

import numpy as np

from .errors import CapabilityError, ContractViolationError, ConvergenceError


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-D float64 vector, optionally checking length."""
    p = np.ascontiguousarray(x, dtype=np.float64)
    if p.ndim != 1:
        p = p.reshape(-1)
    if dim is not None and p.shape[0] != dim:
        raise ContractViolationError(
            f"expected a point of dimension {dim}, got {p.shape[0]}")
    if not np.all(np.isfinite(p)):
        raise ContractViolationError("point has non-finite entries")
    return p


def clip_to_ball(p: np.ndarray, radius: float) -> np.ndarray:
    """Rescale p into the centered ball: p / max(1, ||p||/radius)."""
    if radius <= 0:
        raise ContractViolationError("radius must be positive")
    nrm = float(np.linalg.norm(p))
    scale = max(1.0, nrm / radius)
    return p / scale


class Domain:
    """Base class: a convex set with an LO oracle and geometric constants."""

    kind = "abstract"

    def __init__(self, dim: int, radius: float):
        if dim <= 0:
            raise ContractViolationError("dim must be positive")
        if radius <= 0:
            raise ContractViolationError("radius must be positive")
        self.dim = int(dim)
        self.radius = float(radius)

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def origin(self) -> np.ndarray:
        return np.zeros(self.dim)

    def linear_minimize(self, direction: np.ndarray) -> np.ndarray:
        """Return argmin_{v in K} <direction, v>."""
        raise NotImplementedError

    def contains(self, p: np.ndarray, tol: float = 1e-9) -> bool:
        """Whether p satisfies the defining constraints within additive tol."""
        raise CapabilityError(f"{self.kind} domain has no feasibility checker")

    def project(self, p: np.ndarray) -> np.ndarray:
        """Euclidean projection onto K; only closed-form kinds support it."""
        raise CapabilityError(f"{self.kind} domain has no exact projection")

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Draw a feasible point (test support for the oracle contracts)."""
        raise CapabilityError(f"{self.kind} domain has no sampler")

    def describe(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "radius": self.radius}


class Ball(Domain):
    """Euclidean ball {x : ||x||_2 <= radius}."""

    kind = "ball"

    def linear_minimize(self, direction):
        g = as_point(direction, self.dim)
        nrm = float(np.linalg.norm(g))
        if nrm == 0.0:
            return self.origin()
        return (-self.radius / nrm) * g

    def contains(self, p, tol=1e-9):
        p = as_point(p, self.dim)
        return float(np.linalg.norm(p)) <= self.radius + tol

    def project(self, p):
        return clip_to_ball(as_point(p, self.dim), self.radius)

    def sample(self, rng):
        x = rng.standard_normal(self.dim)
        nrm = float(np.linalg.norm(x))
        if nrm == 0.0:
            return self.origin()
        r = self.radius * rng.random() ** (1.0 / self.dim)
        return (r / nrm) * x


class Box(Domain):
    """Axis-aligned box {x : lower <= x <= upper} with lower <= 0 <= upper."""

    kind = "box"

    def __init__(self, lower, upper):
        lower = np.ascontiguousarray(lower, dtype=np.float64)
        upper = np.ascontiguousarray(upper, dtype=np.float64)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ContractViolationError("box bounds must be equal-length vectors")
        if np.any(lower > upper):
            raise ContractViolationError("box needs lower <= upper")
        if np.any(lower > 0) or np.any(upper < 0):
            raise ContractViolationError("box must contain the origin")
        radius = float(np.sqrt(np.sum(np.maximum(lower**2, upper**2))))
        super().__init__(lower.shape[0], radius)
        self.lower = lower
        self.upper = upper

    @classmethod
    def symmetric(cls, dim: int, half_width: float) -> "Box":
        h = float(half_width)
        return cls(np.full(dim, -h), np.full(dim, h))

    def linear_minimize(self, direction):
        g = as_point(direction, self.dim)
        return np.where(g < 0.0, self.upper, self.lower)

    def contains(self, p, tol=1e-9):
        p = as_point(p, self.dim)
        return bool(np.all(p >= self.lower - tol) and np.all(p <= self.upper + tol))

    def project(self, p):
        return np.clip(as_point(p, self.dim), self.lower, self.upper)

    def sample(self, rng):
        return self.lower + rng.random(self.dim) * (self.upper - self.lower)


class Simplex(Domain):
    """Corner simplex {x : x >= 0, sum(x) <= 1}.

    Unlike the probability simplex this set contains the origin, which
    the algorithms require; its vertices are 0 and the unit basis
    vectors, so the LO solution is a vertex of minimum coordinate.
    """

    kind = "simplex"

    def __init__(self, dim: int):
        super().__init__(dim, 1.0)

    def linear_minimize(self, direction):
        g = as_point(direction, self.dim)
        j = int(np.argmin(g))
        v = np.zeros(self.dim)
        if g[j] < 0.0:
            v[j] = 1.0
        return v

    def contains(self, p, tol=1e-9):
        p = as_point(p, self.dim)
        return bool(np.all(p >= -tol) and float(np.sum(p)) <= 1.0 + tol)

    def project(self, p):
        p = as_point(p, self.dim)
        w = np.maximum(p, 0.0)
        if float(np.sum(w)) <= 1.0:
            return w
        # Sum constraint is active: project onto {x >= 0, sum(x) = 1}
        # by the usual sort-and-threshold rule.
        u = np.sort(p)[::-1]
        css = np.cumsum(u) - 1.0
        idx = np.arange(1, self.dim + 1)
        rho = int(np.max(np.nonzero(u - css / idx > 0)[0]))
        theta = css[rho] / (rho + 1.0)
        return np.maximum(p - theta, 0.0)

    def sample(self, rng):
        return rng.dirichlet(np.ones(self.dim + 1))[: self.dim]


class TraceNormBall(Domain):
    """Matrices {X : ||X||_* <= delta}, stored flattened row-major.

    The LO oracle needs only the top singular pair of the direction,
    computed by power iteration on G^T G with a seeded random unit
    start; tolerance and budget are exposed since the oracle is inexact.
    """

    kind = "trace_norm_ball"

    def __init__(self, rows: int, cols: int, delta: float,
                 lo_tol: float = 1e-8, lo_max_iters: int = 1000,
                 lo_seed: int = 0):
        if rows <= 0 or cols <= 0:
            raise ContractViolationError("matrix shape must be positive")
        super().__init__(rows * cols, float(delta))
        self.rows = int(rows)
        self.cols = int(cols)
        self.delta = float(delta)
        self.lo_tol = float(lo_tol)
        self.lo_max_iters = int(lo_max_iters)
        self.lo_seed = int(lo_seed)

    def _top_pair(self, G: np.ndarray):
        """Leading singular pair (u, v) of G by alternating power steps."""
        rng = np.random.default_rng(self.lo_seed)
        v = rng.standard_normal(self.cols)
        v /= np.linalg.norm(v)
        sigma = 0.0
        for it in range(self.lo_max_iters):
            u = G @ v
            s = float(np.linalg.norm(u))
            if s == 0.0:
                # direction lives in the null space of G^T; restart
                v = rng.standard_normal(self.cols)
                v /= np.linalg.norm(v)
                continue
            u /= s
            w = G.T @ u
            t = float(np.linalg.norm(w))
            if t == 0.0:
                break
            v = w / t
            if it > 0 and abs(t - sigma) <= self.lo_tol * max(t, 1e-30):
                return u, v
            sigma = t
        residual = abs(t - sigma) / max(t, 1e-30) if sigma else float("inf")
        raise ConvergenceError(
            "power iteration did not reach tolerance "
            f"{self.lo_tol} within {self.lo_max_iters} iterations",
            residual=residual, iterations=self.lo_max_iters)

    def linear_minimize(self, direction):
        g = as_point(direction, self.dim)
        if float(np.linalg.norm(g)) == 0.0:
            return self.origin()
        G = g.reshape(self.rows, self.cols)
        u, v = self._top_pair(G)
        return (-self.delta) * np.outer(u, v).reshape(-1)

    def nuclear_norm(self, p) -> float:
        p = as_point(p, self.dim)
        s = np.linalg.svd(p.reshape(self.rows, self.cols), compute_uv=False)
        return float(np.sum(s))

    def contains(self, p, tol=1e-9):
        return self.nuclear_norm(p) <= self.delta + tol

    def sample(self, rng):
        A = rng.standard_normal((self.rows, self.cols))
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
        s *= self.delta * rng.random() / float(np.sum(s))
        return (U @ np.diag(s) @ Vt).reshape(-1)

    def describe(self):
        d = super().describe()
        d.update(rows=self.rows, cols=self.cols, delta=self.delta,
                 lo_tol=self.lo_tol, lo_max_iters=self.lo_max_iters,
                 lo_seed=self.lo_seed)
        return d


class CustomDomain(Domain):
    """User-supplied oracles; missing capabilities raise CapabilityError."""

    kind = "custom"

    def __init__(self, dim, radius, lo_fn, contains_fn=None,
                 project_fn=None, sample_fn=None):
        super().__init__(dim, radius)
        self._lo_fn = lo_fn
        self._contains_fn = contains_fn
        self._project_fn = project_fn
        self._sample_fn = sample_fn

    def linear_minimize(self, direction):
        return as_point(self._lo_fn(as_point(direction, self.dim)), self.dim)

    def contains(self, p, tol=1e-9):
        if self._contains_fn is None:
            raise CapabilityError("custom domain has no registered feasibility checker")
        return bool(self._contains_fn(as_point(p, self.dim), tol))

    def project(self, p):
        if self._project_fn is None:
            raise CapabilityError("custom domain has no registered projection")
        return as_point(self._project_fn(as_point(p, self.dim)), self.dim)

    def sample(self, rng):
        if self._sample_fn is None:
            raise CapabilityError("custom domain has no registered sampler")
        return as_point(self._sample_fn(rng), self.dim)
