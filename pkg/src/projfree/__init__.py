"""Projection-free online convex optimization for non-stationary
environments: an infeasible-projection oracle built from linear
optimizations, a blocked gradient learner over it, step-size and
interval ensembles on top, plus loss streams and regret evaluators."""

from .baselines import ProjectedOgd, nuclear_projection
from .bogd import BogdIp, BogdParams
from .domains import (Ball, Box, CustomDomain, Domain, Simplex,
                      TraceNormBall, as_point, clip_to_ball)
from .driver import ObserveRecord, OnlineLearner, drive
from .kernels import backend_name, has_compiled
from .metrics import (RegretReport, RunTrace, build_report, dynamic_regret,
                      static_regret, strongly_adaptive_regret,
                      weak_adaptive_regret)
from .oracle import FwResult, IpConfig, IpResult, fw_approach, infeasible_project
from .pola import (GcInterval, IntervalRoster, Pola, anh_potential,
                   anh_weight, gc_intervals_starting_at)
from .pold import Pold, initial_weights, step_size_grid
from .streams import (ComparatorResult, DriftingQuadratic, LossFunction,
                      MatrixCompletion, MulticlassLogistic, PiecewiseLinear,
                      Stream, comparator_sequence, load_multiclass_file,
                      load_ratings_file, offline_minimize, synthetic_multiclass,
                      synthetic_ratings)

__version__ = "0.1.0"

__all__ = [
    "Ball", "BogdIp", "BogdParams", "Box", "ComparatorResult", "CustomDomain",
    "Domain", "DriftingQuadratic", "FwResult", "GcInterval", "IpConfig",
    "IpResult", "LossFunction", "MatrixCompletion", "MulticlassLogistic",
    "ObserveRecord", "OnlineLearner", "PiecewiseLinear", "Pola", "Pold",
    "ProjectedOgd", "RegretReport", "RunTrace", "Simplex", "Stream",
    "TraceNormBall", "anh_potential", "anh_weight", "as_point",
    "backend_name", "build_report", "clip_to_ball", "comparator_sequence",
    "drive", "dynamic_regret", "fw_approach", "gc_intervals_starting_at",
    "IntervalRoster", "has_compiled", "infeasible_project", "initial_weights",
    "load_multiclass_file", "load_ratings_file", "nuclear_projection",
    "offline_minimize", "static_regret", "step_size_grid",
    "strongly_adaptive_regret", "synthetic_multiclass", "synthetic_ratings",
    "weak_adaptive_regret", "__version__",
]
