"""Config-driven experiment runner.

Subcommands:
    run      --config FILE [--workers N] [--out DIR]
    validate --config FILE
    report   --dir DIR

Each (algorithm, seed) run writes `trace_<algo>_<seed>.csv` with the
exact header `t,algo,seed,loss,cum_loss,lo_calls_cum,wall_ns` plus a
`run_<algo>_<seed>.json` sidecar; aggregation across seeds lands in
`report.json`. Everything except the wall_ns column and the `timing`
subtree is a pure function of (config, seed).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .baselines import ProjectedOgd, nuclear_projection
from .bogd import BogdIp, BogdParams
from .config import ExperimentConfig, validate_config
from .domains import Ball, Box, Simplex, TraceNormBall
from .driver import drive
from .errors import LearnerAbortedError
from .metrics import build_report
from .pola import Pola
from .pold import Pold
from .streams import (DriftingQuadratic, MatrixCompletion,
                      MulticlassLogistic, PiecewiseLinear,
                      load_multiclass_file, load_ratings_file)

CSV_HEADER = ["t", "algo", "seed", "loss", "cum_loss", "lo_calls_cum",
              "wall_ns"]


def build_domain(params: dict):
    kind = params["kind"]
    if kind == "ball":
        return Ball(params["dim"], params["radius"])
    if kind == "box":
        return Box.symmetric(params["dim"], params["half_width"])
    if kind == "simplex":
        return Simplex(params["dim"])
    knobs = {k: params[k] for k in ("lo_tol", "lo_max_iters", "lo_seed")
             if k in params}
    return TraceNormBall(params["rows"], params["cols"], params["delta"],
                         **knobs)


def build_stream(domain, params: dict, run_seed: int):
    """The effective stream seed is stream.seed + the repeat's seed."""
    kind = params["kind"]
    seed = int(params.get("seed", 0)) + int(run_seed)
    horizon = params["horizon"]
    segment = params.get("segment_length", horizon)
    if kind == "drifting_quadratic":
        return DriftingQuadratic(domain, horizon, segment, seed,
                                 params.get("center_scale", 0.5))
    if kind == "piecewise_linear":
        return PiecewiseLinear(domain, horizon, segment, seed)
    if kind == "matrix_completion":
        triples = load_ratings_file(params["ratings_path"],
                                    params.get("ratings_limit"))
        return MatrixCompletion(domain, horizon, segment, triples, seed)
    feats, labels = load_multiclass_file(params["features_path"], domain.cols,
                                         params.get("features_limit"))
    return MulticlassLogistic(domain, horizon, segment, feats, labels, seed)


def build_learner(name: str, overrides: dict, domain, stream, c: float = 1.0):
    T = stream.horizon
    if name == "bogd_ip":
        if "eta" in overrides:
            if {"block_size", "epsilon"} <= overrides.keys():
                params = BogdParams(overrides["eta"], overrides["block_size"],
                                    overrides["epsilon"], horizon=T)
            else:
                params = BogdParams.from_eta(overrides["eta"], horizon=T)
        else:
            params = BogdParams.for_horizon(T, c)
        return BogdIp(domain, params)
    if name == "pold":
        return Pold(domain, T, lipschitz=stream.lipschitz,
                    alpha=overrides.get("alpha"), c=c)
    if name == "pola":
        return Pola(domain, anh_variant=overrides.get("anh_variant", "paper"),
                    max_level=overrides.get("max_level", 30), c=c)
    projection = None
    if isinstance(domain, TraceNormBall):
        projection = lambda p: nuclear_projection(domain, p)  # noqa: E731
    return ProjectedOgd(domain, stream.lipschitz, horizon=T,
                        mode=overrides.get("mode", "static"),
                        projection=projection, c=c)


def _grid_variants(name: str, overrides: dict):
    grid = overrides.get("c_grid")
    if not grid:
        c = overrides.get("c", 1.0)
        return [(name, c)]
    return [(f"{name}_c{c:g}", c) for c in grid]


def _execute_run(cfg_dict: dict, name: str, label: str, overrides: dict,
                 c: float, seed: int) -> dict:
    cfg = ExperimentConfig(**cfg_dict)
    domain = build_domain(cfg.domain)
    stream = build_stream(domain, cfg.stream, seed)
    learner = build_learner(name, overrides, domain, stream, c)
    try:
        trace = drive(learner, stream, stream.horizon, algo_id=label)
    except LearnerAbortedError as exc:
        trace = exc.trace
    rows = []
    cum = 0.0
    lo_cum = 0
    for i, loss in enumerate(trace.losses):
        cum += loss
        lo_cum += trace.lo_calls[i]
        rows.append([i + 1, label, seed, repr(loss), repr(cum), lo_cum,
                     trace.wall_ns[i]])
    result = {
        "algo": label, "seed": seed, "complete": trace.complete,
        "final_cum_loss": cum, "total_lo_calls": lo_cum,
        "stream": stream.describe(),
        "timing": {"total_wall_ns": int(sum(trace.wall_ns))},
        "rows": rows,
    }
    if trace.complete and (cfg.metrics.get("taus") or
                           cfg.metrics.get("weak_adaptive")):
        report = build_report(
            trace, stream, taus=cfg.metrics.get("taus", ()),
            stride=cfg.metrics.get("stride"),
            comparator_mode=cfg.metrics.get("comparator_mode", "per_segment"),
            include_weak=cfg.metrics.get("weak_adaptive", False))
        result["regret"] = report.as_dict()
    if cfg.diagnostics and hasattr(learner, "diagnostics"):
        result["diagnostics"] = learner.diagnostics()
    return result


def _write_run(outdir: Path, result: dict):
    stem = f"{result['algo']}_{result['seed']}"
    with open(outdir / f"trace_{stem}.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        writer.writerows(result["rows"])
    sidecar = {k: v for k, v in result.items() if k != "rows"}
    with open(outdir / f"run_{stem}.json", "w") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)


def _aggregate(results: list[dict]) -> dict:
    """Mean and sample standard deviation across seeds, per algorithm."""
    by_algo: dict[str, list[dict]] = {}
    for r in results:
        by_algo.setdefault(r["algo"], []).append(r)

    def stats(vals):
        vals = [float(v) for v in vals if v is not None]
        if not vals:
            return None
        mean = float(np.mean(vals))
        std = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
        return {"mean": mean, "std": std, "n": len(vals)}

    aggregates = {}
    for algo, runs in sorted(by_algo.items()):
        entry = {
            "final_cum_loss": stats([r["final_cum_loss"] for r in runs]),
            "total_lo_calls": stats([r["total_lo_calls"] for r in runs]),
            "incomplete_runs": sum(0 if r["complete"] else 1 for r in runs),
        }
        if any("regret" in r for r in runs):
            regrets = [r["regret"] for r in runs if "regret" in r]
            entry["static_regret"] = stats([g["static"] for g in regrets])
            entry["dynamic_regret"] = stats([g["dynamic"] for g in regrets])
            entry["dynamic_path_length"] = stats(
                [g["dynamic_path_length"] for g in regrets])
            taus = sorted({tau for g in regrets
                           for tau in g["strongly_adaptive"]})
            entry["strongly_adaptive"] = {
                tau: stats([g["strongly_adaptive"].get(tau) for g in regrets])
                for tau in taus}
            if any(g.get("weak_adaptive") is not None for g in regrets):
                entry["weak_adaptive"] = stats(
                    [g.get("weak_adaptive") for g in regrets])
        aggregates[algo] = entry
    return aggregates


def _mark_grid_argmin(results: list[dict], aggregates: dict):
    """Grid runs report every point; flag the argmin of mean final
    cumulative loss within each algorithm family."""
    families: dict[str, list[str]] = {}
    for algo in aggregates:
        families.setdefault(algo.split("_c")[0], []).append(algo)
    for family, labels in families.items():
        if len(labels) < 2:
            continue
        best = min(labels,
                   key=lambda a: aggregates[a]["final_cum_loss"]["mean"])
        for label in labels:
            aggregates[label]["grid_argmin"] = label == best


def run_experiment(cfg: ExperimentConfig, workers: int = 1,
                   out: str | None = None) -> Path:
    """Execute every (algorithm, seed) run, write traces and report.json."""
    outdir = Path(out or cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = []
    for name, overrides in cfg.algorithms:
        for label, c in _grid_variants(name, overrides):
            for seed in cfg.seeds:
                jobs.append((cfg.as_dict(), name, label, overrides, c, seed))
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_execute_run, *zip(*jobs)))
    else:
        results = [_execute_run(*job) for job in jobs]
    for result in results:
        _write_run(outdir, result)
    aggregates = _aggregate(results)
    _mark_grid_argmin(results, aggregates)
    report = {
        "config": cfg.as_dict(),
        "runs": [{k: v for k, v in r.items() if k not in ("rows", "timing")}
                 for r in results],
        "aggregates": aggregates,
        "timing": {r["algo"] + "_" + str(r["seed"]): r["timing"]
                   for r in results},
        "metadata": {"kernel_backend": kernels.backend_name(),
                     "incomplete": any(not r["complete"] for r in results)},
    }
    with open(outdir / "report.json", "w") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
    return outdir


def reaggregate(directory: Path) -> Path:
    """Rebuild report.json from the per-run sidecar files."""
    directory = Path(directory)
    results = []
    for path in sorted(directory.glob("run_*.json")):
        with open(path) as fh:
            results.append(json.load(fh))
    if not results:
        raise FileNotFoundError(f"no run_*.json files under {directory}")
    aggregates = _aggregate(results)
    _mark_grid_argmin(results, aggregates)
    report = {
        "runs": [{k: v for k, v in r.items() if k != "timing"}
                 for r in results],
        "aggregates": aggregates,
        "timing": {r["algo"] + "_" + str(r["seed"]): r.get("timing")
                   for r in results},
        "metadata": {"kernel_backend": kernels.backend_name(),
                     "incomplete": any(not r["complete"] for r in results),
                     "reaggregated": True},
    }
    with open(directory / "report.json", "w") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
    return directory


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="projfree",
        description="projection-free online learning experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--out", default=None)
    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("--config", required=True)
    p_rep = sub.add_parser("report", help="re-aggregate a run directory")
    p_rep.add_argument("--dir", required=True)
    args = parser.parse_args(argv)

    if args.command == "validate":
        cfg, errors = validate_config(Path(args.config).read_text())
        if errors:
            for err in errors:
                print(f"error: {err}", file=sys.stderr)
            return 1
        print("config OK")
        return 0
    if args.command == "run":
        cfg, errors = validate_config(Path(args.config).read_text())
        if errors:
            for err in errors:
                print(f"error: {err}", file=sys.stderr)
            return 1
        outdir = run_experiment(cfg, workers=args.workers, out=args.out)
        print(f"report written to {outdir / 'report.json'}")
        return 0
    outdir = reaggregate(Path(args.dir))
    print(f"report written to {outdir / 'report.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
