"""Flat dotted-key experiment configs and their validation.

Grammar: one `key = value` per line, `#` starts a comment, blank lines
ignored. Lists are comma-separated. Unknown keys are rejected, not
ignored, and every error names the offending key.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

ALGO_NAMES = ("bogd_ip", "pold", "pola", "ogd")
STREAM_KINDS = ("drifting_quadratic", "piecewise_linear",
                "matrix_completion", "multiclass_logistic")
DOMAIN_KINDS = ("ball", "box", "simplex", "trace_norm_ball")


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_list(item_parser):
    def parse(raw: str):
        raw = raw.strip()
        if not raw:
            return []
        return [item_parser(tok.strip()) for tok in raw.split(",")]
    return parse


def _choice(options):
    def parse(raw: str):
        raw = raw.strip()
        if raw not in options:
            raise ValueError(f"{raw!r} not one of {', '.join(options)}")
        return raw
    return parse


def _positive(parser, name="value"):
    def parse(raw: str):
        v = parser(raw)
        if v <= 0:
            raise ValueError(f"{name} must be positive")
        return v
    return parse


# key -> parser; `algo.<name>.<param>` keys are matched separately
_KEY_PARSERS = {
    "domain.kind": _choice(DOMAIN_KINDS),
    "domain.dim": _positive(int, "dim"),
    "domain.radius": _positive(float, "radius"),
    "domain.half_width": _positive(float, "half_width"),
    "domain.rows": _positive(int, "rows"),
    "domain.cols": _positive(int, "cols"),
    "domain.delta": _positive(float, "delta"),
    "domain.lo_tol": _positive(float, "lo_tol"),
    "domain.lo_max_iters": _positive(int, "lo_max_iters"),
    "domain.lo_seed": int,
    "stream.kind": _choice(STREAM_KINDS),
    "stream.horizon": _positive(int, "horizon"),
    "stream.segment_length": _positive(int, "segment_length"),
    "stream.seed": int,
    "stream.center_scale": _positive(float, "center_scale"),
    "stream.ratings_path": str,
    "stream.ratings_limit": int,
    "stream.features_path": str,
    "stream.features_limit": int,
    "algos": _parse_list(_choice(ALGO_NAMES)),
    "run.seeds": _parse_list(int),
    "run.repeats": _positive(int, "repeats"),
    "run.output_dir": str,
    "run.diagnostics": _parse_bool,
    "metrics.taus": _parse_list(_positive(int, "tau")),
    "metrics.stride": _positive(int, "stride"),
    "metrics.comparator_mode": _choice(("fixed", "per_segment")),
    "metrics.weak_adaptive": _parse_bool,
}

_ALGO_PARAM_PARSERS = {
    "bogd_ip": {"c": _positive(float, "c"), "eta": _positive(float, "eta"),
                "block_size": _positive(int, "block_size"),
                "epsilon": _positive(float, "epsilon"),
                "c_grid": _parse_list(_positive(float, "c"))},
    "pold": {"c": _positive(float, "c"), "alpha": _positive(float, "alpha"),
             "c_grid": _parse_list(_positive(float, "c"))},
    "pola": {"c": _positive(float, "c"),
             "anh_variant": _choice(("paper", "classic")),
             "max_level": _positive(int, "max_level"),
             "c_grid": _parse_list(_positive(float, "c"))},
    "ogd": {"c": _positive(float, "c"),
            "mode": _choice(("static", "anytime")),
            "c_grid": _parse_list(_positive(float, "c"))},
}

_REQUIRED = ("domain.kind", "stream.kind", "stream.horizon", "algos",
             "run.seeds", "run.output_dir")


@dataclass
class ExperimentConfig:
    domain: dict
    stream: dict
    algorithms: list  # (name, overrides dict) pairs
    seeds: list
    output_dir: str
    diagnostics: bool = False
    metrics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def _parse_lines(text: str):
    values, errors = {}, []
    for ln, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            errors.append(f"line {ln}: expected 'key = value'")
            continue
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key in values:
            errors.append(f"{key}: duplicate key (line {ln})")
            continue
        values[key] = raw
    return values, errors


def _parse_typed(values: dict, errors: list) -> dict:
    typed = {}
    for key, raw in values.items():
        parser = _KEY_PARSERS.get(key)
        if parser is None and key.startswith("algo."):
            parts = key.split(".")
            if len(parts) == 3 and parts[1] in _ALGO_PARAM_PARSERS:
                parser = _ALGO_PARAM_PARSERS[parts[1]].get(parts[2])
                if parser is None:
                    known = ", ".join(sorted(_ALGO_PARAM_PARSERS[parts[1]]))
                    errors.append(f"{key}: unknown parameter for {parts[1]} "
                                  f"(recognized: {known})")
                    continue
            else:
                errors.append(f"{key}: unknown key")
                continue
        if parser is None:
            errors.append(f"{key}: unknown key")
            continue
        try:
            typed[key] = parser(raw)
        except ValueError as exc:
            errors.append(f"{key}: {exc}")
    return typed


def _cross_checks(typed: dict, errors: list):
    dk = typed.get("domain.kind")
    if dk == "ball":
        for need in ("domain.dim", "domain.radius"):
            if need not in typed:
                errors.append(f"{need}: required for ball domains")
    elif dk == "box":
        for need in ("domain.dim", "domain.half_width"):
            if need not in typed:
                errors.append(f"{need}: required for box domains")
    elif dk == "simplex":
        if "domain.dim" not in typed:
            errors.append("domain.dim: required for simplex domains")
    elif dk == "trace_norm_ball":
        for need in ("domain.rows", "domain.cols", "domain.delta"):
            if need not in typed:
                errors.append(f"{need}: required for trace-norm domains")
    sk = typed.get("stream.kind")
    if sk in ("matrix_completion", "multiclass_logistic"):
        if dk is not None and dk != "trace_norm_ball":
            errors.append("stream.kind: matrix streams need domain.kind = trace_norm_ball")
        path_key = ("stream.ratings_path" if sk == "matrix_completion"
                    else "stream.features_path")
        if path_key not in typed:
            errors.append(f"{path_key}: required for {sk} streams")
    if "run.repeats" in typed and "run.seeds" in typed:
        if typed["run.repeats"] != len(typed["run.seeds"]):
            errors.append("run.repeats: must equal the number of run.seeds")
    if "run.seeds" in typed and not typed["run.seeds"]:
        errors.append("run.seeds: need at least one seed")
    if "algos" in typed and not typed["algos"]:
        errors.append("algos: need at least one algorithm")
    horizon = typed.get("stream.horizon")
    if horizon is not None:
        if typed.get("stream.segment_length", 1) > horizon:
            errors.append("stream.segment_length: cannot exceed stream.horizon")
        for tau in typed.get("metrics.taus", []):
            if tau > horizon:
                errors.append("metrics.taus: tau cannot exceed stream.horizon")


def validate_config(text: str):
    """Parse and validate; returns (ExperimentConfig or None, errors)."""
    values, errors = _parse_lines(text)
    typed = _parse_typed(values, errors)
    for key in _REQUIRED:
        if key not in values:
            errors.append(f"{key}: missing required key")
    _cross_checks(typed, errors)
    if errors:
        return None, sorted(errors)
    prefix = {}
    for section in ("domain", "stream"):
        prefix[section] = {k.split(".", 1)[1]: v for k, v in typed.items()
                           if k.startswith(section + ".")}
    prefix["stream"].setdefault("segment_length", typed["stream.horizon"])
    prefix["stream"].setdefault("seed", 0)
    algorithms = []
    for name in typed["algos"]:
        overrides = {k.split(".")[2]: v for k, v in typed.items()
                     if k.startswith(f"algo.{name}.")}
        algorithms.append((name, overrides))
    metrics = {"taus": typed.get("metrics.taus", []),
               "stride": typed.get("metrics.stride"),
               "comparator_mode": typed.get("metrics.comparator_mode",
                                            "per_segment"),
               "weak_adaptive": typed.get("metrics.weak_adaptive", False)}
    cfg = ExperimentConfig(
        domain=prefix["domain"], stream=prefix["stream"],
        algorithms=algorithms, seeds=typed["run.seeds"],
        output_dir=typed["run.output_dir"],
        diagnostics=typed.get("run.diagnostics", False), metrics=metrics)
    return cfg, []
