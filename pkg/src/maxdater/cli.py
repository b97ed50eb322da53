"""Experiment driver: validated JSON configs in, structured reports out.

Every run is a pure function of the config (plus flag overrides): the
seed fixes all randomness through a splittable stream, replication work
is carved into a fixed chunk plan, and reports serialize with sorted
keys, so identical configs produce byte-identical reports at any thread
count.  CSV files carry the bulk numeric output; the JSON report embeds
the resolved config (execution-only fields excluded) so results stay
auditable.

Exit codes: 0 success, 2 config error, 3 inconclusive verdict under
--strict, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, is_dataclass, fields as dc_fields
from enum import Enum

import numpy as np

from . import __version__
from .classify import ClassifierConfig, SeriesThresholds, Verdict, classify, compare_queues
from .dists import (
    Deterministic,
    DiscreteUniform,
    Distribution,
    Exponential,
    Mixture,
    Pareto,
    QuadratureError,
    TruncatedParetoOne,
    Uniform,
)
from .engine import ModelSpec, simulate_gg1, simulate_path
from .loynes import DivergenceSuspected, stationary_batch
from .regen import detect, find_params, phi_sample, renewal_tests
from .streams import Stream
from .tails import NotPositiveRecurrent, empirical_tail

__all__ = ["ValidationError", "ExperimentConfig", "validate_config", "run", "main"]

_SCHEMA = 1
_EMBED_CAP = 10_000  # arrays longer than this go to CSV, not the report


class ValidationError(ValueError):
    """All config violations at once, each tagged with its field path."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("\n".join(self.problems))


@dataclass
class ExperimentConfig:
    seed: int
    threads: int
    model: ModelSpec
    sections: dict


# ------------------------------------------------------------ validation


class _Ctx:
    def __init__(self):
        self.problems = []

    def err(self, path, msg):
        self.problems.append(f"{path}: {msg}")


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _num(ctx, node, key, path, *, default=None, required=False,
         integer=False, minimum=None, exclusive_minimum=None,
         allow_none=False):
    if key not in node:
        if required:
            ctx.err(f"{path}.{key}", "required field missing")
        return default
    v = node[key]
    if v is None and allow_none:
        return None
    if not _is_num(v) or (integer and not float(v).is_integer()):
        ctx.err(f"{path}.{key}", "expected {}".format(
            "an integer" if integer else "a number"))
        return default
    v = int(v) if integer else float(v)
    if minimum is not None and v < minimum:
        ctx.err(f"{path}.{key}", f"must be >= {minimum}")
        return default
    if exclusive_minimum is not None and v <= exclusive_minimum:
        ctx.err(f"{path}.{key}", f"must be > {exclusive_minimum}")
        return default
    return v


def _bool(ctx, node, key, path, default):
    if key not in node:
        return default
    v = node[key]
    if not isinstance(v, bool):
        ctx.err(f"{path}.{key}", "expected true or false")
        return default
    return v


def _reject_unknown(ctx, node, path, allowed):
    for k in sorted(set(node) - set(allowed)):
        ctx.err(f"{path}.{k}", "unknown field")


_DIST_FIELDS = {
    "exponential": {"rate"},
    "deterministic": {"value"},
    "pareto": {"alpha", "scale"},
    "truncated_pareto_one": {"d1", "x0"},
    "uniform": {"lo", "hi"},
    "discrete_uniform": {"support"},
    "mixture": {"components"},
}


def _parse_dist(ctx, node, path):
    if not isinstance(node, dict):
        ctx.err(path, "expected an object with a 'kind' field")
        return None
    kind = node.get("kind")
    if kind not in _DIST_FIELDS:
        ctx.err(f"{path}.kind", "expected one of {}".format(
            ", ".join(sorted(_DIST_FIELDS))))
        return None
    _reject_unknown(ctx, node, path, _DIST_FIELDS[kind] | {"kind"})
    before = len(ctx.problems)
    if kind == "exponential":
        rate = _num(ctx, node, "rate", path, required=True, exclusive_minimum=0.0)
        spec = (Exponential, (rate,))
    elif kind == "deterministic":
        value = _num(ctx, node, "value", path, required=True, exclusive_minimum=0.0)
        spec = (Deterministic, (value,))
    elif kind == "pareto":
        alpha = _num(ctx, node, "alpha", path, required=True, exclusive_minimum=0.0)
        scale = _num(ctx, node, "scale", path, required=True, exclusive_minimum=0.0)
        spec = (Pareto, (alpha, scale))
    elif kind == "truncated_pareto_one":
        d1 = _num(ctx, node, "d1", path, required=True, exclusive_minimum=0.0)
        x0 = _num(ctx, node, "x0", path, required=True, exclusive_minimum=0.0)
        if d1 is not None and x0 is not None and x0 < d1:
            ctx.err(f"{path}.x0", "must be >= d1 (the tail cannot exceed 1)")
        spec = (TruncatedParetoOne, (d1, x0))
    elif kind == "uniform":
        lo = _num(ctx, node, "lo", path, required=True, minimum=0.0)
        hi = _num(ctx, node, "hi", path, required=True, exclusive_minimum=0.0)
        if lo is not None and hi is not None and hi <= lo:
            ctx.err(f"{path}.hi", "must exceed lo")
        spec = (Uniform, (lo, hi))
    elif kind == "discrete_uniform":
        vals = node.get("support")
        if not isinstance(vals, list) or not vals:
            ctx.err(f"{path}.support", "expected a non-empty list of positive numbers")
            return None
        for i, v in enumerate(vals):
            if not _is_num(v) or v <= 0:
                ctx.err(f"{path}.support[{i}]", "must be a positive number")
        spec = (DiscreteUniform, (tuple(float(v) for v in vals
                                        if _is_num(v) and v > 0),))
    else:  # mixture
        comps = node.get("components")
        if not isinstance(comps, list) or not comps:
            ctx.err(f"{path}.components", "expected a non-empty list")
            return None
        parsed = []
        for i, comp in enumerate(comps):
            cpath = f"{path}.components[{i}]"
            if not isinstance(comp, dict):
                ctx.err(cpath, "expected an object with weight and dist")
                continue
            _reject_unknown(ctx, comp, cpath, {"weight", "dist"})
            w = _num(ctx, comp, "weight", cpath, required=True, exclusive_minimum=0.0)
            d = _parse_dist(ctx, comp.get("dist"), f"{cpath}.dist")
            if w is not None and d is not None:
                parsed.append((w, d))
        if len(parsed) != len(comps):
            return None
        total = sum(w for w, _ in parsed)
        if abs(total - 1.0) > 1e-9:
            ctx.err(f"{path}.components", f"weights sum to {total:.6g}, expected 1")
            return None
        spec = (Mixture, (tuple(parsed),))
    if len(ctx.problems) > before:
        return None
    cls, args = spec
    try:
        return cls(*args)
    except (ValueError, TypeError) as exc:
        ctx.err(path, str(exc))
        return None


_THRESHOLD_DEFAULTS = {
    "slope_converges": 0.05,
    "increment_floor": 1e-8,
    "vote_majority": 0.9,
}

_SECTION_VALIDATORS = {}


def _section(name):
    def deco(fn):
        _SECTION_VALIDATORS[name] = fn
        return fn
    return deco


@_section("simulate")
def _v_simulate(ctx, node, path):
    _reject_unknown(ctx, node, path, {"x0", "n"})
    return {
        "x0": _num(ctx, node, "x0", path, default=0.0, minimum=0.0),
        "n": _num(ctx, node, "n", path, default=100, integer=True, minimum=0),
    }


@_section("gg1")
def _v_gg1(ctx, node, path):
    _reject_unknown(ctx, node, path, {"w0", "n"})
    return {
        "w0": _num(ctx, node, "w0", path, default=0.0, minimum=0.0),
        "n": _num(ctx, node, "n", path, default=100, integer=True, minimum=0),
    }


@_section("stationary")
def _v_stationary(ctx, node, path):
    _reject_unknown(ctx, node, path, {"horizon", "reps", "check_divergence"})
    return {
        "horizon": _num(ctx, node, "horizon", path, default=1000, integer=True, minimum=1),
        "reps": _num(ctx, node, "reps", path, default=10_000, integer=True, minimum=1),
        "check_divergence": _bool(ctx, node, "check_divergence", path, True),
    }


@_section("classify")
def _v_classify(ctx, node, path):
    _reject_unknown(ctx, node, path,
                    {"n_max", "reps", "c", "y", "w0", "force_series", "thresholds"})
    thr_node = node.get("thresholds", {})
    thr = dict(_THRESHOLD_DEFAULTS)
    if not isinstance(thr_node, dict):
        ctx.err(f"{path}.thresholds", "expected an object")
    else:
        _reject_unknown(ctx, thr_node, f"{path}.thresholds", _THRESHOLD_DEFAULTS)
        for key in _THRESHOLD_DEFAULTS:
            thr[key] = _num(ctx, thr_node, key, f"{path}.thresholds",
                            default=_THRESHOLD_DEFAULTS[key], exclusive_minimum=0.0)
    return {
        "n_max": _num(ctx, node, "n_max", path, default=100_000, integer=True, minimum=1000),
        "reps": _num(ctx, node, "reps", path, default=200, integer=True, minimum=100),
        "c": _num(ctx, node, "c", path, default=1.1, exclusive_minimum=1.0),
        "y": _num(ctx, node, "y", path, default=None, minimum=0.0, allow_none=True),
        "w0": _num(ctx, node, "w0", path, default=None, minimum=0.0, allow_none=True),
        "force_series": _bool(ctx, node, "force_series", path, False),
        "thresholds": thr,
    }


@_section("regen")
def _v_regen(ctx, node, path):
    _reject_unknown(ctx, node, path, {"reps", "horizon"})
    return {
        "reps": _num(ctx, node, "reps", path, default=1000, integer=True, minimum=1000),
        "horizon": _num(ctx, node, "horizon", path, default=10_000, integer=True, minimum=1),
    }


@_section("tails")
def _v_tails(ctx, node, path):
    _reject_unknown(ctx, node, path, {"grid", "samples", "horizon", "points"})
    grid = node.get("grid")
    if grid is not None:
        if not isinstance(grid, list) or not grid:
            ctx.err(f"{path}.grid", "expected a non-empty list of increasing positives")
            grid = None
        else:
            ok = all(_is_num(v) and v > 0 for v in grid)
            vals = [float(v) for v in grid if _is_num(v)]
            if not ok or any(b <= a for a, b in zip(vals, vals[1:])):
                ctx.err(f"{path}.grid", "values must be positive and strictly increasing")
                grid = None
            else:
                grid = vals
    return {
        "grid": grid,
        "samples": _num(ctx, node, "samples", path, default=100_000, integer=True, minimum=1),
        "horizon": _num(ctx, node, "horizon", path, default=1000, integer=True, minimum=1),
        "points": _num(ctx, node, "points", path, default=8, integer=True, minimum=1),
    }


def validate_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON config, reporting every violation with
    its field path; defaults are filled for everything optional."""
    ctx = _Ctx()
    try:
        root = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError([f"(root): not valid JSON ({exc})"])
    if not isinstance(root, dict):
        raise ValidationError(["(root): expected a JSON object"])
    allowed = {"schema", "seed", "threads", "model"} | set(_SECTION_VALIDATORS)
    _reject_unknown(ctx, root, "(root)", allowed)
    schema = _num(ctx, root, "schema", "(root)", default=_SCHEMA, integer=True)
    if schema is not None and schema != _SCHEMA:
        ctx.err("(root).schema", f"unsupported schema version {schema}")
    seed = _num(ctx, root, "seed", "(root)", default=0, integer=True, minimum=0)
    threads = _num(ctx, root, "threads", "(root)", default=1, integer=True, minimum=1)
    model = None
    if "model" not in root:
        ctx.err("(root).model", "required field missing")
    elif not isinstance(root["model"], dict):
        ctx.err("(root).model", "expected an object")
    else:
        mnode = root["model"]
        _reject_unknown(ctx, mnode, "model", {"interarrival", "service"})
        inter = serv = None
        if "interarrival" not in mnode:
            ctx.err("model.interarrival", "required field missing")
        else:
            inter = _parse_dist(ctx, mnode["interarrival"], "model.interarrival")
        if "service" not in mnode:
            ctx.err("model.service", "required field missing")
        else:
            serv = _parse_dist(ctx, mnode["service"], "model.service")
        if inter is not None and serv is not None:
            model = ModelSpec(interarrival=inter, service=serv)
    sections = {}
    for name, validator in _SECTION_VALIDATORS.items():
        node = root.get(name, {})
        if not isinstance(node, dict):
            ctx.err(name, "expected an object")
            node = {}
        sections[name] = validator(ctx, node, name)
    if ctx.problems:
        raise ValidationError(ctx.problems)
    return ExperimentConfig(seed=seed, threads=threads, model=model,
                            sections=sections)


# -------------------------------------------------------- serialization


def _jsonable(obj):
    if obj is None or isinstance(obj, (str, bool, int)):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, (np.floating, np.integer)):
        return _jsonable(obj.item())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if is_dataclass(obj):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dc_fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _array_block(arr):
    """Arrays small enough go into the report verbatim; longer ones keep a
    summary and rely on the CSV export."""
    arr = np.asarray(arr)
    block = {"length": int(arr.size)}
    if arr.size:
        block["min"] = _jsonable(float(np.min(arr)))
        block["max"] = _jsonable(float(np.max(arr)))
        block["mean"] = _jsonable(float(np.mean(arr)))
    block["values"] = _jsonable(arr) if arr.size <= _EMBED_CAP else None
    return block


def _dist_node(d: Distribution) -> dict:
    if isinstance(d, Exponential):
        return {"kind": "exponential", "rate": d.rate}
    if isinstance(d, Deterministic):
        return {"kind": "deterministic", "value": d.value}
    if isinstance(d, Pareto):
        return {"kind": "pareto", "alpha": d.alpha, "scale": d.scale}
    if isinstance(d, TruncatedParetoOne):
        return {"kind": "truncated_pareto_one", "d1": d.d1, "x0": d.x0}
    if isinstance(d, Uniform):
        return {"kind": "uniform", "lo": d.lo, "hi": d.hi}
    if isinstance(d, DiscreteUniform):
        return {"kind": "discrete_uniform", "support": list(d.values)}
    if isinstance(d, Mixture):
        return {"kind": "mixture", "components": [
            {"weight": w, "dist": _dist_node(c)} for w, c in d.components]}
    raise TypeError(f"unknown distribution {type(d).__name__}")


def _resolved_config(cfg: ExperimentConfig, command: str) -> dict:
    # threads and output paths are execution details: they may not change
    # any numbers, so they stay out of the report to keep it byte-stable
    return {
        "schema": _SCHEMA,
        "seed": cfg.seed,
        "model": {
            "interarrival": _dist_node(cfg.model.interarrival),
            "service": _dist_node(cfg.model.service),
        },
        command: _jsonable(cfg.sections["classify" if command == "compare"
                                        else command]),
    }


# ------------------------------------------------------------- commands


def _cmd_simulate(cfg: ExperimentConfig, stream: Stream, strict: bool):
    sec = cfg.sections["simulate"]
    path = simulate_path(cfg.model, sec["x0"], sec["n"], stream)
    result = {
        "x0": sec["x0"],
        "n": sec["n"],
        "final_workload": float(path.x[-1]),
        "max_workload": float(path.x.max()),
        "final_arrival_epoch": float(path.arrivals[-1]),
        "workload": _array_block(path.x),
        "arrival_epochs": _array_block(path.arrivals),
    }
    rows = [("n", "t_n", "s_n", "T_n", "X_n"), (0, "", "", 0.0, path.x[0])]
    rows += [(k + 1, path.t[k], path.s[k], path.arrivals[k + 1], path.x[k + 1])
             for k in range(sec["n"])]
    return result, rows, 0


def _cmd_gg1(cfg: ExperimentConfig, stream: Stream, strict: bool):
    sec = cfg.sections["gg1"]
    path = simulate_gg1(cfg.model, sec["w0"], sec["n"], stream)
    result = {
        "w0": sec["w0"],
        "n": sec["n"],
        "final_wait": float(path.w[-1]),
        "final_walk": float(path.gamma[-1]),
        "running_max": float(path.m[-1]),
        "wait": _array_block(path.w),
        "walk": _array_block(path.gamma),
    }
    rows = [("n", "w_n", "gamma_n", "m_n")]
    rows += [(k, path.w[k], path.gamma[k], path.m[k])
             for k in range(sec["n"] + 1)]
    return result, rows, 0


def _cmd_stationary(cfg: ExperimentConfig, stream: Stream, strict: bool):
    sec = cfg.sections["stationary"]
    try:
        batch = stationary_batch(cfg.model, sec["horizon"], sec["reps"], stream,
                                 threads=cfg.threads,
                                 check_divergence=sec["check_divergence"])
    except DivergenceSuspected as exc:
        result = {
            "divergence_suspected": True,
            "record_fraction": exc.fraction,
            "horizon": exc.horizon,
        }
        return result, None, 0
    values = batch.values
    qs = {q: float(np.quantile(values, q)) for q in (0.5, 0.9, 0.99)}
    result = {
        "divergence_suspected": False,
        "reps": batch.reps,
        "horizon": batch.horizon,
        "exact": batch.exact,
        "residual_bound": _jsonable(batch.residual_bound),
        "record_fraction": batch.record_fraction,
        "mean": float(values.mean()),
        "sd": float(values.std(ddof=1)) if len(values) > 1 else 0.0,
        "quantiles": {str(k): v for k, v in qs.items()},
        "values": _array_block(values),
    }
    rows = [("value",)] + [(v,) for v in values]
    return result, rows, 0


def _classifier_config(cfg: ExperimentConfig) -> ClassifierConfig:
    sec = cfg.sections["classify"]
    return ClassifierConfig(
        n_max=sec["n_max"], reps=sec["reps"],
        thresholds=SeriesThresholds(**sec["thresholds"]),
        c=sec["c"], y=sec["y"], w0=sec["w0"],
        force_series=sec["force_series"], threads=cfg.threads,
    )


def _diag_dict(diag) -> dict:
    return {
        "kind": diag.kind,
        "verdict": diag.verdict,
        "slope": diag.slope,
        "params": diag.params,
        "votes_converge": diag.votes_converge,
        "votes_diverge": diag.votes_diverge,
        "reps": diag.reps,
        "n_max": diag.n_max,
        "grid": _array_block(diag.grid),
        "partial_sums": _array_block(diag.partial_sums),
        "values": _array_block(diag.values) if diag.values is not None else None,
    }


def _series_rows(diagnostics):
    rows = [("kind", "n", "partial_sum")]
    for diag in diagnostics:
        rows += [(diag.kind.value, int(n), float(sn))
                 for n, sn in zip(diag.grid, diag.partial_sums)]
    return rows


def _cmd_classify(cfg: ExperimentConfig, stream: Stream, strict: bool):
    report = classify(cfg.model, _classifier_config(cfg), stream)
    result = {
        "verdict": report.verdict,
        "source": report.source,
        "notes": report.notes,
        "diagnostics": [_diag_dict(d) for d in report.diagnostics],
    }
    code = 3 if strict and report.verdict is Verdict.INCONCLUSIVE else 0
    return result, _series_rows(report.diagnostics), code


def _cmd_compare(cfg: ExperimentConfig, stream: Stream, strict: bool):
    infinite, single, commentary = compare_queues(
        cfg.model, _classifier_config(cfg), stream)
    result = {
        "infinite_server": {
            "verdict": infinite.verdict,
            "source": infinite.source,
            "notes": infinite.notes,
            "diagnostics": [_diag_dict(d) for d in infinite.diagnostics],
        },
        "single_server": _jsonable(single) if single is not None else None,
        "commentary": commentary,
    }
    code = 3 if strict and infinite.verdict is Verdict.INCONCLUSIVE else 0
    return result, _series_rows(infinite.diagnostics), code


def _cmd_regen(cfg: ExperimentConfig, stream: Stream, strict: bool):
    sec = cfg.sections["regen"]
    params = find_params(cfg.model)
    summary = renewal_tests(cfg.model, params, sec["reps"], sec["horizon"],
                            stream.child(0), threads=cfg.threads)
    trace_steps = min(sec["horizon"], _EMBED_CAP)
    trace_steps -= trace_steps % params.m0
    x0 = phi_sample(cfg.model, params, stream.child(1))
    taus = np.array([], dtype=np.int64)
    if trace_steps >= params.m0:
        path = simulate_path(cfg.model, x0, trace_steps, stream.child(2))
        taus = detect(path, params).taus
    result = {
        "params": params,
        "renewal": {
            "sum_u": _jsonable(summary.sum_u),
            "cesaro": summary.cesaro,
            "cycle_mean": _jsonable(summary.cycle_mean),
            "frac_no_regen": summary.frac_no_regen,
            "reps": summary.reps,
            "horizon": summary.horizon,
            "m0": summary.m0,
            "u_hat": _array_block(summary.u_hat),
        },
        "trace": {"steps": int(trace_steps), "count": int(len(taus)),
                  "taus": _array_block(taus)},
    }
    rows = [("i", "tau_i")] + [(i + 1, int(tau)) for i, tau in enumerate(taus)]
    return result, rows, 0


def _cmd_tails(cfg: ExperimentConfig, stream: Stream, strict: bool):
    sec = cfg.sections["tails"]
    report = empirical_tail(cfg.model, sec["grid"], sec["samples"],
                            sec["horizon"], stream, points=sec["points"],
                            threads=cfg.threads)
    result = {
        "regime": report.regime,
        "regime_params": report.regime_params,
        "samples": report.samples,
        "horizon": report.horizon,
        "residual_bound": _jsonable(report.residual_bound),
        "grid": _jsonable(report.grid),
        "predicted": _jsonable(report.predicted) if report.predicted is not None else None,
        "empirical": _jsonable(report.empirical),
        "lo": _jsonable(report.lo),
        "hi": _jsonable(report.hi),
        "ratio": _jsonable(report.ratio) if report.ratio is not None else None,
    }
    rows = [("x", "predicted", "empirical", "lo", "hi", "ratio")]
    for i, x in enumerate(report.grid):
        rows.append((
            float(x),
            float(report.predicted[i]) if report.predicted is not None else "",
            float(report.empirical[i]), float(report.lo[i]), float(report.hi[i]),
            float(report.ratio[i]) if report.ratio is not None else "",
        ))
    return result, rows, 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "stationary": _cmd_stationary,
    "classify": _cmd_classify,
    "regen": _cmd_regen,
    "tails": _cmd_tails,
    "gg1": _cmd_gg1,
    "compare": _cmd_compare,
}


# ----------------------------------------------------------------- driver


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxdater",
        description="simulation and recurrence analysis of the "
                    "infinite-server workload recursion",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="report path (default stdout)")
        p.add_argument("--csv", default=None, help="CSV export path")
        p.add_argument("--reps", type=int, default=None)
        p.add_argument("--horizon", type=int, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--strict", action="store_true")
    return parser


def _apply_overrides(cfg: ExperimentConfig, command: str, args) -> list:
    problems = []
    if args.seed is not None:
        if args.seed < 0:
            problems.append("--seed: must be >= 0")
        else:
            cfg.seed = args.seed
    if args.threads is not None:
        if args.threads < 1:
            problems.append("--threads: must be >= 1")
        else:
            cfg.threads = args.threads
    section = cfg.sections["classify" if command == "compare" else command]
    if args.reps is not None:
        key = "samples" if command == "tails" else "reps"
        if key in section:
            if args.reps < 1:
                problems.append("--reps: must be >= 1")
            else:
                section[key] = args.reps
        else:
            problems.append(f"--reps: not applicable to {command}")
    if args.horizon is not None:
        if "horizon" in section:
            if args.horizon < 1:
                problems.append("--horizon: must be >= 1")
            else:
                section["horizon"] = args.horizon
        else:
            problems.append(f"--horizon: not applicable to {command}")
    if args.n is not None:
        if "n" in section:
            if args.n < 0:
                problems.append("--n: must be >= 0")
            else:
                section["n"] = args.n
        else:
            problems.append(f"--n: not applicable to {command}")
    return problems


def _write_csv(path: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows(rows)


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = validate_config(text)
    except ValidationError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    problems = _apply_overrides(cfg, args.command, args)
    if problems:
        for problem in problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    stream = Stream.from_seed(cfg.seed)
    try:
        result, rows, code = _COMMANDS[args.command](cfg, stream, args.strict)
    except (ValueError, RuntimeError, QuadratureError, NotPositiveRecurrent) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 4
    report = {
        "schema": _SCHEMA,
        "version": __version__,
        "command": args.command,
        "config": _resolved_config(cfg, args.command),
        "result": _jsonable(result),
    }
    text = json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv and rows is not None:
        _write_csv(args.csv, rows)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
