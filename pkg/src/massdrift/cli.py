"""Experiment runner: JSON config in, CSV series and JSON summaries out.

Configs are schema-validated (unknown keys rejected); flags only override the
seed, the output directory, and the step count.  Exit codes: 0 success, 1
usage/config error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import jsonschema

from . import verify
from .errors import MassdriftError
from .kernel import (back_and_forth, check_invariant_set, even_return_curve,
                     evolve)
from .measures import GeneratorId, StepLaw
from .models import (BooleOrbitSpec, FunnelChainSpec, boole_orbit,
                     build_cycle_model, build_funnel_chain,
                     build_lattice_model, build_two_component_model)
from .montecarlo import (CSV_HEADER, EnsembleSpec, compare_volumes,
                         run_ensemble)

EXPERIMENTS = ("evolve", "cesaro", "backforth", "invariance", "fiber-verify",
               "funnel", "boole", "sl2", "schottky", "contrast")

_LAW_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["atoms"],
    "properties": {
        "atoms": {
            "type": "array", "minItems": 1,
            "items": {
                "type": "object", "additionalProperties": False,
                "required": ["id", "inverse", "weight"],
                "properties": {
                    "id": {"type": "string"},
                    "inverse": {"type": "string"},
                    "weight": {"type": "number", "exclusiveMinimum": 0,
                               "maximum": 1},
                },
            },
        },
    },
}

_MODEL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["type"],
    "properties": {
        "type": {"enum": ["z-lattice", "cycle", "two-cycles", "funnel"]},
        "d": {"enum": [1, 2]},
        "radius": {"type": "integer", "minimum": 2},
        "k": {"type": "integer", "minimum": 2},
        "neck_prefix": {"type": "array", "items": {"type": "number"}},
        "tail": {"type": "array"},
        "step_scale": {"type": "number", "exclusiveMinimum": 0,
                       "maximum": 0.25},
        "truncation_size": {"type": "integer", "minimum": 2},
    },
}

_ENSEMBLE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["chart", "n_walkers", "n_steps"],
    "properties": {
        "chart": {"enum": ["sl2-lattice", "schottky", "z-lattice"]},
        "n_walkers": {"type": "integer", "minimum": 1},
        "n_steps": {"type": "integer", "minimum": 0},
        "thresholds": {"type": "array", "items": {"type": "number"}},
        "snapshots": {"type": "array", "items": {"type": "integer",
                                                 "minimum": 0}},
        "generator_a": {"type": "array"},
        "generator_b": {"type": "array"},
    },
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "massdrift experiment config",
    "type": "object",
    "additionalProperties": False,
    "required": ["experiment", "out"],
    "properties": {
        "experiment": {"enum": list(EXPERIMENTS)},
        "model": _MODEL_SCHEMA,
        "law": _LAW_SCHEMA,
        "schedule": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "n_steps": {"type": "integer", "minimum": 0},
                "snapshots": {"type": "array",
                              "items": {"type": "integer", "minimum": 0}},
            },
        },
        "seed": {"type": "integer", "minimum": 0},
        "start": {},
        "starts": {"type": "array", "items": {"type": "number"}},
        "window": {"type": "array", "minItems": 2, "maxItems": 2,
                   "items": {"type": "integer"}},
        "window_halfwidth": {"type": "number", "exclusiveMinimum": 0},
        "revisit_radius": {"type": "number", "exclusiveMinimum": 0},
        "set": {"type": "array"},
        "n_max": {"type": "integer", "minimum": 0},
        "ensemble": _ENSEMBLE_SCHEMA,
        "ensemble_finite": _ENSEMBLE_SCHEMA,
        "ensemble_infinite": _ENSEMBLE_SCHEMA,
        "out": {
            "type": "object", "additionalProperties": False,
            "required": ["csv", "json"],
            "properties": {"csv": {"type": "string"},
                           "json": {"type": "string"}},
        },
    },
}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def fnv1a_64(data: str) -> str:
    """64-bit FNV-1a of the canonical JSON text, as fixed-width hex."""
    h = 0xCBF29CE484222325
    for byte in data.encode():
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


class ConfigError(Exception):
    pass


def validate_config(config: dict) -> None:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        pointer = "/" + "/".join(str(p) for p in e.absolute_path)
        raise ConfigError(f"config invalid at {pointer}: {e.message}")


def _law_from_config(cfg: dict) -> StepLaw:
    return StepLaw(tuple(
        (GeneratorId(a["id"], a["inverse"]), a["weight"])
        for a in cfg["atoms"]))


def _model_from_config(cfg: dict):
    t = cfg["type"]
    if t == "z-lattice":
        return build_lattice_model(cfg.get("d", 1), cfg["radius"])
    if t == "cycle":
        return build_cycle_model(cfg["k"])
    if t == "two-cycles":
        return build_two_component_model(cfg["k"])
    spec = FunnelChainSpec(tuple(cfg.get("neck_prefix", ())),
                           tail=tuple(cfg["tail"]) if "tail" in cfg else None,
                           step_scale=cfg.get("step_scale", 0.25),
                           truncation_size=cfg.get("truncation_size", 100))
    return build_funnel_chain(spec)


def _ensemble_from_config(cfg: dict, law: StepLaw, seed: int) -> EnsembleSpec:
    return EnsembleSpec(
        chart=cfg["chart"], mu=law, n_walkers=cfg["n_walkers"],
        n_steps=cfg["n_steps"], master_seed=seed,
        snapshot_schedule=tuple(cfg.get("snapshots", ())),
        proxy_thresholds=tuple(cfg.get("thresholds", ())),
        generator_a=tuple(map(tuple, cfg["generator_a"])) if "generator_a" in cfg else None,
        generator_b=tuple(map(tuple, cfg["generator_b"])) if "generator_b" in cfg else None,
    )


def _window_states(config: dict, model) -> list:
    lo, hi = config.get("window", (0, 0))
    if model.name.startswith("z2"):
        return [(i, j) for i in range(lo, hi + 1) for j in range(lo, hi + 1)
                if (i, j) in model.index]
    return [s for s in range(lo, hi + 1) if s in model.index]


def _fmt(x) -> str:
    return repr(x) if isinstance(x, float) else str(x)


def write_csv(path: str, header: tuple, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_summary(path: str, summary: dict) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _run_experiment(config: dict):
    """Dispatch one experiment; returns (csv_header, csv_rows, verdicts, residuals)."""
    exp = config["experiment"]
    schedule = config.get("schedule", {})
    n_steps = schedule.get("n_steps", 0)
    snapshots = schedule.get("snapshots")
    seed = config.get("seed", 0)

    if exp in ("evolve", "cesaro"):
        model = _model_from_config(config["model"])
        law = _law_from_config(config["law"]) if "law" in config else None
        start = config.get("start", model.states[0])
        window = _window_states(config, model)
        if exp == "evolve":
            series = evolve(model, start, law, n_steps,
                            snapshot_schedule=snapshots)
            rows = [(n, f"{config.get('window', [0, 0])[0]}.."
                     f"{config.get('window', [0, 0])[1]}",
                     series.window_mass(n, window))
                    for n in sorted(series.snapshots)]
        else:
            from .kernel import cesaro
            series = evolve(model, start, law, n_steps,
                            snapshot_schedule=snapshots or range(n_steps))
            pts = sorted(n for n in (snapshots or [n_steps]) if n >= 1)
            rows = []
            for n in pts:
                avg = cesaro(series, n)
                rows.append((n, f"{config.get('window', [0, 0])[0]}.."
                             f"{config.get('window', [0, 0])[1]}",
                             sum(avg.mass_at(s) for s in window)))
        return ("n", "window", "mass"), rows, [], {}

    if exp == "backforth":
        model = _model_from_config(config["model"])
        law = _law_from_config(config["law"])
        start = config.get("start", model.states[0])
        entries = back_and_forth(model, start, law, config.get("n_max", n_steps))
        rows = []
        for n, nu in enumerate(entries):
            diff = nu.sup_distance(entries[n - 1]) if n else 0.0
            rows.append((n, nu.total_mass, diff))
        return ("n", "total_mass", "sup_diff_prev"), rows, [], {}

    if exp == "invariance":
        model = _model_from_config(config["model"])
        law = _law_from_config(config["law"]) if "law" in config else None
        rep = check_invariant_set(model, config["set"], law)
        rows = [(str(g), r) for g, r in sorted(rep.generator_residuals.items(),
                                               key=lambda kv: str(kv[0]))]
        verdicts = [{"name": "invariance", "verdict": rep.verdict}]
        residuals = {"operator": rep.operator_residual,
                     **{f"generator:{g}": r for g, r in rows}}
        return ("generator", "residual"), rows, verdicts, residuals

    if exp == "fiber-verify":
        reports = verify.run_suite("fibers")
        rows = [(r["suite"], name, res)
                for r in reports for name, res in r["per_instance"].items()]
        verdicts = [{"name": r["suite"],
                     "verdict": "pass" if r["pass"] else "fail"}
                    for r in reports]
        residuals = {r["suite"]: r["max_residual"] for r in reports}
        return ("suite", "instance", "max_residual"), rows, verdicts, residuals

    if exp == "funnel":
        model = _model_from_config(config["model"])
        window = _window_states(config, model)
        curve = even_return_curve(model, 0, None, n_steps // 2)
        series = evolve(model, 0, None, n_steps,
                        snapshot_schedule=snapshots or [n_steps])
        rows = [("return", 2 * i, v) for i, v in enumerate(curve)]
        rows += [("window", n, series.window_mass(n, window))
                 for n in sorted(series.snapshots)]
        noninc = all(curve[i + 1] <= curve[i] + 1e-15
                     for i in range(len(curve) - 1))
        verdicts = [{"name": "return-curve-nonincreasing",
                     "verdict": "pass" if noninc else "fail"}]
        return ("kind", "step", "value"), rows, verdicts, {}

    if exp == "boole":
        spec = BooleOrbitSpec(tuple(config["starts"]),
                              horizon=n_steps,
                              window_halfwidth=config.get("window_halfwidth", 10.0),
                              revisit_radius=config.get("revisit_radius", 1.0))
        report = boole_orbit(spec)
        rows = []
        for o in report.orbits:
            for n, frac in o.occupation_curve:
                rows.append((o.start, n, frac, len(o.revisit_times),
                             o.drift_bound))
        return ("start", "n", "occupation_fraction", "n_revisits",
                "drift_bound"), rows, [], {}

    if exp in ("sl2", "schottky"):
        law = _law_from_config(config["law"])
        spec = _ensemble_from_config(config["ensemble"], law, seed)
        curve = run_ensemble(spec)
        rows = [r.as_tuple() for r in curve.rows]
        return CSV_HEADER, rows, [], {}

    # contrast
    law = _law_from_config(config["law"])
    fin = _ensemble_from_config(config["ensemble_finite"], law, seed)
    inf_ = _ensemble_from_config(config["ensemble_infinite"], law, seed)
    report = compare_volumes(fin, inf_)
    rows = [("finite",) + r.as_tuple() for r in report.finite.rows]
    rows += [("infinite",) + r.as_tuple() for r in report.infinite.rows]
    rows += [("gap", n, j, g, "", "", "", "") for n, j, g in report.gaps]
    return ("chart",) + CSV_HEADER, rows, [], {}


def run_config(config: dict, out_dir: str | None = None) -> int:
    validate_config(config)
    params_hash = fnv1a_64(canonical_json(config))
    out = dict(config["out"])
    if out_dir:
        out = {k: str(Path(out_dir) / Path(v).name) for k, v in out.items()}
    for p in out.values():
        parent = Path(p).parent
        if parent and not parent.exists():
            parent.mkdir(parents=True, exist_ok=True)
    header, rows, verdicts, residuals = _run_experiment(config)
    write_csv(out["csv"], header, rows)
    summary = {
        "experiment": config["experiment"],
        "params_hash": params_hash,
        "verdicts": verdicts,
        "max_residuals": residuals,
    }
    write_summary(out["json"], summary)
    if any(v["verdict"] != "pass" for v in verdicts if "verdict" in v):
        return 2
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="massdrift",
        description="escape-of-mass experiments on measured spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("config", help="path to JSON config")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.add_argument("--n-steps", type=int, default=None)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", choices=["fibers", "invariance", "all"])
    p_verify.add_argument("--json", dest="json_out", default=None)

    sub.add_parser("schema", help="print the config schema")

    args = parser.parse_args(argv)

    cap = os.environ.get("MASSDRIFT_THREADS")
    if cap:
        try:
            from threadpoolctl import threadpool_limits
            threadpool_limits(limits=int(cap))
        except (ImportError, ValueError):
            pass

    if args.command == "schema":
        print(json.dumps(CONFIG_SCHEMA, sort_keys=True, indent=2))
        return 0

    if args.command == "verify":
        reports = verify.run_suite(args.suite)
        for r in reports:
            print(f"{r['suite']}: {'pass' if r['pass'] else 'FAIL'}")
        if args.json_out:
            write_summary(args.json_out, {"suites": reports})
        return 0 if all(r["pass"] for r in reports) else 2

    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return 1
    if args.seed is not None:
        config["seed"] = args.seed
    if args.n_steps is not None:
        config.setdefault("schedule", {})["n_steps"] = args.n_steps
    try:
        return run_config(config, out_dir=args.out)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except MassdriftError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
