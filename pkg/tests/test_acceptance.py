"""End-to-end acceptance checks, one per headline behavior of the package.

Each test prints a single PASS/FAIL line so the whole gate can be read at a
glance from the captured output.  Oracles are independent of the code paths
they check: binomial closed forms, dense matrix powers, exhaustive
enumeration, and exact kernel evolution against sampled ensembles.
"""
import math

import numpy as np
import pytest

from massdrift import verify
from massdrift.kernel import back_and_forth, even_return_curve, evolve
from massdrift.cli import run_config
from massdrift.models import (BooleOrbitSpec, FunnelChainSpec, boole_orbit,
                              build_cycle_model, build_funnel_chain,
                              build_lattice_model, cycle_law, srw_law)
from massdrift.measures import GeneratorId, StepLaw
from massdrift.montecarlo import EnsembleSpec, run_ensemble


def _report(name: str, ok: bool) -> bool:
    print(f"{name}: {'PASS' if ok else 'FAIL'}")
    return ok


def free_uniform_law():
    from massdrift.models.schottky import INVERSE
    return StepLaw(tuple((GeneratorId(s, INVERSE[s]), 0.25)
                         for s in ("a", "A", "b", "B")))


def test_exact_line_walk_return_masses_and_local_clt():
    model = build_lattice_model(1, 500)
    series = evolve(model, 0, srw_law(1), 4000,
                    snapshot_schedule=[2, 4, 8, 4000])
    ok = abs(series.snapshot(2).mass_at(0) - 0.5) < 1e-12
    ok &= abs(series.snapshot(4).mass_at(0) - 0.375) < 1e-12
    ok &= abs(series.snapshot(8).mass_at(0) - 0.2734375) < 1e-12
    p = series.snapshot(4000).mass_at(0)
    ok &= abs(2000 * math.pi * p * p - 1.0) < 0.05
    assert _report("line-walk return masses + local clt", ok)


def test_fiber_average_formula_matches_brute_force():
    reports = verify.run_suite("fibers")
    rep = next(r for r in reports if r["suite"] == "fiber-formula")
    ok = rep["pass"] and rep["max_residual"] < 1e-12
    assert _report("fiber average formula vs brute force", ok)


def test_word_average_identity_two_sides_agree():
    reports = verify.run_suite("fibers")
    rep = next(r for r in reports if r["suite"] == "backforth-identity")
    ok = rep["pass"] and rep["max_residual"] < 1e-12
    assert _report("word-average identity both sides", ok)


def test_alternating_sequence_converges_on_three_cycle():
    model = build_cycle_model(3)
    mu = cycle_law({"0": 0.5, "+1": 0.5})
    entries = back_and_forth(model, 0, mu, 60)
    cauchy = entries[60].sup_distance(entries[59]) < 1e-8
    uniform = max(abs(entries[60].mass_at(x) - 1 / 3) for x in range(3)) < 1e-8
    # independent dense-matrix oracle for the final entry
    fwd = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
    bwd = np.array([[0.5, 0.0, 0.5], [0.5, 0.5, 0.0], [0.0, 0.5, 0.5]])
    expect = np.array([1.0, 0.0, 0.0]) @ np.linalg.matrix_power(bwd, 60) @ \
        np.linalg.matrix_power(fwd, 60)
    oracle = max(abs(entries[60].mass_at(x) - expect[x])
                 for x in range(3)) < 1e-12
    ok = cauchy and uniform and oracle
    assert _report("alternating sequence converges (3-cycle)", ok)


def test_invariance_operator_and_generator_verdicts_agree():
    rep = verify.run_suite("invariance")[0]
    ok = rep["pass"] and rep["disagreements"] == 0
    ok &= sum(c["subsets"] for c in rep["cases"].values()) == 2 * 4096
    assert _report("invariant-set verdict equivalence (2x4096 subsets)", ok)


def test_funnel_chain_mass_decay_and_return_monotonicity():
    win = range(0, 11)
    flat = build_funnel_chain(FunnelChainSpec(
        (), tail=("constant", 1.0), step_scale=0.25, truncation_size=400))
    decay = build_funnel_chain(FunnelChainSpec(
        (), tail=("geometric", 0.5, 0.5), step_scale=0.25,
        truncation_size=400))

    curve_flat = even_return_curve(flat, 0, None, 5000)
    curve_decay = even_return_curve(decay, 0, None, 5000)
    noninc = all(b <= a + 1e-15 for a, b in zip(curve_flat, curve_flat[1:]))
    noninc &= all(b <= a + 1e-15 for a, b in zip(curve_decay, curve_decay[1:]))

    sched = [0, 10_000]
    flat_mass = evolve(flat, 0, None, 10_000,
                       snapshot_schedule=sched).window_mass(10_000, win)
    s_decay = evolve(decay, 0, None, 10_000, snapshot_schedule=sched)
    decay_first = s_decay.window_mass(0, win)
    decay_last = s_decay.window_mass(10_000, win)

    decay_big = build_funnel_chain(FunnelChainSpec(
        (), tail=("geometric", 0.5, 0.5), step_scale=0.25,
        truncation_size=800))
    flat_big = build_funnel_chain(FunnelChainSpec(
        (), tail=("constant", 1.0), step_scale=0.25, truncation_size=800))
    flat_mass_big = evolve(flat_big, 0, None, 10_000,
                           snapshot_schedule=sched).window_mass(10_000, win)
    decay_last_big = evolve(decay_big, 0, None, 10_000,
                            snapshot_schedule=sched).window_mass(10_000, win)
    stable = abs(flat_mass - flat_mass_big) < 1e-6 and \
        abs(decay_last - decay_last_big) < 1e-6

    ok = noninc and flat_mass < 0.2 and stable and \
        decay_last < decay_first - 0.05
    assert _report("funnel chains: return curve + window decay", ok)


def test_nonsymmetric_conservative_map_recurrence_with_vanishing_occupation():
    starts = tuple(0.4 + 0.31459 * k for k in range(10))
    spec = BooleOrbitSpec(start_points=starts, horizon=100_000)
    report = boole_orbit(spec)
    final = [o.final_fraction for o in report.orbits]
    mean_at = lambda n: sum(dict(o.occupation_curve)[n]
                            for o in report.orbits) / len(report.orbits)
    decreasing = mean_at(100_000) < mean_at(10_000)
    late_revisit = sum(1 for o in report.orbits
                       if any(n > 1000 for n in o.revisit_times))
    drift = max(o.drift_bound for o in report.orbits)
    ok = max(final) < 0.3 and decreasing and late_revisit >= 8 and \
        drift < 1e-6
    assert _report("interval map: recurrence with vanishing occupation", ok)


def test_lattice_chart_retains_mass_while_free_chart_escapes():
    sched = tuple(range(25, 201, 25))
    mu = free_uniform_law()
    sl2 = run_ensemble(EnsembleSpec(
        chart="sl2-lattice", mu=mu, n_walkers=10_000, n_steps=200,
        master_seed=42, snapshot_schedule=sched))
    schottky = run_ensemble(EnsembleSpec(
        chart="schottky", mu=mu, n_walkers=10_000, n_steps=200,
        master_seed=42, snapshot_schedule=sched))
    retained = all(sl2.fraction(n, 0.05) >= 0.9 for n in sched)
    escaped = schottky.fraction(200, 5.0) < 0.1
    ok = retained and escaped
    assert _report("finite-volume retention vs free-group escape", ok)


def test_experiment_outputs_are_byte_identical_on_rerun(tmp_path):
    configs = [
        {
            "experiment": "evolve",
            "model": {"type": "z-lattice", "d": 1, "radius": 40},
            "law": {"atoms": [
                {"id": "+e1", "inverse": "-e1", "weight": 0.5},
                {"id": "-e1", "inverse": "+e1", "weight": 0.5},
            ]},
            "schedule": {"n_steps": 16, "snapshots": [4, 8, 16]},
            "start": 0, "window": [-2, 2],
            "out": {"csv": str(tmp_path / "e.csv"),
                    "json": str(tmp_path / "e.json")},
        },
        {
            "experiment": "schottky",
            "law": {"atoms": [
                {"id": "a", "inverse": "A", "weight": 0.25},
                {"id": "A", "inverse": "a", "weight": 0.25},
                {"id": "b", "inverse": "B", "weight": 0.25},
                {"id": "B", "inverse": "b", "weight": 0.25},
            ]},
            "seed": 42,
            "ensemble": {"chart": "schottky", "n_walkers": 200,
                         "n_steps": 50, "snapshots": [25, 50]},
            "out": {"csv": str(tmp_path / "s.csv"),
                    "json": str(tmp_path / "s.json")},
        },
    ]
    ok = True
    for cfg in configs:
        run_config(cfg)
        first = {p: (tmp_path / p).read_bytes()
                 for p in ("e.csv", "e.json", "s.csv", "s.json")
                 if (tmp_path / p).exists()}
        run_config(cfg)
        second = {p: (tmp_path / p).read_bytes()
                  for p in ("e.csv", "e.json", "s.csv", "s.json")
                  if (tmp_path / p).exists()}
        ok &= first == second
    assert _report("byte-identical reruns", ok)
