"""Tests for the sweep harness, metrics, CSV export, and scaling bench."""

from __future__ import annotations

import csv
import math

import numpy as np
import pytest

from viewsim.adapt import SQRT2, build_ladder, compromise
from viewsim.experiments import (
    ExperimentConfig,
    adaptation_ratio,
    fit_nlogn,
    run_scaling_bench,
    run_sweep,
    total_quality,
)
from viewsim.priority import PriorityTriple

from conftest import make_streams

CLASSES = ("C11", "C12", "C21", "C22")


def small_config(**overrides):
    base = dict(
        n_sites=6,
        cameras_per_site=6,
        budget_fractions=(0.5, 1.0),
        triples=(PriorityTriple(1, 2, 2),),
        ladder_depths=(4,),
        trials=4,
        seed=3,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


# ---------------------------------------------------------------------------
# quality metrics


def test_total_quality_worked_plan():
    streams = make_streams([(4.0, 8.0), (2.0, 8.0), (1.0, 8.0)])
    plan = compromise(streams, build_ladder(SQRT2, 4), 12.0)
    assert total_quality(plan) == pytest.approx(38.0)


def test_total_quality_empty_plan():
    plan = compromise([], build_ladder(SQRT2, 4), 0.0)
    assert total_quality(plan) == 0.0


def test_adaptation_ratio_worked_value():
    assert adaptation_ratio(56.0, 38.0) == pytest.approx(0.6786, abs=1e-4)


def test_adaptation_ratio_requires_positive_before():
    with pytest.raises(ValueError):
        adaptation_ratio(0.0, 1.0)
    with pytest.raises(ValueError):
        adaptation_ratio(-2.0, 1.0)


# ---------------------------------------------------------------------------
# configuration


def test_config_defaults_match_documented_experiment():
    cfg = ExperimentConfig()
    assert cfg.n_sites == 10 and cfg.cameras_per_site == 10
    assert cfg.budget_fractions == (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    assert [t.label for t in cfg.triples] == ["(1,2,2)", "(1,3,3)"]
    assert cfg.ladder_base == pytest.approx(SQRT2)
    assert cfg.ladder_depths == (4, 5)
    assert cfg.trials == 10
    assert cfg.room_diameter == 10.0
    assert cfg.main_fov_deg == 60.0 and cfg.wide_fov_deg == 180.0
    viewer = cfg.viewer()
    assert viewer.x == -2.5 and viewer.y == 0.0 and viewer.heading == 0.0


def test_config_round_trip_and_unknown_keys():
    cfg = small_config()
    clone = ExperimentConfig.from_dict(cfg.to_dict())
    assert clone == cfg
    bad = cfg.to_dict()
    bad["budget_fraction"] = 0.5  # typo'd key must not be silently dropped
    with pytest.raises(ValueError, match="budget_fraction"):
        ExperimentConfig.from_dict(bad)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(budget_fractions=(0.0,))
    with pytest.raises(ValueError):
        ExperimentConfig(budget_fractions=(1.2,))
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
    with pytest.raises(Exception):
        cfg = ExperimentConfig()
        cfg.trials = 5  # frozen


# ---------------------------------------------------------------------------
# sweep behaviour


def test_sweep_produces_expected_grid():
    cfg = small_config()
    report = run_sweep(cfg)
    algorithms = {k[0] for k in report.samples}
    assert algorithms == {"compromise", "round_robin", "aggressive"}
    metrics = {k[5] for k in report.samples}
    assert metrics == {"total_quality", "adaptation_ratio", "avg_quality_per_stream"}
    key = ("compromise", "(1,2,2)", 4, 1.0, "all", "adaptation_ratio")
    assert key in report.samples
    assert report.infeasible == []


def test_sweep_full_budget_keeps_everything():
    report = run_sweep(small_config())
    for name in ("compromise", "round_robin", "aggressive"):
        vals = report.samples[(name, "(1,2,2)", 4, 1.0, "all", "adaptation_ratio")]
        ok = vals[~np.isnan(vals)]
        assert len(ok) > 0
        assert np.allclose(ok, 1.0)


def test_sweep_ratios_within_bounds():
    report = run_sweep(small_config())
    floor = build_ladder(SQRT2, 4).floor
    for key, vals in report.samples.items():
        if key[5] != "adaptation_ratio":
            continue
        ok = vals[~np.isnan(vals)]
        assert (ok >= floor - 1e-9).all()
        assert (ok <= 1.0 + 1e-9).all()


def test_sweep_mean_quality_monotone_in_fraction():
    cfg = small_config(budget_fractions=(0.3, 0.5, 0.7, 1.0), trials=5)
    report = run_sweep(cfg)
    for name in ("compromise", "round_robin", "aggressive"):
        means = [
            report.mean_std((name, "(1,2,2)", 4, f, "all", "total_quality"))[0]
            for f in cfg.budget_fractions
        ]
        assert all(a <= b + 1e-9 for a, b in zip(means, means[1:]))


def test_sweep_compromise_prefers_high_class():
    cfg = small_config(n_sites=8, cameras_per_site=8, trials=6)
    report = run_sweep(cfg)
    key_hi = ("compromise", "(1,2,2)", 4, 0.5, "C22", "adaptation_ratio")
    key_lo = ("compromise", "(1,2,2)", 4, 0.5, "C11", "adaptation_ratio")
    hi, _, n_hi = report.mean_std(key_hi)
    lo, _, n_lo = report.mean_std(key_lo)
    assert n_hi > 0 and n_lo > 0
    assert hi > lo


def test_sweep_shares_scene_across_algorithms():
    # Paired design: the "all" total_quality at fraction 1.0 is the same
    # number for every algorithm within a trial because the scene (hence the
    # full quality) is shared.
    report = run_sweep(small_config())
    reference = report.samples[("compromise", "(1,2,2)", 4, 1.0, "all", "total_quality")]
    for name in ("round_robin", "aggressive"):
        vals = report.samples[(name, "(1,2,2)", 4, 1.0, "all", "total_quality")]
        assert np.array_equal(vals, reference, equal_nan=True)


def test_sweep_records_infeasible_cells():
    cfg = small_config(budget_fractions=(0.2, 0.5), ladder_depths=(4,))
    report = run_sweep(cfg)
    assert ("(1,2,2)", 4, 0.2) in report.infeasible
    assert all(key[3] != 0.2 for key in report.samples)


def test_sweep_handles_absent_classes():
    # A 1-degree main cone essentially never sees Main coverage, so C22
    # samples are absent while the low class and the "all" aggregate stay
    # populated.
    cfg = small_config(main_fov_deg=1.0, trials=3)
    report = run_sweep(cfg)
    assert ("compromise", "(1,2,2)", 4, 1.0, "C22", "adaptation_ratio") not in report.samples
    key_all = ("compromise", "(1,2,2)", 4, 1.0, "all", "adaptation_ratio")
    mean, _, count = report.mean_std(key_all)
    assert count == 3 and math.isfinite(mean)


# ---------------------------------------------------------------------------
# CSV export


def test_csv_header_and_determinism(tmp_path):
    cfg = small_config()
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_sweep(cfg).to_csv(a)
    run_sweep(cfg).to_csv(b)
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "algorithm,triple,depth,fraction,class,metric,mean,stddev,trials"
    assert len(lines) > 1
    with open(a, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    for row in rows:
        assert row[0] in ("aggressive", "compromise", "round_robin")
        assert row[1] == "(1,2,2)"
        float(row[3]), float(row[6]), float(row[7])  # numeric columns parse
        assert row[4] in (*CLASSES, "all")
        assert int(row[8]) <= cfg.trials


def test_csv_stddev_is_population_form(tmp_path):
    report = run_sweep(small_config())
    key = ("compromise", "(1,2,2)", 4, 0.5, "all", "adaptation_ratio")
    vals = report.samples[key]
    ok = vals[~np.isnan(vals)]
    mean, std, count = report.mean_std(key)
    assert mean == pytest.approx(float(ok.mean()))
    assert std == pytest.approx(float(ok.std(ddof=0)))
    assert count == len(ok)


# ---------------------------------------------------------------------------
# scaling bench


def test_scaling_bench_shape_and_growth():
    rows = run_scaling_bench([(20, 20), (40, 40)], seed=1)
    assert [r["n_streams"] for r in rows] == [400, 1600]
    for row in rows:
        assert row["wall_seconds"] >= 0.0
        assert row["op_count"] > 0
    assert rows[0]["op_count"] < rows[1]["op_count"]


def test_fit_nlogn_recovers_constant():
    ns = [400, 1600, 3600, 6400]
    coeff = 3.7
    ops = [coeff * n * math.log2(n) for n in ns]
    fitted, r2 = fit_nlogn(ns, ops)
    assert fitted == pytest.approx(coeff, rel=1e-6)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_fit_nlogn_rejects_degenerate_input():
    with pytest.raises(ValueError):
        fit_nlogn([], [])
    with pytest.raises(ValueError):
        fit_nlogn([10], [1.0, 2.0])
