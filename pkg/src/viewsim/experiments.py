"""Quantitative studies over the simulator.

Budget sweeps across priority triples, ladder depths, and adaptation
algorithms with per-class metrics aggregated over repeated trials; a
synthetic scaling benchmark for the main solver; CSV export of both.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field, fields as dataclass_fields
from typing import Iterable, Sequence

import numpy as np

from .adapt import (
    SQRT2,
    AdaptationPlan,
    build_ladder,
    canonical_order,
    compromise_factors,
    count_operations,
    round_robin_factors,
    aggressive_factors,
)
from .priority import PriorityClass, PriorityTriple, ViewerState, classify_scene
from .world import make_room

__all__ = [
    "ALGORITHMS",
    "ExperimentConfig",
    "MetricsReport",
    "total_quality",
    "adaptation_ratio",
    "run_sweep",
    "run_scaling_bench",
    "fit_nlogn",
]

ALGORITHMS = {
    "compromise": compromise_factors,
    "round_robin": round_robin_factors,
    "aggressive": aggressive_factors,
}

CLASS_LABELS = tuple(c.name for c in PriorityClass)
METRICS = ("total_quality", "adaptation_ratio", "avg_quality_per_stream")


def total_quality(plan: AdaptationPlan) -> float:
    """Sum of priority x adapted bandwidth over the plan."""
    return plan.total_quality


def adaptation_ratio(before_quality: float, after_quality: float) -> float:
    """Quality retained by adaptation, in (0, 1] for any feasible plan."""
    if before_quality <= 0:
        raise ValueError("before_quality must be positive")
    return after_quality / before_quality


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep settings; scene fields mirror the room builder."""

    n_sites: int = 10
    cameras_per_site: int = 10
    budget_fractions: tuple[float, ...] = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    triples: tuple[PriorityTriple, ...] = (
        PriorityTriple(1.0, 2.0, 2.0),
        PriorityTriple(1.0, 3.0, 3.0),
    )
    ladder_base: float = SQRT2
    ladder_depths: tuple[int, ...] = (4, 5)
    trials: int = 10
    seed: int = 0
    room_diameter: float = 10.0
    placement: str = "uniform"
    pair_distance: float = 1.0
    facing: str = "centroid"
    bandwidth_range: tuple[float, float] = (5.0, 15.0)
    viewer_x: float | None = None  # default: a quarter diameter behind center
    viewer_y: float = 0.0
    viewer_heading_deg: float = 0.0
    main_fov_deg: float = 60.0
    wide_fov_deg: float = 180.0

    def __post_init__(self) -> None:
        if self.n_sites < 0 or self.cameras_per_site < 0:
            raise ValueError("site and camera counts must be nonnegative")
        if not self.budget_fractions or any(not (0 < f <= 1) for f in self.budget_fractions):
            raise ValueError("budget fractions must lie in (0, 1]")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.ladder_depths:
            raise ValueError("need at least one ladder depth")

    def viewer(self) -> ViewerState:
        x = -self.room_diameter / 4.0 if self.viewer_x is None else self.viewer_x
        return ViewerState(
            x=x,
            y=self.viewer_y,
            heading=math.radians(self.viewer_heading_deg),
            main_fov=math.radians(self.main_fov_deg),
            wide_fov=math.radians(self.wide_fov_deg),
        )

    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "cameras_per_site": self.cameras_per_site,
            "budget_fractions": list(self.budget_fractions),
            "triples": [[t.p0, t.p1, t.p2] for t in self.triples],
            "ladder_base": self.ladder_base,
            "ladder_depths": list(self.ladder_depths),
            "trials": self.trials,
            "seed": self.seed,
            "room_diameter": self.room_diameter,
            "placement": self.placement,
            "pair_distance": self.pair_distance,
            "facing": self.facing,
            "bandwidth_range": list(self.bandwidth_range),
            "viewer_x": self.viewer_x,
            "viewer_y": self.viewer_y,
            "viewer_heading_deg": self.viewer_heading_deg,
            "main_fov_deg": self.main_fov_deg,
            "wide_fov_deg": self.wide_fov_deg,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclass_fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        kwargs = dict(data)
        if "budget_fractions" in kwargs:
            kwargs["budget_fractions"] = tuple(kwargs["budget_fractions"])
        if "ladder_depths" in kwargs:
            kwargs["ladder_depths"] = tuple(kwargs["ladder_depths"])
        if "bandwidth_range" in kwargs:
            kwargs["bandwidth_range"] = tuple(kwargs["bandwidth_range"])
        if "triples" in kwargs:
            kwargs["triples"] = tuple(PriorityTriple(*t) for t in kwargs["triples"])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class MetricsReport:
    """Per-trial metric samples plus their mean/stddev aggregation.

    ``samples`` maps (algorithm, triple, depth, fraction, class, metric) to a
    per-trial vector; NaN marks trials where the cell had no streams.  The
    class axis includes the four priority classes plus an "all" aggregate.
    """

    config: ExperimentConfig
    samples: dict[tuple, np.ndarray] = field(default_factory=dict)
    infeasible: list[tuple] = field(default_factory=list)

    def _slot(self, key: tuple) -> np.ndarray:
        if key not in self.samples:
            self.samples[key] = np.full(self.config.trials, np.nan)
        return self.samples[key]

    def record(self, key: tuple, trial: int, value: float) -> None:
        self._slot(key)[trial] = value

    def mean_std(self, key: tuple) -> tuple[float, float, int]:
        vals = self.samples[key]
        ok = ~np.isnan(vals)
        count = int(ok.sum())
        if count == 0:
            return math.nan, math.nan, 0
        return float(vals[ok].mean()), float(vals[ok].std()), count

    def rows(self) -> Iterable[tuple]:
        for key in sorted(self.samples):
            mean, std, count = self.mean_std(key)
            if count == 0:
                continue
            algorithm, triple, depth, fraction, cls, metric = key
            yield (
                algorithm,
                triple,
                depth,
                repr(float(fraction)),
                cls,
                metric,
                repr(mean),
                repr(std),
                count,
            )

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["algorithm", "triple", "depth", "fraction", "class", "metric", "mean", "stddev", "trials"]
            )
            writer.writerows(self.rows())


def _record_plan_metrics(
    report: MetricsReport,
    prefix: tuple,
    trial: int,
    priorities: np.ndarray,
    bandwidths: np.ndarray,
    labels: np.ndarray,
    factors: np.ndarray,
) -> None:
    quality_before = priorities * bandwidths
    quality_after = quality_before * factors
    for cls in (*CLASS_LABELS, "all"):
        mask = np.ones(len(labels), dtype=bool) if cls == "all" else labels == cls
        count = int(mask.sum())
        if count == 0:
            continue
        before = float(quality_before[mask].sum())
        after = float(quality_after[mask].sum())
        report.record((*prefix, cls, "total_quality"), trial, after)
        report.record((*prefix, cls, "adaptation_ratio"), trial, after / before)
        report.record((*prefix, cls, "avg_quality_per_stream"), trial, after / count)


def run_sweep(config: ExperimentConfig) -> MetricsReport:
    """Run the full (trial x triple x depth x fraction x algorithm) grid.

    Within a trial every configuration shares one generated scene, so
    algorithm and parameter effects are paired, not confounded by scene
    randomness.  Budgets below the ladder floor are reported as infeasible
    cells and skipped.
    """
    report = MetricsReport(config=config)
    viewer = config.viewer()
    ladders = {depth: build_ladder(config.ladder_base, depth) for depth in config.ladder_depths}
    infeasible = set()
    for trial in range(config.trials):
        rng = np.random.default_rng([config.seed, trial])
        room = make_room(
            config.n_sites,
            config.cameras_per_site,
            config.room_diameter,
            viewer,
            rng,
            placement=config.placement,
            pair_distance=config.pair_distance,
            facing=config.facing,
            bandwidth_range=config.bandwidth_range,
            rng_seed=config.seed,
        )
        for triple in config.triples:
            streams = classify_scene(viewer, room.participants, triple)
            if not streams:
                continue
            priorities = np.array([d.global_priority for d in streams])
            bandwidths = np.array([d.full_bandwidth for d in streams])
            labels = np.array([d.priority_class for d in streams])
            site = np.array([d.site_id for d in streams])
            cam = np.array([d.camera_id for d in streams])
            order = canonical_order(priorities, bandwidths, site, cam)
            total = float(bandwidths.sum())
            for depth, ladder in ladders.items():
                floor_budget = total * ladder.floor
                for fraction in config.budget_fractions:
                    budget = fraction * total
                    if budget + 1e-9 * (1 + budget) < floor_budget:
                        infeasible.add((triple.label, depth, fraction))
                        continue
                    for name, solver in ALGORITHMS.items():
                        chosen = solver(priorities, bandwidths, ladder.factors, budget, order)
                        _record_plan_metrics(
                            report,
                            (name, triple.label, depth, fraction),
                            trial,
                            priorities,
                            bandwidths,
                            labels,
                            chosen,
                        )
    report.infeasible = sorted(infeasible)
    return report


# ---------------------------------------------------------------------------
# scaling benchmark


def _synth_arrays(n_streams: int, triple: PriorityTriple, bandwidth_range, rng):
    weights = [
        triple.p0 * triple.p0,
        triple.p0 * triple.p2,
        triple.p1 * triple.p0,
        triple.p1 * triple.p2,
    ]
    priorities = rng.choice(weights, size=n_streams)
    bandwidths = rng.uniform(*bandwidth_range, n_streams)
    return priorities, bandwidths


def run_scaling_bench(
    sizes: Sequence[tuple[int, int]],
    seed: int = 0,
    fraction: float = 0.5,
    ladder_depth: int = 4,
    bandwidth_range: tuple[float, float] = (5.0, 15.0),
) -> list[dict]:
    """Time the compromise solver on synthetic instances of growing size.

    Wall time covers only the solve (sort included); the operation count
    comes from an instrumented pure-Python pass over the same instance.
    """
    if not sizes:
        raise ValueError("sizes must be nonempty")
    ladder = build_ladder(depth=ladder_depth)
    triple = PriorityTriple(1.0, 2.0, 2.0)
    rows = []
    for n_sites, cameras in sizes:
        n = n_sites * cameras
        rng = np.random.default_rng([seed, n_sites, cameras])
        priorities, bandwidths = _synth_arrays(n, triple, bandwidth_range, rng)
        budget = fraction * float(bandwidths.sum())
        start = time.perf_counter()
        compromise_factors(priorities, bandwidths, ladder.factors, budget)
        wall = time.perf_counter() - start
        ops = count_operations(priorities.tolist(), bandwidths.tolist(), ladder.factors, budget)
        rows.append(
            {
                "n_sites": n_sites,
                "cameras_per_site": cameras,
                "n_streams": n,
                "wall_seconds": wall,
                "op_count": ops,
            }
        )
    return rows


def fit_nlogn(n_streams: Sequence[int], op_counts: Sequence[int]) -> tuple[float, float]:
    """Least-squares fit op_count ~ C * n log2 n; returns (C, R^2)."""
    n = np.asarray(n_streams, dtype=float)
    y = np.asarray(op_counts, dtype=float)
    if n.size == 0 or n.shape != y.shape:
        raise ValueError("need equally many sizes and op counts, at least one pair")
    if (n <= 1).any():
        raise ValueError("stream counts must exceed 1 for an n log n fit")
    x = n * np.log2(n)
    coeff = float((x * y).sum() / (x * x).sum())
    residual = y - coeff * x
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return coeff, 1.0
    return coeff, 1.0 - float((residual**2).sum()) / ss_tot
