"""Bandwidth adaptation for prioritized camera streams.

Every visible camera contributes one stream.  A stream may be sent at a
reduced frame rate, which scales its bandwidth by a factor drawn from a
discrete reduction ladder.  Adaptation picks one factor per stream so that
the total bandwidth fits a budget while retaining as much priority-weighted
quality as possible -- a multiple-choice knapsack where every group must
contribute exactly one level.

Three heuristics with different fairness profiles are provided
(:func:`compromise`, :func:`round_robin`, :func:`aggressive`) plus an exact
dynamic-programming solver (:func:`exact_oracle`) for validating them on
small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SQRT2 = math.sqrt(2.0)

__all__ = [
    "SQRT2",
    "InfeasibleBudget",
    "InstanceTooLarge",
    "ReductionLadder",
    "StreamDescriptor",
    "AdaptedStream",
    "AdaptationPlan",
    "build_ladder",
    "minimum_budget",
    "compromise",
    "round_robin",
    "aggressive",
    "exact_oracle",
    "compromise_factors",
    "round_robin_factors",
    "aggressive_factors",
    "canonical_order",
    "count_operations",
]


class InfeasibleBudget(ValueError):
    """Budget below the floor S * R_max: no factor assignment can fit."""


class InstanceTooLarge(ValueError):
    """Exact solver guard: the DP table would exceed the configured cap."""


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class ReductionLadder:
    """Allowed bandwidth scaling factors, descending from 1 to the floor.

    Factors are 1/ceil(base**j) for j = 0..depth with duplicates removed,
    so each rung corresponds to an integer frame-rate divisor.
    """

    base: float
    depth: int
    factors: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.factors:
            raise ValueError("ladder needs at least one factor")
        if self.factors[0] != 1.0:
            raise ValueError("ladder must start at factor 1")
        if any(a <= b for a, b in zip(self.factors, self.factors[1:])):
            raise ValueError("ladder factors must be strictly descending")
        if self.factors[-1] <= 0.0:
            raise ValueError("ladder factors must be positive")

    @property
    def floor(self) -> float:
        """Deepest allowed reduction (the smallest factor)."""
        return self.factors[-1]


def build_ladder(base: float = SQRT2, depth: int = 4) -> ReductionLadder:
    """Build the reduction ladder {1/ceil(base**j) : 0 <= j <= depth}.

    (sqrt(2), 4) gives 1, 1/2, 1/3, 1/4; depth 5 appends 1/6.
    """
    if base <= 1.0:
        raise ValueError(f"ladder base must exceed 1, got {base}")
    if depth < 1:
        raise ValueError(f"ladder depth must be at least 1, got {depth}")
    divisors: list[int] = []
    for j in range(depth + 1):
        # float powers of exact roots drift upward (sqrt(2)**2 is slightly
        # above 2.0), so nudge down before taking the ceiling
        d = math.ceil(base**j - 1e-9)
        if d not in divisors:
            divisors.append(d)
    return ReductionLadder(base=base, depth=depth, factors=tuple(1.0 / d for d in divisors))


@dataclass(frozen=True)
class StreamDescriptor:
    """One camera stream as seen by the adaptation stage."""

    site_id: int
    camera_id: int
    full_bandwidth: float  # Mbps at full frame rate
    global_priority: float
    priority_class: str = "C11"
    arrival_time: float | None = None
    departure_time: float | None = None

    def __post_init__(self) -> None:
        if self.full_bandwidth <= 0:
            raise ValueError(f"full_bandwidth must be positive, got {self.full_bandwidth}")
        if self.global_priority <= 0:
            raise ValueError(f"global_priority must be positive, got {self.global_priority}")
        if (
            self.arrival_time is not None
            and self.departure_time is not None
            and self.arrival_time > self.departure_time
        ):
            raise ValueError("arrival_time must not exceed departure_time")


@dataclass(frozen=True)
class AdaptedStream:
    """A stream together with its chosen reduction factor."""

    stream: StreamDescriptor
    factor: float

    @property
    def adapted_bandwidth(self) -> float:
        return self.stream.full_bandwidth * self.factor

    @property
    def quality(self) -> float:
        return self.stream.global_priority * self.adapted_bandwidth


@dataclass(frozen=True)
class AdaptationPlan:
    """Factor assignment for a whole scene under one budget."""

    streams: tuple[AdaptedStream, ...]
    budget: float
    minimum_budget: float
    algorithm_tag: str

    @property
    def total_bandwidth(self) -> float:
        return float(sum(a.adapted_bandwidth for a in self.streams))

    @property
    def total_quality(self) -> float:
        return float(sum(a.quality for a in self.streams))


# ---------------------------------------------------------------------------
# shared helpers


def _slack(budget: float) -> float:
    """Floating-point headroom for budget comparisons."""
    return 1e-9 * (1.0 + abs(budget))


def minimum_budget(streams: Sequence[StreamDescriptor], ladder: ReductionLadder) -> float:
    """Smallest feasible budget: every stream at the ladder floor."""
    if not streams:
        return 0.0
    return sum(s.full_bandwidth for s in streams) * ladder.floor


def canonical_order(
    priorities: np.ndarray,
    bandwidths: np.ndarray,
    site_ids: np.ndarray,
    camera_ids: np.ndarray,
) -> np.ndarray:
    """Deterministic processing order: priority desc, bandwidth desc, ids asc.

    Ascending-priority traversals use the exact reverse of this order.
    """
    return np.lexsort((camera_ids, site_ids, -bandwidths, -priorities))


def _check_arrays(priorities, bandwidths, factors, budget):
    p = np.asarray(priorities, dtype=float)
    s = np.asarray(bandwidths, dtype=float)
    if p.shape != s.shape or p.ndim != 1:
        raise ValueError("priorities and bandwidths must be 1-D arrays of equal length")
    if p.size and (p.min() <= 0 or s.min() <= 0):
        raise ValueError("priorities and bandwidths must be positive")
    f = tuple(factors)
    if not f or f[0] != 1.0 or any(b >= a for a, b in zip(f, f[1:])):
        raise ValueError("factors must start at 1 and descend")
    floor = f[-1]
    if p.size and budget + _slack(budget) < s.sum() * floor:
        raise InfeasibleBudget(
            f"budget {budget:.6g} below floor {s.sum() * floor:.6g} (= total bandwidth x {floor:.4g})"
        )
    return p, s, f, floor


# ---------------------------------------------------------------------------
# heuristics (array level)


def compromise_factors(
    priorities: np.ndarray,
    bandwidths: np.ndarray,
    factors: Sequence[float],
    budget: float,
    order: np.ndarray | None = None,
) -> np.ndarray:
    """Grant bandwidth in descending priority order, floor-first elsewhere.

    Every stream starts at the ladder floor.  Walking streams from the most
    to the least important, each receives the highest rung whose lift above
    the floor still fits the remaining surplus; the surplus shrinks by the
    lift actually granted.  High-priority streams therefore stay at full
    bandwidth as long as the budget allows, and the cut-off degrades
    gracefully through the ladder instead of jumping straight to the floor.
    """
    p, s, f, floor = _check_arrays(priorities, bandwidths, factors, budget)
    n = p.size
    out = np.full(n, floor)
    if n == 0:
        return out
    if order is None:
        order = np.lexsort((s, p))[::-1]
    eps = _slack(budget)
    surplus = budget - s.sum() * floor
    if surplus <= eps:
        return out

    sp = s[order]
    lift_full = sp * (1.0 - floor)
    cum_full = np.cumsum(lift_full)
    # cheapest possible lift for any stream from position i onward
    min_gap = f[-2] - floor if len(f) > 1 else 0.0
    suffix_min = np.minimum.accumulate(sp[::-1])[::-1] * min_gap

    i = 0
    while i < n and min_gap > 0.0:
        if surplus + eps < suffix_min[i]:
            break  # nothing downstream can afford even one rung
        base = cum_full[i - 1] if i else 0.0
        j = int(np.searchsorted(cum_full, base + surplus + eps, side="right"))
        if j > i:
            # vectorized run of full grants
            out[order[i:j]] = 1.0
            surplus -= cum_full[j - 1] - base
            i = j
            continue
        # stream i cannot go full: best intermediate rung that fits
        si = sp[i]
        for r in f[1:-1]:
            lift = si * (r - floor)
            if lift <= surplus + eps:
                out[order[i]] = r
                surplus -= lift
                break
        i += 1
    return out


def round_robin_factors(
    priorities: np.ndarray,
    bandwidths: np.ndarray,
    factors: Sequence[float],
    budget: float,
    order: np.ndarray | None = None,
) -> np.ndarray:
    """Cut one rung per stream per cycle, least important first.

    Starting from full bandwidth everywhere, cycle over the streams in
    ascending priority order stepping each one down a single rung per visit
    (skipping streams already at the floor) until the total fits the budget;
    the cycle stops mid-pass the moment it does.
    """
    p, s, f, floor = _check_arrays(priorities, bandwidths, factors, budget)
    n = p.size
    if n == 0:
        return np.ones(0)
    if order is None:
        order = np.lexsort((s, p))[::-1]
    ascending = order[::-1]
    eps = _slack(budget)
    level = np.zeros(n, dtype=np.int64)
    total = float(s.sum())
    last = len(f) - 1
    while total > budget + eps:
        for i in ascending:
            if level[i] == last:
                continue
            total -= s[i] * (f[level[i]] - f[level[i] + 1])
            level[i] += 1
            if total <= budget + eps:
                break
    return np.asarray(f, dtype=float)[level]


def aggressive_factors(
    priorities: np.ndarray,
    bandwidths: np.ndarray,
    factors: Sequence[float],
    budget: float,
    order: np.ndarray | None = None,
) -> np.ndarray:
    """Send the least important streams straight to the floor, one at a time.

    Starting from full bandwidth everywhere, walk streams in ascending
    priority order and drop the current one all the way to the deepest rung
    (stepping through every intermediate rung) until the total fits the
    budget; everything more important keeps full bandwidth.
    """
    p, s, f, floor = _check_arrays(priorities, bandwidths, factors, budget)
    n = p.size
    if n == 0:
        return np.ones(0)
    if order is None:
        order = np.lexsort((s, p))[::-1]
    ascending = order[::-1]
    eps = _slack(budget)
    level = np.zeros(n, dtype=np.int64)
    total = float(s.sum())
    last = len(f) - 1
    for i in ascending:
        if total <= budget + eps:
            break
        total -= s[i] * (1.0 - floor)
        level[i] = last
    return np.asarray(f, dtype=float)[level]


# ---------------------------------------------------------------------------
# plan-level API


def _arrays_from_streams(streams: Sequence[StreamDescriptor]):
    keys = {(d.site_id, d.camera_id) for d in streams}
    if len(keys) != len(streams):
        raise ValueError("(site_id, camera_id) pairs must be unique within an instance")
    p = np.array([d.global_priority for d in streams], dtype=float)
    s = np.array([d.full_bandwidth for d in streams], dtype=float)
    site = np.array([d.site_id for d in streams], dtype=np.int64)
    cam = np.array([d.camera_id for d in streams], dtype=np.int64)
    return p, s, site, cam


def _make_plan(streams, ladder, budget, factors, tag) -> AdaptationPlan:
    adapted = tuple(
        AdaptedStream(stream=d, factor=float(r)) for d, r in zip(streams, factors)
    )
    wmin = 0.0 if not streams else minimum_budget(streams, ladder)
    return AdaptationPlan(
        streams=adapted, budget=float(budget), minimum_budget=wmin, algorithm_tag=tag
    )


def _heuristic_plan(streams, ladder, budget, tag, factor_fn) -> AdaptationPlan:
    if not streams:
        if budget < 0:
            raise InfeasibleBudget("budget must be nonnegative")
        return _make_plan((), ladder, budget, (), tag)
    p, s, site, cam = _arrays_from_streams(streams)
    order = canonical_order(p, s, site, cam)
    chosen = factor_fn(p, s, ladder.factors, budget, order)
    return _make_plan(tuple(streams), ladder, budget, chosen, tag)


def compromise(
    streams: Sequence[StreamDescriptor], ladder: ReductionLadder, budget: float
) -> AdaptationPlan:
    """Priority-ordered greedy adaptation (see :func:`compromise_factors`)."""
    return _heuristic_plan(streams, ladder, budget, "compromise", compromise_factors)


def round_robin(
    streams: Sequence[StreamDescriptor], ladder: ReductionLadder, budget: float
) -> AdaptationPlan:
    """Evenly spread cuts (see :func:`round_robin_factors`)."""
    return _heuristic_plan(streams, ladder, budget, "round_robin", round_robin_factors)


def aggressive(
    streams: Sequence[StreamDescriptor], ladder: ReductionLadder, budget: float
) -> AdaptationPlan:
    """Floor the least important streams first (see :func:`aggressive_factors`)."""
    return _heuristic_plan(streams, ladder, budget, "aggressive", aggressive_factors)


# ---------------------------------------------------------------------------
# exact solver


def exact_oracle(
    streams: Sequence[StreamDescriptor],
    ladder: ReductionLadder,
    budget: float,
    resolution: float = 0.01,
    max_cells: int = 20_000_000,
) -> AdaptationPlan:
    """Optimal plan by dynamic programming over discretized bandwidth.

    Lift costs above the ladder floor are discretized to ``resolution`` Mbps
    (rounded up, so the result never overspends); quality values stay exact.
    Intended for validating the heuristics on small instances.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    if not streams:
        if budget < 0:
            raise InfeasibleBudget("budget must be nonnegative")
        return _make_plan((), ladder, budget, (), "exact")
    if len(streams) > 200:
        raise InstanceTooLarge(f"exact solver capped at 200 streams, got {len(streams)}")
    p, s, site, cam = _arrays_from_streams(streams)
    f = ladder.factors
    floor = f[-1]
    total = float(s.sum())
    if budget + _slack(budget) < total * floor:
        raise InfeasibleBudget(
            f"budget {budget:.6g} below floor {total * floor:.6g}"
        )
    if total <= budget + _slack(budget):
        return _make_plan(tuple(streams), ladder, budget, np.ones(len(streams)), "exact")

    capacity = int(math.floor((budget - total * floor) / resolution + 1e-9))
    n = len(streams)
    if (capacity + 1) * n > max_cells:
        raise InstanceTooLarge(
            f"DP table of {n} x {capacity + 1} cells exceeds cap {max_cells}"
        )

    rungs = f[:-1]  # strictly above the floor
    weights = np.array(
        [[math.ceil(si * (r - floor) / resolution - 1e-9) for r in rungs] for si in s],
        dtype=np.int64,
    )
    values = np.array([[pi * si * (r - floor) for r in rungs] for pi, si in zip(p, s)])

    best = np.zeros(capacity + 1)
    floor_idx = len(rungs)
    choice = np.full((n, capacity + 1), floor_idx, dtype=np.uint8)
    for i in range(n):
        new = best.copy()
        for ridx in range(len(rungs)):
            w = int(weights[i, ridx])
            if w > capacity:
                continue
            cand = best[: capacity + 1 - w] + values[i, ridx]
            seg = new[w:]
            upd = cand > seg
            seg[upd] = cand[upd]
            choice[i, w:][upd] = ridx
        best = new

    # walk the choice table back to a concrete factor per stream
    chosen = np.full(n, floor)
    w = int(np.argmax(best))
    for i in range(n - 1, -1, -1):
        ridx = int(choice[i, w])
        if ridx != floor_idx:
            chosen[i] = rungs[ridx]
            w -= int(weights[i, ridx])
    return _make_plan(tuple(streams), ladder, budget, chosen, "exact")


# ---------------------------------------------------------------------------
# instrumentation


def count_operations(
    priorities: Sequence[float],
    bandwidths: Sequence[float],
    factors: Sequence[float],
    budget: float,
) -> int:
    """Comparison count of a pure-Python compromise pass.

    Counts every sort comparison plus every budget/rung test of the greedy
    walk, giving a machine-independent growth measure for complexity checks
    (one sort and one linear pass: O(n log n) overall).
    """
    counter = [0]

    class _Key:
        __slots__ = ("t",)

        def __init__(self, t):
            self.t = t

        def __lt__(self, other):
            counter[0] += 1
            return self.t < other.t

    p = list(priorities)
    s = list(bandwidths)
    f = list(factors)
    floor = f[-1]
    order = sorted(range(len(p)), key=lambda i: _Key((-p[i], -s[i])))
    surplus = budget - sum(s) * floor
    min_gap = f[-2] - floor if len(f) > 1 else 0.0
    for i in order:
        counter[0] += 1
        if surplus <= 0.0 or min_gap <= 0.0:
            break
        for r in f[:-1]:
            counter[0] += 1
            lift = s[i] * (r - floor)
            if lift <= surplus:
                surplus -= lift
                break
    return counter[0]
