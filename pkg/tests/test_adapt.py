"""Tests for the bandwidth adaptation core: ladders, heuristics, plans."""

from __future__ import annotations

import math

import numpy as np
import pytest

from viewsim.adapt import (
    InfeasibleBudget,
    ReductionLadder,
    StreamDescriptor,
    aggressive,
    aggressive_factors,
    build_ladder,
    canonical_order,
    compromise,
    compromise_factors,
    count_operations,
    minimum_budget,
    round_robin,
    round_robin_factors,
)
from viewsim.experiments import total_quality

from conftest import make_streams, random_arrays

SQRT2 = math.sqrt(2.0)
THREE_STREAMS = [(4.0, 8.0), (2.0, 8.0), (1.0, 8.0)]

HEURISTIC_FNS = {
    "compromise": compromise_factors,
    "round_robin": round_robin_factors,
    "aggressive": aggressive_factors,
}
HEURISTIC_PLANS = {
    "compromise": compromise,
    "round_robin": round_robin,
    "aggressive": aggressive,
}


# ---------------------------------------------------------------------------
# ladder construction


def test_ladder_sqrt2_depth4():
    ladder = build_ladder(SQRT2, 4)
    assert ladder.factors == (1.0, 1 / 2, 1 / 3, 1 / 4)


def test_ladder_sqrt2_depth5_adds_one_sixth():
    ladder = build_ladder(SQRT2, 5)
    assert ladder.factors == (1.0, 1 / 2, 1 / 3, 1 / 4, 1 / 6)


def test_ladder_deduplicates_and_descends():
    # base 2, depth 4 spans divisors 1, 2, 4, 8, 16 with no duplicates
    ladder = build_ladder(2.0, 4)
    assert ladder.factors == (1.0, 1 / 2, 1 / 4, 1 / 8, 1 / 16)
    for ladder in (build_ladder(SQRT2, d) for d in range(1, 9)):
        assert ladder.factors[0] == 1.0
        assert len(set(ladder.factors)) == len(ladder.factors)
        assert all(a > b for a, b in zip(ladder.factors, ladder.factors[1:]))


def test_ladder_identity_via_direct_construction():
    # A no-reduction ladder cannot come out of build_ladder (depth >= 1
    # always adds a rung) but is a legal value.
    ladder = ReductionLadder(base=SQRT2, depth=0, factors=(1.0,))
    assert ladder.floor == 1.0


def test_ladder_direct_construction_validates():
    ReductionLadder(base=2.0, depth=2, factors=(1.0, 0.5))
    with pytest.raises(ValueError):
        ReductionLadder(base=2.0, depth=2, factors=(0.5, 1.0))  # ascending
    with pytest.raises(ValueError):
        ReductionLadder(base=2.0, depth=1, factors=(0.9,))  # missing unity
    with pytest.raises(ValueError):
        build_ladder(0.9, 4)  # base must exceed 1
    with pytest.raises(ValueError):
        build_ladder(SQRT2, 0)  # depth must be positive


def test_ladder_floor_drops_with_depth():
    assert build_ladder(SQRT2, 5).floor < build_ladder(SQRT2, 4).floor


# ---------------------------------------------------------------------------
# minimum budget / feasibility


def test_minimum_budget_three_streams():
    ladder = build_ladder(SQRT2, 4)
    assert minimum_budget(make_streams(THREE_STREAMS), ladder) == pytest.approx(6.0)


def test_minimum_budget_empty():
    assert minimum_budget([], build_ladder(SQRT2, 4)) == 0.0


@pytest.mark.parametrize("name", HEURISTIC_PLANS)
def test_infeasible_budget_raises(name):
    streams = make_streams(THREE_STREAMS)
    ladder = build_ladder(SQRT2, 4)
    with pytest.raises(InfeasibleBudget):
        HEURISTIC_PLANS[name](streams, ladder, 5.999)


@pytest.mark.parametrize("name", HEURISTIC_PLANS)
def test_budget_equal_to_minimum_floors_everything(name):
    streams = make_streams(THREE_STREAMS)
    ladder = build_ladder(SQRT2, 4)
    plan = HEURISTIC_PLANS[name](streams, ladder, 6.0)
    assert [a.factor for a in plan.streams] == [0.25, 0.25, 0.25]


# ---------------------------------------------------------------------------
# worked instances


def test_compromise_worked_instance():
    streams = make_streams(THREE_STREAMS)
    ladder = build_ladder(SQRT2, 4)
    plan = compromise(streams, ladder, 12.0)
    factors = [a.factor for a in plan.streams]
    assert factors == [1.0, 0.25, 0.25]
    assert sum(a.factor * a.stream.full_bandwidth for a in plan.streams) == pytest.approx(12.0)
    assert total_quality(plan) == pytest.approx(38.0)
    assert plan.budget == 12.0
    assert plan.minimum_budget == pytest.approx(6.0)
    assert plan.algorithm_tag == "compromise"


def test_aggressive_worked_instance():
    # At W=19 the lowest-priority stream is floored outright (frees 6),
    # bringing the total to 18; the other two streams stay untouched.
    streams = make_streams(THREE_STREAMS)
    ladder = build_ladder(SQRT2, 4)
    plan = aggressive(streams, ladder, 19.0)
    assert [a.factor for a in plan.streams] == [1.0, 1.0, 0.25]
    assert sum(a.factor * a.stream.full_bandwidth for a in plan.streams) == pytest.approx(18.0)
    assert plan.algorithm_tag == "aggressive"


def test_round_robin_worked_instance():
    # One full cycle of single-rung cuts reaches 12 <= 14.
    streams = make_streams(THREE_STREAMS)
    ladder = build_ladder(SQRT2, 4)
    plan = round_robin(streams, ladder, 14.0)
    assert [a.factor for a in plan.streams] == [0.5, 0.5, 0.5]
    assert sum(a.factor * a.stream.full_bandwidth for a in plan.streams) == pytest.approx(12.0)
    assert plan.algorithm_tag == "round_robin"


@pytest.mark.parametrize("name", HEURISTIC_PLANS)
def test_full_budget_means_no_reduction(name):
    streams = make_streams(THREE_STREAMS)
    ladder = build_ladder(SQRT2, 4)
    plan = HEURISTIC_PLANS[name](streams, ladder, 24.0)
    assert [a.factor for a in plan.streams] == [1.0, 1.0, 1.0]
    assert total_quality(plan) == pytest.approx(56.0)


@pytest.mark.parametrize("name", HEURISTIC_PLANS)
def test_empty_instance(name):
    plan = HEURISTIC_PLANS[name]([], build_ladder(SQRT2, 4), 0.0)
    assert plan.streams == ()


# ---------------------------------------------------------------------------
# plan structure


def test_plan_preserves_stream_identity_and_order():
    streams = make_streams([(1.0, 10.0), (4.0, 6.0), (2.0, 9.0)])
    plan = compromise(streams, build_ladder(SQRT2, 4), 20.0)
    assert [a.stream for a in plan.streams] == streams


def test_descriptor_carries_optional_times():
    stream = StreamDescriptor(
        site_id=0,
        camera_id=1,
        full_bandwidth=8.0,
        global_priority=2.0,
        priority_class="C12",
        arrival_time=1.5,
        departure_time=9.0,
    )
    plan = compromise([stream], build_ladder(SQRT2, 4), 8.0)
    assert plan.streams[0].stream.arrival_time == 1.5
    assert plan.streams[0].stream.departure_time == 9.0


def test_descriptor_rejects_nonpositive_bandwidth():
    with pytest.raises(ValueError):
        StreamDescriptor(0, 0, -1.0, 1.0, "C11")
    with pytest.raises(ValueError):
        StreamDescriptor(0, 0, 8.0, 0.0, "C11")


# ---------------------------------------------------------------------------
# ordering semantics


def test_canonical_order_priority_then_bandwidth_then_ids():
    p = np.array([2.0, 2.0, 4.0, 2.0])
    s = np.array([8.0, 9.0, 1.0, 9.0])
    site = np.array([3, 2, 0, 1])
    cam = np.array([0, 5, 0, 7])
    order = canonical_order(p, s, site, cam)
    # priority 4 first; among priority 2: bandwidth 9 before 8, site 1 before 2
    assert list(order) == [2, 3, 1, 0]


def test_equal_streams_granted_by_site_then_camera():
    # Two identical streams, budget allows exactly one full grant: the lower
    # site id wins it under the canonical descending order.
    p = np.array([1.0, 1.0])
    s = np.array([8.0, 8.0])
    site = np.array([1, 0])
    cam = np.array([0, 0])
    ladder = build_ladder(SQRT2, 4)
    order = canonical_order(p, s, site, cam)
    factors = compromise_factors(p, s, ladder.factors, 10.0, order)
    assert factors[1] == 1.0 and factors[0] == 0.25


def test_aggressive_cuts_highest_ids_first_among_equals():
    # Ascending traversal is the exact reverse of the canonical order, so the
    # higher site id is floored first when priorities and bandwidths tie.
    p = np.array([1.0, 1.0])
    s = np.array([8.0, 8.0])
    site = np.array([0, 1])
    cam = np.array([0, 0])
    ladder = build_ladder(SQRT2, 4)
    order = canonical_order(p, s, site, cam)
    factors = aggressive_factors(p, s, ladder.factors, 12.0, order)
    assert factors[0] == 1.0 and factors[1] == 0.25


def test_input_permutation_invariance(rng):
    ladder = build_ladder(SQRT2, 4)
    for _ in range(50):
        n = int(rng.integers(2, 40))
        p, s, site, cam = random_arrays(rng, n)
        # unique (site, cam) pairs so identity is unambiguous
        site = np.arange(n)
        budget = float(rng.uniform(ladder.floor, 1.0) * s.sum())
        perm = rng.permutation(n)
        for fn in HEURISTIC_FNS.values():
            base = fn(p, s, ladder.factors, budget, canonical_order(p, s, site, cam))
            shuffled = fn(
                p[perm],
                s[perm],
                ladder.factors,
                budget,
                canonical_order(p[perm], s[perm], site[perm], cam[perm]),
            )
            assert np.array_equal(shuffled, base[perm])


# ---------------------------------------------------------------------------
# heuristic-specific properties


def test_round_robin_rung_spread_at_most_one(rng):
    # The cycle discipline never lets one stream fall more than one rung
    # below any other.
    ladder = build_ladder(SQRT2, 5)
    level = {f: i for i, f in enumerate(ladder.factors)}
    for _ in range(200):
        n = int(rng.integers(2, 40))
        p, s, site, cam = random_arrays(rng, n)
        budget = float(rng.uniform(ladder.floor, 1.0) * s.sum())
        factors = round_robin_factors(p, s, ladder.factors, budget, canonical_order(p, s, site, cam))
        levels = np.array([level[f] for f in factors])
        assert levels.max() - levels.min() <= 1


def test_raising_priority_never_lowers_own_factor(rng):
    ladder = build_ladder(SQRT2, 4)
    for _ in range(300):
        n = int(rng.integers(2, 30))
        p, s, site, cam = random_arrays(rng, n)
        budget = float(rng.uniform(ladder.floor, 1.0) * s.sum())
        i = int(rng.integers(0, n))
        bumped = p.copy()
        bumped[i] += float(rng.choice([1.0, 2.0, 5.0]))
        for fn in HEURISTIC_FNS.values():
            before = fn(p, s, ladder.factors, budget, canonical_order(p, s, site, cam))
            after = fn(bumped, s, ladder.factors, budget, canonical_order(bumped, s, site, cam))
            assert after[i] >= before[i] - 1e-12


@pytest.mark.parametrize("name", HEURISTIC_FNS)
def test_budget_compliance_factors_and_completeness(name, rng):
    fn = HEURISTIC_FNS[name]
    for depth in (4, 5):
        ladder = build_ladder(SQRT2, depth)
        allowed = set(ladder.factors)
        for _ in range(250):
            n = int(rng.integers(1, 60))
            p, s, site, cam = random_arrays(rng, n)
            budget = float(rng.uniform(ladder.floor, 1.05) * s.sum())
            factors = fn(p, s, ladder.factors, budget, canonical_order(p, s, site, cam))
            assert factors.shape == (n,)
            assert set(np.unique(factors)) <= allowed
            total = float((factors * s).sum())
            assert total <= budget * (1 + 2e-9) + 2e-9


def test_heuristics_are_deterministic(rng):
    ladder = build_ladder(SQRT2, 4)
    p, s, site, cam = random_arrays(rng, 37)
    budget = 0.6 * float(s.sum())
    order = canonical_order(p, s, site, cam)
    for fn in HEURISTIC_FNS.values():
        a = fn(p, s, ladder.factors, budget, order)
        b = fn(p.copy(), s.copy(), ladder.factors, budget, order.copy())
        assert np.array_equal(a, b)


def test_compromise_grants_are_maximal(rng):
    # Cascade maximality: after the run, no stream sitting below full factor
    # can be lifted even one rung within the leftover budget.  Each stream
    # received the largest rung that fit the surplus at its turn, and the
    # surplus only shrinks afterwards.
    ladder = build_ladder(SQRT2, 4)
    rungs = ladder.factors
    for _ in range(100):
        n = int(rng.integers(2, 40))
        p, s, site, cam = random_arrays(rng, n)
        budget = float(rng.uniform(ladder.floor, 1.0) * s.sum())
        order = canonical_order(p, s, site, cam)
        factors = compromise_factors(p, s, ladder.factors, budget, order)
        slack = budget - float((factors * s).sum())
        for i in range(n):
            if factors[i] == 1.0:
                continue
            rung_index = rungs.index(factors[i])
            upgrade_cost = s[i] * (rungs[rung_index - 1] - factors[i])
            assert upgrade_cost > slack - 1e-7


def test_count_operations_positive_and_growing(rng):
    ladder = build_ladder(SQRT2, 4)
    ops = []
    for n in (50, 200, 800):
        p, s, site, cam = random_arrays(rng, n)
        ops.append(count_operations(p, s, ladder.factors, 0.5 * float(s.sum())))
    assert all(o > 0 for o in ops)
    assert ops[0] < ops[1] < ops[2]
