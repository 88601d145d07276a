"""Virtual room generation and evolution.

Covers everything that happens before prioritization: placing participants
in a circular room (uniformly or in conversational pairs), clustering their
positions with a small EM fit, pointing them at something sensible, and
walking them around tick by tick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .priority import CameraMount, Participant, ViewerState, wrap_angle

__all__ = [
    "Room",
    "MobilityConfig",
    "GmmState",
    "place_uniform",
    "place_pairs",
    "gmm_fit",
    "apply_facing",
    "step_mobility",
    "make_room",
    "FACING_POLICIES",
    "PLACEMENTS",
]

FACING_POLICIES = ("centroid", "at_least_one", "random")
PLACEMENTS = ("uniform", "pairs")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class Room:
    """Immutable snapshot of the simulated space."""

    diameter: float
    participants: tuple[Participant, ...]
    viewer: ViewerState
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.diameter <= 0:
            raise ValueError("diameter must be positive")
        r = self.diameter / 2.0
        for p in self.participants:
            if math.hypot(p.x, p.y) > r + 1e-9:
                raise ValueError(f"participant {p.id} outside the room boundary")

    @property
    def radius(self) -> float:
        return self.diameter / 2.0


@dataclass(frozen=True)
class MobilityConfig:
    """Random-walk settings: how often to stay, walk, or turn each tick."""

    mode_probabilities: tuple[float, float, float] = (0.3, 0.5, 0.2)
    step_length: float = 0.15  # meters per walk tick
    turn_step: float = math.pi / 12  # radians per turn tick
    tick: float = 0.1  # seconds

    def __post_init__(self) -> None:
        probs = self.mode_probabilities
        if len(probs) != 3 or any(q < 0 for q in probs):
            raise ValueError("mode_probabilities must be three nonnegative values")
        if abs(sum(probs) - 1.0) > 1e-9:
            raise ValueError("mode_probabilities must sum to 1")
        if self.step_length < 0 or self.turn_step < 0 or self.tick <= 0:
            raise ValueError("step_length/turn_step must be >= 0 and tick > 0")


@dataclass(frozen=True)
class GmmState:
    """Result of the means-only EM fit (unit isotropic components)."""

    k: int
    means: np.ndarray  # (k, 2)
    responsibilities: np.ndarray  # (n, k), rows sum to 1
    log_likelihoods: tuple[float, ...]  # one entry per EM iteration
    n_iters: int
    converged: bool


# ---------------------------------------------------------------------------
# placement


def place_uniform(n: int, diameter: float, seed) -> np.ndarray:
    """n positions i.i.d. uniform over the room disk."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = _rng(seed)
    radius = diameter / 2.0
    r = radius * np.sqrt(rng.random(n))
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.column_stack((r * np.cos(phi), r * np.sin(phi)))


def place_pairs(n: int, pair_distance: float, diameter: float, seed) -> np.ndarray:
    """n/2 uniformly placed anchors, each with a partner pair_distance away.

    Partners landing outside the room are pulled radially back to the wall.
    """
    if n % 2:
        raise ValueError("pair placement needs an even participant count")
    rng = _rng(seed)
    radius = diameter / 2.0
    anchors = place_uniform(n // 2, diameter, rng)
    bearings = rng.uniform(0.0, 2.0 * math.pi, n // 2)
    partners = anchors + pair_distance * np.column_stack(
        (np.cos(bearings), np.sin(bearings))
    )
    dist = np.hypot(partners[:, 0], partners[:, 1])
    outside = dist > radius
    if outside.any():
        partners[outside] *= (radius / dist[outside])[:, None]
    out = np.empty((n, 2))
    out[0::2] = anchors
    out[1::2] = partners
    return out


# ---------------------------------------------------------------------------
# clustering


def _log_likelihood(positions: np.ndarray, means: np.ndarray) -> tuple[float, np.ndarray]:
    """Mixture log-likelihood and responsibilities for unit-variance components."""
    k = means.shape[0]
    d2 = ((positions[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
    log_comp = -0.5 * d2 - math.log(2.0 * math.pi) - math.log(k)
    row_max = log_comp.max(axis=1, keepdims=True)
    log_norm = row_max[:, 0] + np.log(np.exp(log_comp - row_max).sum(axis=1))
    resp = np.exp(log_comp - log_norm[:, None])
    return float(log_norm.sum()), resp


def gmm_fit(
    positions: np.ndarray,
    k: int,
    seed,
    epsilon: float = 1e-4,
    max_iters: int = 200,
) -> GmmState:
    """Means-only EM: soft-assign points, move each mean to its weighted average.

    Components keep unit isotropic variance and equal weights; iteration
    stops once no mean moves more than ``epsilon`` (or at ``max_iters``).
    Means are seeded from k distinct participant positions.
    """
    positions = np.asarray(positions, dtype=float)
    if positions.ndim != 2 or positions.shape[1] != 2:
        raise ValueError("positions must be an (n, 2) array")
    n = positions.shape[0]
    if not (1 <= k <= n):
        raise ValueError(f"need 1 <= k <= {n} positions, got k={k}")
    unique = np.unique(positions, axis=0)
    if unique.shape[0] < k:
        raise ValueError(f"need at least {k} distinct positions to seed {k} clusters")
    rng = _rng(seed)
    means = unique[rng.choice(unique.shape[0], size=k, replace=False)].copy()

    lls: list[float] = []
    converged = False
    iters = 0
    resp = np.full((n, k), 1.0 / k)
    for iters in range(1, max_iters + 1):
        ll, resp = _log_likelihood(positions, means)
        lls.append(ll)
        weights = resp.sum(axis=0)
        new_means = means.copy()
        moved = weights > 1e-12  # starved components stay put
        new_means[moved] = (resp.T @ positions)[moved] / weights[moved, None]
        shift = np.hypot(*(new_means - means).T).max()
        means = new_means
        if shift < epsilon:
            converged = True
            break
    return GmmState(
        k=k,
        means=means,
        responsibilities=resp,
        log_likelihoods=tuple(lls),
        n_iters=iters,
        converged=converged,
    )


# ---------------------------------------------------------------------------
# facing


def apply_facing(
    participants: Sequence[Participant],
    viewer: ViewerState,
    policy: str,
    seed,
) -> list[Participant]:
    """Reorient every participant according to the chosen policy.

    centroid      -- face the centroid of the *other* participants
    at_least_one  -- face the nearest other participant
    random        -- i.i.d. uniform headings

    A lone participant keeps its heading under the two geometric policies.
    """
    if policy not in FACING_POLICIES:
        raise ValueError(f"unknown facing policy {policy!r}; expected one of {FACING_POLICIES}")
    parts = list(participants)
    n = len(parts)
    if n == 0:
        return []
    rng = _rng(seed)
    if policy == "random":
        headings = rng.uniform(0.0, 2.0 * math.pi, n)
        return [replace(p, heading=wrap_angle(float(h))) for p, h in zip(parts, headings)]
    if n == 1:
        return parts

    xs = np.array([p.x for p in parts])
    ys = np.array([p.y for p in parts])
    out = []
    for i, p in enumerate(parts):
        if policy == "centroid":
            tx = (xs.sum() - xs[i]) / (n - 1)
            ty = (ys.sum() - ys[i]) / (n - 1)
        else:  # at_least_one: nearest other participant
            d2 = (xs - xs[i]) ** 2 + (ys - ys[i]) ** 2
            d2[i] = np.inf
            j = int(np.argmin(d2))
            tx, ty = xs[j], ys[j]
        dx, dy = tx - p.x, ty - p.y
        if math.hypot(dx, dy) < 1e-12:
            out.append(p)  # target coincides with own position
        else:
            out.append(replace(p, heading=math.atan2(dy, dx)))
    return out


# ---------------------------------------------------------------------------
# mobility


def _reflect(x: float, y: float, heading: float, radius: float) -> tuple[float, float, float]:
    """Fold a position that crossed the wall back inside, bouncing the heading."""
    d = math.hypot(x, y)
    if d <= radius:
        return x, y, heading
    phi = math.atan2(y, x)
    # triangle-wave fold of the radial overshoot (robust to huge steps)
    while d > radius:
        d = 2.0 * radius - d
        if d < 0.0:
            d = -d
    return d * math.cos(phi), d * math.sin(phi), wrap_angle(2.0 * phi + math.pi - heading)


def step_mobility(
    room: Room,
    config: MobilityConfig,
    steps: int,
    rng: np.random.Generator | None = None,
) -> Room:
    """Advance every participant `steps` ticks of stay/walk/turn motion.

    Each tick independently picks a mode per participant; walking advances
    along the heading and reflects off the circular wall, turning rotates by
    +-turn_step.  Passing an explicit generator lets callers continue one
    random stream across successive calls; by default the room's own seed is
    used, making a single call fully deterministic.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if rng is None:
        rng = np.random.default_rng(room.rng_seed)
    parts = list(room.participants)
    n = len(parts)
    if n == 0 or steps == 0:
        return room
    p_stay, p_walk, _ = config.mode_probabilities
    radius = room.radius
    xs = np.array([p.x for p in parts])
    ys = np.array([p.y for p in parts])
    hs = np.array([p.heading for p in parts])
    for _ in range(steps):
        u = rng.random(n)
        signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        walk = (u >= p_stay) & (u < p_stay + p_walk)
        turn = u >= p_stay + p_walk
        hs[turn] = hs[turn] + signs[turn] * config.turn_step
        for i in np.flatnonzero(walk):
            x = xs[i] + config.step_length * math.cos(hs[i])
            y = ys[i] + config.step_length * math.sin(hs[i])
            xs[i], ys[i], hs[i] = _reflect(x, y, hs[i], radius)
    new_parts = []
    for i, p in enumerate(parts):
        x, y, h = float(xs[i]), float(ys[i]), float(hs[i])
        if not -math.pi < h <= math.pi:
            h = wrap_angle(h)
        if (x, y, h) == (p.x, p.y, p.heading):
            new_parts.append(p)  # untouched: keep bit-exact state
        else:
            new_parts.append(replace(p, x=x, y=y, heading=h))
    return replace(room, participants=tuple(new_parts))


# ---------------------------------------------------------------------------
# scene assembly


def make_room(
    n_sites: int,
    cameras_per_site: int,
    diameter: float,
    viewer: ViewerState,
    rng: np.random.Generator,
    *,
    placement: str = "uniform",
    pair_distance: float = 1.0,
    facing: str = "centroid",
    bandwidth_range: tuple[float, float] = (5.0, 15.0),
    rng_seed: int = 0,
) -> Room:
    """Build a populated room: positions, camera rings, bitrates, headings."""
    if placement not in PLACEMENTS:
        raise ValueError(f"unknown placement {placement!r}; expected one of {PLACEMENTS}")
    lo, hi = bandwidth_range
    if not (0 < lo <= hi):
        raise ValueError("bandwidth_range must satisfy 0 < low <= high")
    if placement == "uniform":
        positions = place_uniform(n_sites, diameter, rng)
    else:
        positions = place_pairs(n_sites, pair_distance, diameter, rng)
    # keep everyone strictly away from the viewer so directions stay defined
    for _ in range(100):
        close = np.hypot(positions[:, 0] - viewer.x, positions[:, 1] - viewer.y) < 1e-6
        if not close.any():
            break
        positions[close] = place_uniform(int(close.sum()), diameter, rng)
    headings = rng.uniform(0.0, 2.0 * math.pi, n_sites)
    ring = [2.0 * math.pi * j / cameras_per_site for j in range(cameras_per_site)]
    parts = []
    for i in range(n_sites):
        bws = rng.uniform(lo, hi, cameras_per_site)
        cams = tuple(
            CameraMount(camera_id=j, ring_angle=ring[j], full_bandwidth=float(bws[j]))
            for j in range(cameras_per_site)
        )
        parts.append(
            Participant(
                id=i,
                x=float(positions[i, 0]),
                y=float(positions[i, 1]),
                heading=float(headings[i]),
                cameras=cams,
            )
        )
    parts = apply_facing(parts, viewer, facing, rng)
    return Room(diameter=diameter, participants=tuple(parts), viewer=viewer, rng_seed=rng_seed)
