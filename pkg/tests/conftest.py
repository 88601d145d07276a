"""Shared helpers for building small adaptation instances."""

from __future__ import annotations

import numpy as np
import pytest

from viewsim.adapt import StreamDescriptor


def make_streams(pairs):
    """Build descriptors from (priority, bandwidth) pairs with synthetic ids."""
    return [
        StreamDescriptor(
            site_id=i,
            camera_id=0,
            full_bandwidth=float(s),
            global_priority=float(p),
            priority_class="C11",
        )
        for i, (p, s) in enumerate(pairs)
    ]


def random_arrays(rng, n, priority_pool=(1.0, 2.0, 3.0, 4.0, 9.0), bw_range=(5.0, 15.0)):
    """Random flat instance: (priorities, bandwidths, site_ids, camera_ids)."""
    p = rng.choice(priority_pool, size=n)
    s = rng.uniform(*bw_range, size=n)
    site = rng.integers(0, max(2, n // 3), size=n)
    cam = rng.integers(0, 10, size=n)
    return p, s, site, cam


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
