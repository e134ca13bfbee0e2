import math

import numpy as np
import pytest

from conftest import CH222
from secnoma.oracle import (
    GridGuardError,
    GridSpec,
    _candidates,
    grid_oracle_region,
    grid_oracle_wiretap,
    time_sharing_baseline,
)
from secnoma.precoder import SolveOptions, optimize_wiretap
from secnoma.rates import ChannelPair, rate_pair, wiretap_rate
from secnoma.region import SweepConfig, sweep

FAST = SolveOptions(restarts=2)


def test_grid_spec():
    g = GridSpec()
    a = g.angles()
    assert a.size == 12 and a[0] == -math.pi / 2 and a[-1] == math.pi / 2
    assert g.simplex(2).shape == (91, 2)
    assert g.size(2) == 12 * 91
    assert np.all(GridSpec(power_steps=3).simplex(3).sum(axis=1) <= 3)
    with pytest.raises(ValueError):
        GridSpec(angle_steps=0)


def test_wiretap_guards():
    with pytest.raises(GridGuardError):
        grid_oracle_wiretap(np.ones((2, 3)), np.ones((2, 3)), 1.0)
    with pytest.raises(GridGuardError):
        grid_oracle_wiretap(np.ones((2, 2)), np.ones((2, 2)), 1.0, GridSpec(angle_steps=10**4, power_steps=10**3))
    with pytest.raises(ValueError):
        grid_oracle_wiretap(np.ones((2, 2)), np.ones((2, 1)), 1.0)


def test_wiretap_examples():
    assert grid_oracle_wiretap(CH222.H1, CH222.H2, 0.0) == 0.0
    r = grid_oracle_wiretap([[1.0]], [[0.5]], 4.0, GridSpec(power_steps=4000))
    assert r == pytest.approx(0.5 * math.log2(2.5), abs=1e-3)
    # no eavesdropper at nt=1: all power on the single mode
    r = grid_oracle_wiretap([[0.7]], [[0.0]], 3.0)
    assert r == pytest.approx(0.5 * math.log2(1 + 0.49 * 3.0), abs=1e-12)


def test_wiretap_is_lower_bound_of_rates(rng):
    # Q = 1.5 I is on the grid (equal split, any angle), so the grid best is at least its rate
    hb, he = rng.uniform(0, 1, (2, 2)), rng.uniform(0, 1, (2, 2))
    g = grid_oracle_wiretap(hb, he, 3.0)
    assert g >= max(0.0, wiretap_rate(hb, he, np.eye(2) * 1.5)) - 1e-12
    assert optimize_wiretap(hb, he, 3.0, FAST).rate >= g - 1e-3


def test_region_degenerate():
    assert grid_oracle_region(CH222, 0.0).hull_vertices == ((0.0, 0.0),)
    h = np.array([[0.3, 0.9], [0.5, 0.1]])
    assert grid_oracle_region(ChannelPair(h, h), 2.0).hull_vertices == ((0.0, 0.0),)
    with pytest.raises(GridGuardError):
        grid_oracle_region(ChannelPair(np.ones((1, 3)), np.ones((1, 3))), 1.0)
    with pytest.raises(GridGuardError):
        grid_oracle_region(CH222, 1.0, GridSpec(angle_steps=40, power_steps=40))


def test_region_points_are_achievable():
    # every oracle vertex must be reachable by some grid pair, check via rate_pair
    grid = GridSpec(angle_steps=5, power_steps=4)
    region = grid_oracle_region(CH222, 2.0, grid)
    assert region.is_convex()
    q, level = _candidates(2, 2.0, grid)
    pts = set()
    for i in range(len(q)):
        for j in range(len(q)):
            if level[i] + level[j] <= grid.power_steps:
                pts.add(rate_pair(CH222, q[i], q[j]).rates)
    for v in region.hull_vertices[1:]:
        if v[0] > 0 and v[1] > 0:
            assert any(abs(v[0] - a) < 1e-9 and abs(v[1] - b) < 1e-9 for a, b in pts)


def test_region_mutual_near_containment_p1():
    oracle = grid_oracle_region(CH222, 1.0)
    alg = sweep(CH222, SweepConfig(1.0, solve_opts=FAST)).region
    assert oracle.contains_region(alg, 0.02)
    assert alg.contains_region(oracle, 0.02)


def test_time_sharing_baseline():
    assert time_sharing_baseline(CH222, 0.0).hull_vertices == ((0.0, 0.0),)
    h = np.array([[0.3, 0.9], [0.5, 0.1]])
    assert time_sharing_baseline(ChannelPair(h, h), 3.0).hull_vertices == ((0.0, 0.0),)
    ts = time_sharing_baseline(CH222, 10.0, FAST)
    assert len(ts.hull_vertices) == 3
    assert sweep(CH222, SweepConfig(10.0, solve_opts=FAST)).region.contains_region(ts, 1e-9)
    with pytest.raises(ValueError):
        time_sharing_baseline(CH222, -1.0)
