"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v`` (add ``-s`` to see
the lines as they happen); the summary block at the end of any pytest run
repeats them.
"""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE, CH321, CH222
from secnoma.cli import main
from secnoma.linalg import is_psd, num_angles, rotation_from_angles
from secnoma.oracle import GridSpec, grid_oracle_region, grid_oracle_wiretap, time_sharing_baseline
from secnoma.precoder import PrecoderParams, SolveOptions, build_covariance, gradient_fd, optimize_wiretap
from secnoma.rates import ChannelPair, Order, effective_channels, r2_direct, wiretap_rate
from secnoma.region import SweepConfig, convex_hull_region, max_pointwise_gap, sweep


def record(k: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[k] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {detail}")
    assert ok, detail


def random_psd(rng, n, trace):
    a = rng.normal(size=(n, n))
    q = a @ a.T
    return q * (trace / np.trace(q))


def test_c01_transformation_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(100):
        nt, n1, n2 = (int(v) for v in rng.integers(1, 5, 3))
        ch = ChannelPair(rng.uniform(0, 1, (n1, nt)), rng.uniform(0, 1, (n2, nt)))
        q1 = random_psd(rng, nt, rng.uniform(0.1, 10))
        q2 = random_psd(rng, nt, rng.uniform(0.1, 10))
        eff = effective_channels(ch, q1)
        worst = max(worst, abs(r2_direct(ch, q1, q2) - wiretap_rate(eff.H2prime, eff.H1prime, q2)))
    dt = time.perf_counter() - t0
    record(1, worst <= 1e-9 and dt < 5, f"max |direct - transformed| = {worst:.2e} over 100 instances, {dt:.2f} s")


def test_c02_scalar_closed_form():
    t0 = time.perf_counter()
    rate = optimize_wiretap([[1.0]], [[0.5]], 4.0).rate
    dt = time.perf_counter() - t0
    closed = 0.5 * math.log2(5 / 2)
    grid = grid_oracle_wiretap([[1.0]], [[0.5]], 4.0, GridSpec(power_steps=4000))
    ok = abs(rate - 0.660964) <= 1e-4 and abs(closed - 0.660964) <= 1e-6 and abs(grid - closed) <= 1e-3 and dt < 1
    record(2, ok, f"rate {rate:.6f} vs closed form {closed:.6f} (1-D grid {grid:.6f}), {dt:.3f} s")


def test_c03_oracle_sandwich():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    lo, hi = math.inf, -math.inf
    for _ in range(20):
        nb, ne = (int(v) for v in rng.integers(1, 3, 2))
        hb, he = rng.uniform(0, 1, (nb, 2)), rng.uniform(0, 1, (ne, 2))
        budget = float(rng.uniform(0.5, 5.0))
        gap = optimize_wiretap(hb, he, budget).rate - grid_oracle_wiretap(hb, he, budget)
        lo, hi = min(lo, gap), max(hi, gap)
    dt = time.perf_counter() - t0
    ok = lo >= -1e-3 and hi <= 0.02 and dt < 120
    record(3, ok, f"solver - oracle in [{lo:+.2e}, {hi:+.2e}] bits over 20 instances, {dt:.1f} s")


@pytest.mark.parametrize("P", [1.0, 10.0, 100.0])
def test_c04_region_dominance(P):
    t0 = time.perf_counter()
    res = sweep(CH222, SweepConfig(P))
    baseline = time_sharing_baseline(CH222, P)
    slack = max(res.region.distance(v) for v in baseline.hull_vertices)
    dt = time.perf_counter() - t0
    prev = ACCEPTANCE.get(4, (True, ""))
    ok = slack <= 1e-9 and dt < 120
    detail = f"{prev[1] + '; ' if prev[1] else ''}P={P:g}: slack {slack:.1e}, {dt:.1f} s"
    record(4, prev[0] and ok, detail)


def test_c05_capacity_proximity():
    t0 = time.perf_counter()
    alg = sweep(CH222, SweepConfig(1.0)).region
    oracle = grid_oracle_region(CH222, 1.0)
    a_in_o = max(oracle.distance(v) for v in alg.hull_vertices)
    o_in_a = max(alg.distance(v) for v in oracle.hull_vertices)
    dt = time.perf_counter() - t0
    ok = a_in_o <= 0.02 and o_in_a <= 0.02 and dt < 300
    record(5, ok, f"alg outside oracle by {a_in_o:.4f}, oracle outside alg by {o_in_a:.4f} bits, {dt:.1f} s")


def test_c06_order_effect():
    t0 = time.perf_counter()
    res = sweep(CH321, SweepConfig(8.0))
    p12, p21 = res.by_order(Order.ORDER12), res.by_order(Order.ORDER21)
    gap = max_pointwise_gap(p12, p21)
    h12, h21 = convex_hull_region(p12), convex_hull_region(p21)
    contains = res.region.contains_region(h12, 1e-9) and res.region.contains_region(h21, 1e-9)
    dt = time.perf_counter() - t0
    ok = gap > 0.01 and contains and dt < 120
    record(6, ok, f"max order gap {gap:.4f} bits, combined hull contains both: {contains}, {dt:.1f} s")


def test_c07_extreme_points():
    bad = []
    n = 0
    for name, ch, P in (("ch321", CH321, 8.0), ("ch222", CH222, 1.0), ("ch222", CH222, 10.0), ("ch222", CH222, 100.0)):
        for p in sweep(ch, SweepConfig(P, sigma=0.25)).points:
            n += 1
            if p.alpha == 1.0 and p.order is Order.ORDER12 and p.R2 != 0.0:
                bad.append((name, P, p))
            if p.alpha == 0.0 and p.R1 != 0.0:
                bad.append((name, P, p))
    record(7, not bad, f"{n} points checked, {len(bad)} violations")


def _prop_rotation(rng):
    n = int(rng.integers(1, 6))
    v = rotation_from_angles(n, rng.uniform(-np.pi, np.pi, num_angles(n)))
    return np.linalg.norm(v.T @ v - np.eye(n)) <= 1e-10


def _prop_covariance(rng):
    nt = int(rng.integers(1, 5))
    budget = float(rng.uniform(0.01, 100))
    lam = 0.999 * budget * rng.dirichlet(np.ones(nt + 1))[:nt]
    q = build_covariance(PrecoderParams(rng.uniform(-np.pi / 2, np.pi / 2, num_angles(nt)), lam, budget))
    return is_psd(q.Q, 1e-9) and q.trace <= budget + 1e-9


def _prop_fd(rng):
    nt = int(rng.integers(1, 5))
    hb = rng.uniform(0, 1, (int(rng.integers(1, 5)), nt))
    he = rng.uniform(0, 1, (int(rng.integers(1, 5)), nt))
    budget = float(rng.uniform(0.5, 30))
    lam = 0.95 * budget * rng.dirichlet(np.ones(nt + 1))[:nt]
    p = PrecoderParams(rng.uniform(-np.pi / 2, np.pi / 2, num_angles(nt)), lam, budget)
    g1, g2 = gradient_fd(hb, he, p, 1e-3, 1e-6), gradient_fd(hb, he, p, 1e-3, 1e-7)
    return np.max(np.abs(g1 - g2)) <= 1e-4 * max(np.max(np.abs(g1)), 1e-8)


def _prop_hull(rng):
    pts = rng.uniform(0, 5, (int(rng.integers(1, 30)), 2))
    r = convex_hull_region(pts)
    return r.is_convex(1e-9) and all(r.contains(p, 1e-9) for p in pts)


def _prop_power(rng):
    nt = int(rng.integers(1, 4))
    hb = rng.uniform(0, 1, (int(rng.integers(1, 4)), nt))
    he = rng.uniform(0, 1, (int(rng.integers(1, 4)), nt))
    P = float(rng.choice([1.0, 10.0, 30.0]))
    alphas = SweepConfig(P, sigma=0.1).alpha_grid()
    r1 = [optimize_wiretap(hb, he, a * P).rate for a in alphas]
    return bool(np.all(np.diff(r1) >= -1e-6))


def test_c08_invariant_suite():
    t0 = time.perf_counter()
    props = {"rotation": _prop_rotation, "covariance": _prop_covariance, "fd-step": _prop_fd,
             "hull": _prop_hull, "power-monotone": _prop_power}
    rng = np.random.default_rng(808)
    fails = {k: 0 for k in props}
    for name, prop in props.items():
        for _ in range(40):
            if not prop(rng):
                fails[name] += 1
    dt = time.perf_counter() - t0
    total = sum(fails.values())
    ok = total == 0 and dt < 120
    record(8, ok, f"{5 * 40} cases, failures {fails}, {dt:.1f} s")


def test_c09_determinism(tmp_path):
    src = tmp_path / "ch222.json"
    src.write_text('{"H1": [[0.783, 0.590], [0.734, 0.092]], "H2": [[0.244, 0.617], [0.947, 0.807]], "P": 10, "seed": 7}')
    outs = []
    for run in ("a", "b"):
        out = tmp_path / f"{run}.csv"
        assert main(["region", str(src), "--out", str(out)]) == 0
        outs.append((out.read_bytes(), (tmp_path / f"{run}.csv.hull.csv").read_bytes()))
    record(9, outs[0] == outs[1], f"two region runs byte-identical: {outs[0] == outs[1]} ({len(outs[0][0])} bytes)")


@pytest.mark.slow
def test_c10_bench_harness(capsys):
    t0 = time.perf_counter()
    code = main(["bench", "--nt", "3", "--n1-max", "5", "--n2-max", "5", "--power", "30", "--trials", "3"])
    out = capsys.readouterr().out
    dt = time.perf_counter() - t0
    lines = out.strip().splitlines()
    rows = [ln.split() for ln in lines[2:]]
    shaped = (
        len(lines) == 7
        and lines[1].split() == ["n1\\n2", "1", "2", "3", "4", "5"]
        and all(len(r) == 6 and r[0] == str(i + 1) for i, r in enumerate(rows))
        and all(math.isfinite(float(v)) and float(v) > 0 for r in rows for v in r[1:])
    )
    with capsys.disabled():
        print("\n" + out)
    record(10, code == 0 and shaped, f"5x5 table emitted (exit {code}), {dt:.1f} s total")
