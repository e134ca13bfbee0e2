"""Brute-force reference surfaces for checking the optimizer.

The grid covers covariances in the same (angles, eigenvalues) coordinates the
optimizer uses: each angle takes ``angle_steps`` values spread evenly over [-pi/2, pi/2] (both ends) and
the eigenvalues run over the scaled simplex ``budget * m / power_steps`` with
``m`` a non-negative integer vector, ``sum(m) <= power_steps``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, num_angles, rotation_batch
from .precoder import SolveOptions, optimize_wiretap
from .rates import LN2, ChannelPair
from .region import RateRegion, convex_hull_region


class GridGuardError(ValueError):
    """The requested grid is too large or the dimension is not supported."""


@dataclass(frozen=True)
class GridSpec:
    angle_steps: int = 12
    power_steps: int = 12
    max_dim: int = 2
    max_points: int = 10**7

    def __post_init__(self):
        if self.angle_steps < 1 or self.power_steps < 1:
            raise ValueError("grid step counts must be positive")

    def angles(self) -> np.ndarray:
        return np.linspace(-np.pi / 2, np.pi / 2, self.angle_steps)

    def simplex(self, nt: int) -> np.ndarray:
        """Integer compositions ``m`` (rows) with ``sum(m) <= power_steps``."""
        rows = [m for m in itertools.product(range(self.power_steps + 1), repeat=nt) if sum(m) <= self.power_steps]
        return np.array(rows, dtype=float).reshape(-1, nt)

    def size(self, nt: int) -> int:
        from math import comb

        return self.angle_steps ** num_angles(nt) * comb(self.power_steps + nt, nt)


def _check_dim(nt: int, grid: GridSpec) -> None:
    if nt > grid.max_dim:
        raise GridGuardError(f"grid oracle refuses nt={nt} > max_dim={grid.max_dim}")


def _candidates(nt: int, budget: float, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """All grid covariances as an (N, nt, nt) stack plus their simplex levels."""
    k = num_angles(nt)
    combos = list(itertools.product(grid.angles(), repeat=k))
    ang = np.array(combos, dtype=float).reshape(len(combos), k)
    simplex = grid.simplex(nt)
    v = rotation_batch(nt, ang)  # (A, nt, nt)
    lam = budget * simplex / grid.power_steps  # (S, nt)
    q = np.einsum("aij,sj,akj->asik", v, lam, v).reshape(-1, nt, nt)
    level = np.broadcast_to(simplex.sum(axis=1).astype(int), (v.shape[0], simplex.shape[0])).reshape(-1)
    return q, level


def _logdet_i_plus(h: np.ndarray, q: np.ndarray) -> np.ndarray:
    """ln det(I + H Q H^T) for a stack of Q."""
    m = np.eye(h.shape[0]) + np.einsum("ij,njk,lk->nil", h, q, h)
    _, ld = np.linalg.slogdet(m)
    return ld


def grid_oracle_wiretap(Hb, He, budget: float, grid: GridSpec = GridSpec()) -> float:
    """Best clamped secrecy rate (bits) over the covariance grid."""
    hb, he = as_matrix(Hb, "Hb"), as_matrix(He, "He")
    nt = hb.shape[1]
    if he.shape[1] != nt:
        raise ValueError("Hb and He column counts differ")
    _check_dim(nt, grid)
    if grid.size(nt) > grid.max_points:
        raise GridGuardError(f"grid has {grid.size(nt)} points, cap is {grid.max_points}")
    if budget <= 0:
        return 0.0
    q, _ = _candidates(nt, float(budget), grid)
    rates = 0.5 * (_logdet_i_plus(hb, q) - _logdet_i_plus(he, q)) / LN2
    return max(0.0, float(rates.max()))


def grid_oracle_region(channels: ChannelPair, P: float, grid: GridSpec = GridSpec(), chunk: int = 200_000) -> RateRegion:
    """Hull of clamped (R1, R2) over all grid pairs with tr(Q1) + tr(Q2) <= P.

    Rates follow the order12 functionals: user 2 treats Q1 as noise.
    """
    nt = channels.nt
    _check_dim(nt, grid)
    if P <= 0:
        return convex_hull_region([(0.0, 0.0)])
    q, level = _candidates(nt, float(P), grid)
    # a pair is feasible when the simplex levels add up to at most power_steps
    counts = np.bincount(level, minlength=grid.power_steps + 1)
    cum = np.cumsum(counts)
    n_pairs = int(sum(counts[s] * cum[grid.power_steps - s] for s in range(grid.power_steps + 1)))
    if n_pairs > grid.max_points:
        raise GridGuardError(f"joint grid has {n_pairs} pairs, cap is {grid.max_points}")

    h1, h2 = channels.H1, channels.H2
    ld1_q, ld2_q = _logdet_i_plus(h1, q), _logdet_i_plus(h2, q)
    r1 = np.maximum(0.0, 0.5 * (ld1_q - ld2_q) / LN2)
    order = np.argsort(level, kind="stable")
    q_sorted, lvl_sorted = q[order], level[order]

    best: list[tuple[float, float]] = []
    for i in range(q.shape[0]):
        allowed = int(np.searchsorted(lvl_sorted, grid.power_steps - level[i], side="right"))
        for start in range(0, allowed, chunk):
            q2 = q_sorted[start : min(allowed, start + chunk)]
            qs = q[i] + q2
            legit = _logdet_i_plus(h2, qs) - ld2_q[i]
            leak = _logdet_i_plus(h1, qs) - ld1_q[i]
            r2 = np.maximum(0.0, 0.5 * (legit - leak) / LN2)
            # for a fixed Q1 only the largest R2 can reach the hull
            best.append((float(r1[i]), float(r2.max())))
    return convex_hull_region(best)


def time_sharing_baseline(channels: ChannelPair, P: float, opts: SolveOptions = SolveOptions()) -> RateRegion:
    """Region reached by time sharing the two single-user wiretap extremes."""
    if P < 0:
        raise ValueError("P must be non-negative")
    r1 = optimize_wiretap(channels.H1, channels.H2, P, opts).rate
    r2 = optimize_wiretap(channels.H2, channels.H1, P, opts).rate
    return convex_hull_region([(r1, 0.0), (0.0, r2)])
