"""Power-splitting sweep over alpha and the convex-hull secrecy rate region."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence


from .precoder import SolveOptions, optimize_wiretap
from .rates import ChannelPair, CovarianceMatrix, Order, RatePoint, effective_channels

log = logging.getLogger(__name__)

DEDUP_TOL = 1e-12
COLLINEAR_TOL = 1e-12

Point = tuple[float, float]


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L2 = dx * dx + dy * dy
    t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2))
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


@dataclass(frozen=True)
class RateRegion:
    """Convex rate region given by its boundary vertices.

    ``hull_vertices`` starts at the origin, climbs to ``(0, max R2)``, follows
    the Pareto boundary and ends at ``(max R1, 0)``: ascending in R1 and a
    clockwise walk around the polygon.
    """

    hull_vertices: tuple[Point, ...]

    @property
    def pareto(self) -> tuple[Point, ...]:
        """Boundary chain from (0, max R2) to (max R1, 0)."""
        if len(self.hull_vertices) == 1:
            return self.hull_vertices
        return self.hull_vertices[1:]

    @property
    def max_r1(self) -> float:
        return max(v[0] for v in self.hull_vertices)

    @property
    def max_r2(self) -> float:
        return max(v[1] for v in self.hull_vertices)

    def area(self) -> float:
        v = self.hull_vertices
        return 0.5 * abs(sum(v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1] for i in range(len(v))))

    def is_convex(self, tol: float = COLLINEAR_TOL) -> bool:
        v = self.hull_vertices
        if len(v) < 3:
            return True
        return all(_cross(v[i], v[(i + 1) % len(v)], v[(i + 2) % len(v)]) <= tol for i in range(len(v)))

    def distance(self, p: Point) -> float:
        """Euclidean distance from ``p`` to the region (0 inside)."""
        v = self.hull_vertices
        if len(v) == 1:
            return math.hypot(p[0] - v[0][0], p[1] - v[0][1])
        edges = list(zip(v, v[1:] + v[:1]))
        if len(v) >= 3 and all(_cross(a, b, p) <= 0 for a, b in edges):
            return 0.0
        return min(_segment_distance(p, a, b) for a, b in edges)

    def contains(self, p, tol: float = 1e-9) -> bool:
        if isinstance(p, RatePoint):
            p = p.rates
        return self.distance((float(p[0]), float(p[1]))) <= tol

    def contains_region(self, other: "RateRegion", tol: float = 1e-9) -> bool:
        # both are convex, so vertex containment is enough
        return all(self.contains(v, tol) for v in other.hull_vertices)


def convex_hull_region(points: Iterable) -> RateRegion:
    """Convex hull of rate points together with the axis anchors.

    Accepts :class:`RatePoint` objects or ``(R1, R2)`` pairs.  The origin,
    ``(max R1, 0)`` and ``(0, max R2)`` are always added since time sharing
    with a silent user is achievable.
    """
    pts: list[Point] = []
    for p in points:
        r = p.rates if isinstance(p, RatePoint) else (float(p[0]), float(p[1]))
        if not (r[0] >= 0 and r[1] >= 0) or not all(map(math.isfinite, r)):
            raise ValueError(f"rate points must be finite and non-negative, got {r}")
        pts.append((r[0] + 0.0, r[1] + 0.0))
    if not pts:
        return RateRegion(((0.0, 0.0),))
    m1 = max(p[0] for p in pts)
    m2 = max(p[1] for p in pts)
    pts.extend([(0.0, 0.0), (m1, 0.0), (0.0, m2)])

    uniq: list[Point] = []
    for p in sorted(pts):
        if uniq and abs(p[0] - uniq[-1][0]) <= DEDUP_TOL and abs(p[1] - uniq[-1][1]) <= DEDUP_TOL:
            continue
        uniq.append(p)
    if len(uniq) == 1:
        return RateRegion((uniq[0],))

    # Andrew's monotone chain, counter-clockwise, collinear points dropped
    lower: list[Point] = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= COLLINEAR_TOL:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(uniq):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= COLLINEAR_TOL:
            upper.pop()
        upper.append(p)
    ccw = lower[:-1] + upper[:-1]
    # ccw starts at the lowest-leftmost point, the origin; walk it clockwise
    start = ccw.index(min(ccw))
    ccw = ccw[start:] + ccw[:start]
    return RateRegion(tuple([ccw[0]] + ccw[:0:-1]))


@dataclass(frozen=True)
class SweepConfig:
    P: float
    sigma: float = 0.05
    orders: tuple[Order, ...] = (Order.ORDER12, Order.ORDER21)
    solve_opts: SolveOptions = field(default_factory=SolveOptions)

    def __post_init__(self):
        if not 0 < self.sigma <= 1:
            raise ValueError(f"sigma must lie in (0, 1], got {self.sigma}")
        if not self.P >= 0:
            raise ValueError(f"P must be non-negative, got {self.P}")
        orders = tuple(dict.fromkeys(Order.parse(o) for o in self.orders))
        if not orders:
            raise ValueError("at least one precoding order is required")
        object.__setattr__(self, "orders", tuple(sorted(orders, key=lambda o: o.value)))

    def alpha_grid(self) -> list[float]:
        """0, sigma, 2 sigma, ... with 1 always appended."""
        alphas = []
        k = 0
        while k * self.sigma < 1 - 1e-12:
            alphas.append(round(k * self.sigma, 12))
            k += 1
        alphas.append(1.0)
        return alphas


@dataclass(frozen=True)
class SweepResult:
    points: tuple[RatePoint, ...]
    covariances: tuple[tuple[CovarianceMatrix, CovarianceMatrix], ...]  # (Q1, Q2) per point
    region: RateRegion

    def by_order(self, order) -> list[RatePoint]:
        order = Order.parse(order)
        return [p for p in self.points if p.order is order]


def _cascade(h_first, h_second, p_first, p_second, opts):
    """Design the first user's covariance, whiten, then design the second's."""
    channels = ChannelPair(h_first, h_second)
    sol1 = optimize_wiretap(h_first, h_second, p_first, opts)
    eff = effective_channels(channels, sol1.Q)
    sol2 = optimize_wiretap(eff.H2prime, eff.H1prime, p_second, opts)
    return sol1, sol2


def _check_alpha(alpha: float) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return float(alpha)


def solve_order12(channels: ChannelPair, P: float, alpha: float, opts: SolveOptions = SolveOptions()):
    """User 1 first with budget alpha*P, then user 2 with (1-alpha)*P.

    Returns ``(RatePoint, Q1, Q2)``.
    """
    alpha = _check_alpha(alpha)
    s1, s2 = _cascade(channels.H1, channels.H2, alpha * P, (1 - alpha) * P, opts)
    return RatePoint(s1.rate, s2.rate, alpha, Order.ORDER12), s1.Q, s2.Q


def solve_order21(channels: ChannelPair, P: float, alpha: float, opts: SolveOptions = SolveOptions()):
    """User 2 first with budget (1-alpha)*P, then user 1 with alpha*P.

    ``alpha`` stays user 1's share.  Returns ``(RatePoint, Q2, Q1)``, the
    covariances in the order they were designed.
    """
    alpha = _check_alpha(alpha)
    s2, s1 = _cascade(channels.H2, channels.H1, (1 - alpha) * P, alpha * P, opts)
    return RatePoint(s1.rate, s2.rate, alpha, Order.ORDER21), s2.Q, s1.Q


def _solve_point(args):
    channels, P, alpha, order, opts = args
    if order is Order.ORDER12:
        point, q1, q2 = solve_order12(channels, P, alpha, opts)
    else:
        point, q2, q1 = solve_order21(channels, P, alpha, opts)
    return point, (q1, q2)


def sweep(channels: ChannelPair, config: SweepConfig, max_workers: int | None = None) -> SweepResult:
    """Solve every (alpha, order) pair and hull the resulting rate points.

    Points are ordered by alpha, with order12 before order21 at equal alpha.
    ``max_workers > 1`` distributes the solves over processes; the output is
    the same either way.
    """
    tasks = [(channels, config.P, a, o, config.solve_opts) for a in config.alpha_grid() for o in config.orders]
    if max_workers and max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_solve_point, tasks))
    else:
        results = [_solve_point(t) for t in tasks]
    points = tuple(r[0] for r in results)
    log.debug("sweep P=%g: %d points", config.P, len(points))
    return SweepResult(points, tuple(r[1] for r in results), convex_hull_region(points))


def max_pointwise_gap(a: Sequence[RatePoint], b: Sequence[RatePoint]) -> float:
    """Largest coordinate difference between two point lists matched by alpha."""
    lookup = {p.alpha: p for p in b}
    gaps = [max(abs(p.R1 - lookup[p.alpha].R1), abs(p.R2 - lookup[p.alpha].R2)) for p in a if p.alpha in lookup]
    return max(gaps, default=0.0)
