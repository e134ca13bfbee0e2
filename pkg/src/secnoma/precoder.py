"""Rotation-parametrized covariance design for a single MIMO wiretap channel.

A covariance is written ``Q = V diag(lam) V^T`` where ``V`` is a product of
Givens rotations (one angle per index pair) and ``lam`` is the power
allocation.  The secrecy rate is maximized over (angles, lam) subject to
``lam >= 0`` and ``sum(lam) <= budget`` with a log-barrier path and BFGS
inner solves.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .linalg import as_matrix, num_angles, rotation_from_angles
from .rates import LN2, CovarianceMatrix, wiretap_rate

log = logging.getLogger(__name__)

FEAS_TOL = 1e-9


class InfeasibleParamsError(ValueError):
    """Raised when precoder parameters violate lam >= 0 or the power budget."""


def num_params(nt: int) -> int:
    return nt * (nt + 1) // 2


@dataclass(frozen=True)
class PrecoderParams:
    angles: np.ndarray
    lambdas: np.ndarray
    budget: float

    def __post_init__(self):
        lam = np.array(self.lambdas, dtype=float).reshape(-1)
        ang = np.array(self.angles, dtype=float).reshape(-1)
        nt = lam.size
        if nt < 1:
            raise ValueError("need at least one eigenvalue")
        if ang.size != num_angles(nt):
            raise ValueError(f"expected {num_angles(nt)} angles for nt={nt}, got {ang.size}")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(ang))):
            raise ValueError("parameters must be finite")
        if np.any(lam < 0):
            raise InfeasibleParamsError(f"negative power allocation {lam}")
        if lam.sum() > self.budget + FEAS_TOL:
            raise InfeasibleParamsError(f"power {lam.sum()} exceeds budget {self.budget}")
        ang.setflags(write=False)
        lam.setflags(write=False)
        object.__setattr__(self, "angles", ang)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "budget", float(self.budget))

    @property
    def nt(self) -> int:
        return self.lambdas.size

    def vector(self) -> np.ndarray:
        return np.concatenate([self.angles, self.lambdas])

    @classmethod
    def from_vector(cls, x, nt: int, budget: float) -> "PrecoderParams":
        x = np.asarray(x, dtype=float)
        k = num_angles(nt)
        return cls(x[:k], x[k:], budget)


@dataclass(frozen=True)
class SolveOptions:
    restarts: int = 5
    barrier_mu0: float = 1.0
    barrier_shrink: float = 0.1
    barrier_min_mu: float = 1e-6
    grad_tol: float = 1e-8
    max_iters: int = 500
    fd_step: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        for name in ("barrier_mu0", "barrier_min_mu", "grad_tol", "fd_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.barrier_shrink < 1:
            raise ValueError("barrier_shrink must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def barrier_schedule(self) -> list[float]:
        mus = []
        t = 0
        while True:
            mu = self.barrier_mu0 * self.barrier_shrink**t
            if mu < self.barrier_min_mu * (1 - 1e-9):
                break
            mus.append(mu)
            t += 1
        return mus


@dataclass(frozen=True)
class WiretapSolution:
    Q: CovarianceMatrix
    rate: float
    params: PrecoderParams
    converged: bool
    iterations: int
    raw_rate: float = field(default=0.0, repr=False)


def build_covariance(params: PrecoderParams) -> CovarianceMatrix:
    """Q = V diag(lam) V^T with V the Givens product of ``params.angles``."""
    v = rotation_from_angles(params.nt, params.angles)
    q = (v * params.lambdas) @ v.T
    return CovarianceMatrix(0.5 * (q + q.T), params.budget)


def _barrier_terms(lam: np.ndarray, budget: float) -> float:
    slack = budget - lam.sum()
    if np.any(lam <= 0) or slack <= 0:
        raise InfeasibleParamsError("barrier evaluated outside the strictly feasible region")
    return float(np.sum(np.log(lam)) + math.log(slack))


def barrier_objective(Hb, He, params: PrecoderParams, mu: float) -> float:
    """-(secrecy rate in bits) - mu * [sum log lam_k + log(budget - sum lam_k)].

    With ``mu == 0`` the barrier is skipped and the result is the negated
    unclamped rate.  Otherwise ``params`` must be strictly feasible.
    """
    rate = wiretap_rate(Hb, He, build_covariance(params))
    if mu == 0:
        return -rate
    return -rate - mu * _barrier_terms(params.lambdas, params.budget)


class _WiretapObjective:
    """Barrier objective bound to one channel pair and budget.

    Uses det(I + H Q H^T) = det(I + D V^T H^T H V D) with D = diag(sqrt(lam)),
    so only the nt x nt Gram matrices enter the compiled inner loop.
    """

    def __init__(self, hb: np.ndarray, he: np.ndarray, budget: float):
        self.nt = hb.shape[1]
        self.k = num_angles(self.nt)
        self.budget = float(budget)
        self.gram_b = np.ascontiguousarray(hb.T @ hb)
        self.gram_e = np.ascontiguousarray(he.T @ he)
        self.scale = 0.5 / LN2

    def value(self, x: np.ndarray, mu: float) -> float:
        return _kernels.barrier_value(
            self.gram_b, self.gram_e, x, self.nt, self.k, self.budget, float(mu), self.scale
        )

    def gradient(self, x: np.ndarray, mu: float, h: float) -> np.ndarray:
        return _kernels.barrier_gradient(
            self.gram_b, self.gram_e, x, self.nt, self.k, self.budget, float(mu), self.scale, float(h)
        )

    def max_step(self, x: np.ndarray, p: np.ndarray) -> float:
        return _kernels.max_step(x, p, self.nt, self.k, self.budget)

    def minimize(self, x0: np.ndarray, mu: float, opts: "SolveOptions"):
        """Compiled equivalent of ``bfgs_minimize(self.value, self.gradient, x0, opts, self.max_step)``."""
        x, f, converged, its = _kernels.bfgs_barrier(
            self.gram_b, self.gram_e, np.asarray(x0, dtype=float), self.nt, self.k, self.budget,
            float(mu), self.scale, float(opts.fd_step), float(opts.grad_tol), int(opts.max_iters),
        )
        return x, float(f), bool(converged), int(its)


def gradient_fd(Hb, He, params: PrecoderParams, mu: float, fd_step: float = 1e-6) -> np.ndarray:
    """Gradient of :func:`barrier_objective`, ordered like :meth:`PrecoderParams.vector`.

    The rate term is differentiated by central differences; eigenvalue
    coordinates use a step no larger than half their distance to the
    boundary of the feasible set.  The log-barrier term has the closed form
    ``-mu * (1/lam_k - 1/slack)`` and is added exactly, since its curvature
    near the boundary swamps any fixed difference step.
    """
    hb, he = as_matrix(Hb, "Hb"), as_matrix(He, "He")
    obj = _WiretapObjective(hb, he, params.budget)
    if mu != 0:
        _barrier_terms(params.lambdas, params.budget)
    return obj.gradient(params.vector(), mu, fd_step)


def bfgs_minimize(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    x0,
    opts: SolveOptions = SolveOptions(),
    max_step: Callable[[np.ndarray, np.ndarray], float] | None = None,
) -> tuple[np.ndarray, float, bool, int]:
    """BFGS with an inverse-Hessian update and Armijo backtracking.

    ``objective`` may return ``inf`` outside its domain; backtracking then
    shrinks the step.  If ``max_step(x, p)`` is given, the first trial step
    is capped just inside the domain boundary along ``p``.  Returns
    ``(x, f, converged, iterations)``; a failed line search stops early with
    ``converged=False``.
    """
    c1, shrink, max_backtracks = 1e-4, 0.5, 60
    x = np.array(x0, dtype=float).reshape(-1)
    f = float(objective(x))
    if not math.isfinite(f):
        raise ValueError("objective is not finite at the starting point")
    g = np.asarray(gradient(x), dtype=float)
    n = x.size
    hinv = np.eye(n)
    first = True
    it = 0
    while it < opts.max_iters:
        if np.max(np.abs(g)) <= opts.grad_tol:
            return x, f, True, it
        p = -hinv @ g
        slope = float(g @ p)
        if slope >= 0:
            # lost descent; fall back to steepest descent
            hinv = np.eye(n)
            p = -g
            slope = -float(g @ g)
        step = 1.0
        if max_step is not None:
            step = min(1.0, 0.99 * max_step(x, p))
        for _ in range(max_backtracks):
            x_new = x + step * p
            if np.array_equal(x_new, x):
                return x, f, False, it
            f_new = float(objective(x_new))
            # strict decrease: once f is flat to rounding, Armijo alone would accept null steps
            if f_new <= f + c1 * step * slope and f_new < f:
                break
            step *= shrink
        else:
            return x, f, False, it
        g_new = np.asarray(gradient(x_new), dtype=float)
        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12 * math.sqrt(float(s @ s) * float(y @ y)):
            if first:
                hinv = np.eye(n) * (sy / float(y @ y))
                first = False
            rho = 1.0 / sy
            hy = hinv @ y
            hinv = (
                hinv
                - rho * (np.outer(s, hy) + np.outer(hy, s))
                + (rho * rho * float(y @ hy) + rho) * np.outer(s, s)
            )
        x, f, g = x_new, f_new, g_new
        it += 1
    return x, f, bool(np.max(np.abs(g)) <= opts.grad_tol), it


def _initial_points(nt: int, budget: float, opts: SolveOptions) -> list[np.ndarray]:
    k = num_angles(nt)
    starts = [np.concatenate([np.zeros(k), np.full(nt, 0.9 * budget / nt)])]
    rng = np.random.default_rng(opts.seed)
    for _ in range(opts.restarts - 1):
        ang = rng.uniform(-np.pi / 2, np.pi / 2, size=k)
        lam = 0.95 * budget * rng.dirichlet(np.ones(nt + 1))[:nt]
        starts.append(np.concatenate([ang, lam]))
    return starts


def optimize_wiretap(Hb, He, budget: float, opts: SolveOptions = SolveOptions()) -> WiretapSolution:
    """Maximize the secrecy rate of the wiretap channel (Hb, He) under ``tr(Q) <= budget``.

    Every restart follows the barrier path mu0, mu0*shrink, ... down to
    ``barrier_min_mu``, warm-starting each BFGS solve from the previous one.
    The restart with the largest clamped rate wins (earliest on ties).
    """
    hb, he = as_matrix(Hb, "Hb"), as_matrix(He, "He")
    if hb.shape[1] != he.shape[1]:
        raise ValueError(f"Hb and He column counts differ: {hb.shape} vs {he.shape}")
    if budget < 0:
        raise ValueError("budget must be non-negative")
    nt = hb.shape[1]
    if budget == 0:
        params = PrecoderParams(np.zeros(num_angles(nt)), np.zeros(nt), 0.0)
        return WiretapSolution(CovarianceMatrix.zeros(nt, 0.0), 0.0, params, True, 0)

    obj = _WiretapObjective(hb, he, float(budget))
    schedule = opts.barrier_schedule()
    best = None
    for x in _initial_points(nt, float(budget), opts):
        iterations = 0
        converged = False
        for mu in schedule:
            x, _, converged, its = obj.minimize(x, mu, opts)
            iterations += its
        params = PrecoderParams.from_vector(x, nt, budget)
        cov = build_covariance(params)
        raw = wiretap_rate(hb, he, cov)
        rate = max(0.0, raw)
        if best is None or rate > best.rate:
            best = WiretapSolution(cov, rate, params, converged, iterations, raw)
    log.debug("optimize_wiretap budget=%g rate=%.6f iterations=%d", budget, best.rate, best.iterations)
    return best
