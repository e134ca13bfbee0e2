"""Compiled inner loops for the wiretap objective.

Parameter vectors are laid out as ``[angles..., lambdas...]`` with the angles
in lexicographic (i, j) order.  All log-dets are natural log.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def rotation(nt, angles):
    v = np.eye(nt)
    k = 0
    for i in range(nt - 1):
        for j in range(i + 1, nt):
            c = math.cos(angles[k])
            s = math.sin(angles[k])
            for r in range(nt):
                vi = v[r, i]
                vj = v[r, j]
                v[r, i] = c * vi + s * vj
                v[r, j] = c * vj - s * vi
            k += 1
    return v


@njit(cache=True)
def _logdet_i_plus_dmd(gram, v, d, nt, work):
    # work <- I + D V^T G V D, then Cholesky log-det
    for a in range(nt):
        for b in range(a, nt):
            acc = 0.0
            for p in range(nt):
                vp = v[p, a]
                if vp == 0.0:
                    continue
                for q in range(nt):
                    acc += vp * gram[p, q] * v[q, b]
            val = d[a] * acc * d[b]
            if a == b:
                val += 1.0
            work[a, b] = val
            work[b, a] = val
    total = 0.0
    for j in range(nt):
        s = work[j, j]
        for p in range(j):
            s -= work[j, p] * work[j, p]
        if s <= 0.0:
            return np.nan
        ljj = math.sqrt(s)
        work[j, j] = ljj
        total += math.log(ljj)
        for i in range(j + 1, nt):
            t = work[i, j]
            for p in range(j):
                t -= work[i, p] * work[j, p]
            work[i, j] = t / ljj
    return 2.0 * total


@njit(cache=True)
def rate_nats(gram_b, gram_e, x, nt, k):
    """2 x (rate in nats): ln det(I + Hb Q Hb^T) - ln det(I + He Q He^T)."""
    v = rotation(nt, x[:k])
    d = np.empty(nt)
    for a in range(nt):
        lam = x[k + a]
        d[a] = math.sqrt(lam) if lam > 0.0 else 0.0
    work = np.empty((nt, nt))
    return _logdet_i_plus_dmd(gram_b, v, d, nt, work) - _logdet_i_plus_dmd(gram_e, v, d, nt, work)


@njit(cache=True)
def barrier_value(gram_b, gram_e, x, nt, k, budget, mu, scale):
    """-(rate) - mu * barrier; +inf outside the strictly feasible set.

    ``scale`` converts ``rate_nats`` to the reporting unit.
    """
    total = 0.0
    bar = 0.0
    for a in range(nt):
        lam = x[k + a]
        if not lam > 0.0:
            return np.inf
        total += lam
        bar += math.log(lam)
    slack = budget - total
    if not slack > 0.0:
        return np.inf
    bar += math.log(slack)
    return -scale * rate_nats(gram_b, gram_e, x, nt, k) - mu * bar


@njit(cache=True)
def barrier_gradient(gram_b, gram_e, x, nt, k, budget, mu, scale, h):
    """Central differences on the rate plus the exact barrier derivative."""
    n = x.size
    total = 0.0
    for a in range(nt):
        total += x[k + a]
    slack = budget - total
    g = np.empty(n)
    xp = x.copy()
    for c in range(n):
        step = h
        if c >= k:
            lim = 0.5 * min(x[c], slack)
            if lim < step:
                step = lim
        xp[c] = x[c] + step
        fp = rate_nats(gram_b, gram_e, xp, nt, k)
        xp[c] = x[c] - step
        fm = rate_nats(gram_b, gram_e, xp, nt, k)
        xp[c] = x[c]
        g[c] = -scale * (fp - fm) / (2.0 * step)
    if mu != 0.0:
        for a in range(nt):
            g[k + a] -= mu * (1.0 / x[k + a] - 1.0 / slack)
    return g


@njit(cache=True)
def max_step(x, p, nt, k, budget):
    t = np.inf
    total = 0.0
    dsum = 0.0
    for a in range(nt):
        lam = x[k + a]
        dl = p[k + a]
        total += lam
        dsum += dl
        if dl < 0.0:
            r = -lam / dl
            if r < t:
                t = r
    if dsum > 0.0:
        r = (budget - total) / dsum
        if r < t:
            t = r
    return t


@njit(cache=True)
def bfgs_barrier(gram_b, gram_e, x0, nt, k, budget, mu, scale, h, grad_tol, max_iters):
    """Compiled twin of ``precoder.bfgs_minimize`` for the barrier objective.

    Same update, line search and stopping rules.  Returns
    ``(x, f, converged, iterations)``.
    """
    c1 = 1e-4
    n = x0.size
    x = x0.copy()
    f = barrier_value(gram_b, gram_e, x, nt, k, budget, mu, scale)
    g = barrier_gradient(gram_b, gram_e, x, nt, k, budget, mu, scale, h)
    hinv = np.eye(n)
    first = True
    x_new = np.empty(n)
    p = np.empty(n)
    hy = np.empty(n)
    it = 0
    while it < max_iters:
        if np.max(np.abs(g)) <= grad_tol:
            return x, f, True, it
        slope = 0.0
        for a in range(n):
            acc = 0.0
            for b in range(n):
                acc -= hinv[a, b] * g[b]
            p[a] = acc
            slope += g[a] * acc
        if slope >= 0.0:
            hinv = np.eye(n)
            slope = 0.0
            for a in range(n):
                p[a] = -g[a]
                slope -= g[a] * g[a]
        step = min(1.0, 0.99 * max_step(x, p, nt, k, budget))
        accepted = False
        f_new = f
        for _ in range(60):
            same = True
            for a in range(n):
                x_new[a] = x[a] + step * p[a]
                if x_new[a] != x[a]:
                    same = False
            if same:
                return x, f, False, it
            f_new = barrier_value(gram_b, gram_e, x_new, nt, k, budget, mu, scale)
            if f_new <= f + c1 * step * slope and f_new < f:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            return x, f, False, it
        g_new = barrier_gradient(gram_b, gram_e, x_new, nt, k, budget, mu, scale, h)
        s = x_new - x
        y = g_new - g
        sy = 0.0
        ss = 0.0
        yy = 0.0
        for a in range(n):
            sy += s[a] * y[a]
            ss += s[a] * s[a]
            yy += y[a] * y[a]
        if sy > 1e-12 * math.sqrt(ss * yy):
            if first:
                hinv = np.eye(n) * (sy / yy)
                first = False
            rho = 1.0 / sy
            yhy = 0.0
            for a in range(n):
                acc = 0.0
                for b in range(n):
                    acc += hinv[a, b] * y[b]
                hy[a] = acc
                yhy += y[a] * acc
            coef = rho * rho * yhy + rho
            for a in range(n):
                for b in range(n):
                    hinv[a, b] += -rho * (s[a] * hy[b] + hy[a] * s[b]) + coef * s[a] * s[b]
        x[:] = x_new
        f = f_new
        g = g_new
        it += 1
    return x, f, np.max(np.abs(g)) <= grad_tol, it
