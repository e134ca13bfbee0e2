"""Secrecy-rate functionals of the two-user MIMO-NOMA channel.

Rates are in bits per real dimension: ``0.5 * log2 det(...)``.  Log-dets are
computed in natural base and converted only when a rate is returned.

Two encoding orders exist.  Under ``Order.ORDER12`` user 2 treats user 1's
signal (covariance ``Q1``) as noise, which is the classical region

    R1 <= 1/2 log|I + H1 Q1 H1^T| - 1/2 log|I + H2 Q1 H2^T|
    R2 <= 1/2 log|I + H2 Q2 H2^T (I + H2 Q1 H2^T)^-1|
          - 1/2 log|I + H1 Q2 H1^T (I + H1 Q1 H1^T)^-1|

and ``Order.ORDER21`` is the same with the user subscripts exchanged.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix, is_psd, logdet_psd, sym_eig

LN2 = math.log(2.0)
PSD_TOL = 1e-9


class Order(str, enum.Enum):
    """Precoding order: which user's covariance is designed first."""

    ORDER12 = "order12"
    ORDER21 = "order21"

    @classmethod
    def parse(cls, value) -> "Order":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"12": cls.ORDER12, "order12": cls.ORDER12, "21": cls.ORDER21, "order21": cls.ORDER21}
        if key not in aliases:
            raise ValueError(f"unknown precoding order {value!r}")
        return aliases[key]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ChannelPair:
    """Real channel matrices H1 (n1 x nt) and H2 (n2 x nt)."""

    H1: np.ndarray
    H2: np.ndarray

    def __post_init__(self):
        h1 = as_matrix(self.H1, "H1")
        h2 = as_matrix(self.H2, "H2")
        if h1.shape[1] != h2.shape[1]:
            raise ValueError(f"H1 and H2 must have the same number of columns, got {h1.shape} and {h2.shape}")
        object.__setattr__(self, "H1", _frozen(h1))
        object.__setattr__(self, "H2", _frozen(h2))

    @property
    def nt(self) -> int:
        return self.H1.shape[1]

    @property
    def n1(self) -> int:
        return self.H1.shape[0]

    @property
    def n2(self) -> int:
        return self.H2.shape[0]

    def swapped(self) -> "ChannelPair":
        return ChannelPair(self.H2, self.H1)


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric PSD transmit covariance, optionally tied to a power budget."""

    Q: np.ndarray
    budget: float | None = None
    trace: float = field(init=False)

    def __post_init__(self):
        q = as_matrix(self.Q, "Q")
        if q.shape[0] != q.shape[1]:
            raise ValueError(f"covariance must be square, got shape {q.shape}")
        if np.max(np.abs(q - q.T)) > 1e-10 * max(1.0, np.max(np.abs(q))):
            raise ValueError("covariance is not symmetric")
        q = 0.5 * (q + q.T)
        if not is_psd(q, PSD_TOL):
            raise ValueError("covariance is not positive semidefinite")
        tr = float(np.trace(q))
        if self.budget is not None and tr > self.budget + PSD_TOL:
            raise ValueError(f"covariance trace {tr} exceeds budget {self.budget}")
        object.__setattr__(self, "Q", _frozen(q))
        object.__setattr__(self, "trace", tr)

    @classmethod
    def zeros(cls, n: int, budget: float | None = None) -> "CovarianceMatrix":
        return cls(np.zeros((n, n)), budget)

    @property
    def n(self) -> int:
        return self.Q.shape[0]


@dataclass(frozen=True)
class EffectiveChannels:
    """Whitened channels that turn user 2's problem into a plain wiretap channel."""

    H1prime: np.ndarray
    H2prime: np.ndarray
    source_q1: CovarianceMatrix


@dataclass(frozen=True)
class RatePoint:
    R1: float
    R2: float
    alpha: float
    order: Order = Order.ORDER12

    def __post_init__(self):
        if not (self.R1 >= 0 and self.R2 >= 0):
            raise ValueError(f"reported rates must be non-negative, got ({self.R1}, {self.R2})")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        object.__setattr__(self, "order", Order.parse(self.order))

    @property
    def rates(self) -> tuple[float, float]:
        return (self.R1, self.R2)


def _cov_array(q, nt: int, name: str) -> np.ndarray:
    if isinstance(q, CovarianceMatrix):
        arr = q.Q
    else:
        arr = as_matrix(q, name)
        if not is_psd(arr, PSD_TOL):
            raise ValueError(f"{name} is not positive semidefinite")
    if arr.shape != (nt, nt):
        raise ValueError(f"{name} must be {nt}x{nt}, got {arr.shape}")
    return arr


def _logdet_i_plus(h: np.ndarray, q: np.ndarray) -> float:
    """ln det(I + H Q H^T)."""
    return logdet_psd(np.eye(h.shape[0]) + h @ q @ h.T)


def wiretap_rate(Hb, He, Q) -> float:
    """Signed secrecy rate (bits) of a wiretap channel with input covariance Q.

    No clamping: the result is negative when the eavesdropper is stronger
    in the directions Q excites.
    """
    hb = as_matrix(Hb, "Hb")
    he = as_matrix(He, "He")
    if hb.shape[1] != he.shape[1]:
        raise ValueError(f"Hb and He column counts differ: {hb.shape} vs {he.shape}")
    q = _cov_array(Q, hb.shape[1], "Q")
    return 0.5 * (_logdet_i_plus(hb, q) - _logdet_i_plus(he, q)) / LN2


def r2_direct(channels: ChannelPair, Q1, Q2) -> float:
    """User 2's signed secrecy rate when user 1's signal acts as noise.

    Evaluated as a difference of four log-dets, so no inverse is formed.
    """
    nt = channels.nt
    q1 = _cov_array(Q1, nt, "Q1")
    q2 = _cov_array(Q2, nt, "Q2")
    qs = q1 + q2
    h1, h2 = channels.H1, channels.H2
    legit = _logdet_i_plus(h2, qs) - _logdet_i_plus(h2, q1)
    leak = _logdet_i_plus(h1, qs) - _logdet_i_plus(h1, q1)
    return 0.5 * (legit - leak) / LN2


def _whiten(h: np.ndarray, q1: np.ndarray) -> np.ndarray:
    sigma = np.eye(h.shape[0]) + h @ q1 @ h.T
    w, v = sym_eig(sigma)
    return (v.T @ h) / np.sqrt(w)[:, None]


def effective_channels(channels: ChannelPair, Q1) -> EffectiveChannels:
    """Whiten both channels by the interference covariance I + H Q1 H^T.

    With ``Sigma = V diag(w) V^T`` the effective channel is
    ``diag(w)^-1/2 V^T H``.  A zero ``Q1`` returns the channels unchanged.
    """
    cov = Q1 if isinstance(Q1, CovarianceMatrix) else CovarianceMatrix(Q1)
    if cov.n != channels.nt:
        raise ValueError(f"Q1 must be {channels.nt}x{channels.nt}, got {cov.Q.shape}")
    if not np.any(cov.Q):
        return EffectiveChannels(_frozen(channels.H1.copy()), _frozen(channels.H2.copy()), cov)
    return EffectiveChannels(
        _frozen(_whiten(channels.H1, cov.Q)),
        _frozen(_whiten(channels.H2, cov.Q)),
        cov,
    )


def rate_pair(
    channels: ChannelPair,
    Q1,
    Q2,
    *,
    order: Order | str = Order.ORDER12,
    alpha: float | None = None,
    budget: float | None = None,
) -> RatePoint:
    """Clamped (R1, R2) for a covariance pair.

    ``order`` picks which user sees the other's signal as noise (the user
    designed second does).  ``alpha`` defaults to user 1's share of the
    total trace, or of ``budget`` when one is given.
    """
    order = Order.parse(order)
    nt = channels.nt
    q1 = _cov_array(Q1, nt, "Q1")
    q2 = _cov_array(Q2, nt, "Q2")
    t1, t2 = float(np.trace(q1)), float(np.trace(q2))
    if budget is not None and t1 + t2 > budget + PSD_TOL:
        raise ValueError(f"total trace {t1 + t2} exceeds budget {budget}")
    if order is Order.ORDER12:
        r1 = wiretap_rate(channels.H1, channels.H2, q1)
        r2 = r2_direct(channels, q1, q2)
    else:
        r2 = wiretap_rate(channels.H2, channels.H1, q2)
        r1 = r2_direct(channels.swapped(), q2, q1)
    if alpha is None:
        total = budget if budget else t1 + t2
        alpha = min(1.0, t1 / total) if total > 0 else 0.0
    return RatePoint(max(0.0, r1), max(0.0, r2), alpha, order)
