"""Small dense real-matrix helpers used throughout the rate computations.

Everything here works on plain ``numpy.ndarray`` values and is pure: inputs
are never modified in place.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

PD_THRESHOLD = 1e-12


class NotPositiveDefiniteError(ValueError):
    pass


class SymEigResult(NamedTuple):
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns aligned with eigenvalues


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D float array (a copy)."""
    m = np.array(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _require_square(m: np.ndarray, name: str = "matrix") -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")


def num_angles(n: int) -> int:
    return n * (n - 1) // 2


def angle_pairs(n: int) -> list[tuple[int, int]]:
    """Zero-based (i, j) pairs in lexicographic order, i < j."""
    return [(i, j) for i in range(n - 1) for j in range(i + 1, n)]


def givens(n: int, i: int, j: int, theta: float) -> np.ndarray:
    """Givens rotation in the (i, j) plane; ``i`` and ``j`` are 1-based.

    Identity except ``G[i,i] = G[j,j] = cos(theta)``, ``G[i,j] = -sin(theta)``
    and ``G[j,i] = sin(theta)``.
    """
    if not 1 <= i < j <= n:
        raise ValueError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    c, s = np.cos(theta), np.sin(theta)
    g = np.eye(n)
    g[i - 1, i - 1] = c
    g[i - 1, j - 1] = -s
    g[j - 1, i - 1] = s
    g[j - 1, j - 1] = c
    return g


def rotation_from_angles(n: int, angles) -> np.ndarray:
    """Product of Givens factors V12 V13 ... V1n V23 ... V(n-1)n.

    ``angles`` holds one angle per (i, j) pair in lexicographic order.
    """
    angles = np.asarray(angles, dtype=float).reshape(-1)
    if angles.size != num_angles(n):
        raise ValueError(f"expected {num_angles(n)} angles for n={n}, got {angles.size}")
    return rotation_batch(n, angles[None, :])[0]


def rotation_batch(n: int, angles: np.ndarray) -> np.ndarray:
    """Stacked version of :func:`rotation_from_angles` for an (m, n(n-1)/2) array.

    Right-multiplying by a Givens factor only mixes columns i and j, so each
    factor is applied as a column update instead of a full matrix product.
    """
    m = angles.shape[0]
    v = np.broadcast_to(np.eye(n), (m, n, n)).copy()
    if n == 1:
        return v
    c = np.cos(angles)
    s = np.sin(angles)
    for k, (i, j) in enumerate(angle_pairs(n)):
        ck = c[:, k, None]
        sk = s[:, k, None]
        vi = v[:, :, i].copy()
        vj = v[:, :, j]
        v[:, :, i] = vi * ck + vj * sk
        v[:, :, j] = vj * ck - vi * sk
    return v


def sym_eig(s) -> SymEigResult:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    The input is symmetrized as (S + S^T)/2 first.
    """
    s = np.asarray(s, dtype=float)
    _require_square(s)
    sym = 0.5 * (s + s.T)
    w, v = np.linalg.eigh(sym)
    return SymEigResult(w[::-1].copy(), v[:, ::-1].copy())


def logdet_psd(m) -> float:
    """Natural log-determinant of a symmetric positive definite matrix.

    Raises :class:`NotPositiveDefiniteError` if any eigenvalue is at or
    below ``PD_THRESHOLD``.
    """
    m = np.asarray(m, dtype=float)
    _require_square(m)
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    if w[0] <= PD_THRESHOLD:
        raise NotPositiveDefiniteError(f"matrix is not positive definite (min eigenvalue {w[0]:.3e})")
    return float(np.sum(np.log(w)))


def is_psd(m, tol: float = 1e-10) -> bool:
    m = np.asarray(m, dtype=float)
    _require_square(m)
    if np.max(np.abs(m - m.T)) > tol * max(1.0, np.max(np.abs(m))):
        return False
    return bool(np.linalg.eigvalsh(0.5 * (m + m.T))[0] >= -tol)
