"""Dense Hermitian eigensolver and entropy helpers.

The eigensolver is a cyclic complex Jacobi method using a round-robin
(tournament) ordering, so that each round applies n/2 disjoint plane
rotations at once as vectorised row/column updates.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NoConvergence, NotHermitian, NotNormalized

HERMITIAN_RTOL = 1e-12
OFFDIAG_RTOL = 1e-13
MAX_SWEEPS = 64


class EigenDecomposition(NamedTuple):
    values: np.ndarray  # ascending, real
    vectors: np.ndarray  # columns are orthonormal eigenvectors


def check_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise NotHermitian(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotHermitian("matrix has non-finite entries")
    scale = np.max(np.abs(a))
    if np.max(np.abs(a - a.conj().T)) > rtol * max(scale, np.finfo(float).tiny):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    return a


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings such that every (p, q) with p < q occurs exactly once per sweep."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eig(a: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> EigenDecomposition:
    a = check_hermitian(a)
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    w = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    if n == 1 or norm == 0.0:
        return EigenDecomposition(np.real(np.diag(a)).copy(), w)
    threshold = OFFDIAG_RTOL * norm
    tiny = np.finfo(float).tiny
    rounds = _round_robin(n)

    def offdiag(mat):
        off = mat.copy()
        np.fill_diagonal(off, 0.0)
        return np.linalg.norm(off)

    for _ in range(max_sweeps):
        if offdiag(a) <= threshold:
            break
        for p, q in rounds:
            b = a[p, q]
            mag = np.abs(b)
            active = mag > tiny
            if not np.any(active):
                continue
            p, q, b, mag = p[active], q[active], b[active], mag[active]
            app = a[p, p].real
            aqq = a[q, q].real
            theta = (aqq - app) / (2.0 * mag)
            sign = np.where(theta >= 0.0, 1.0, -1.0)
            t = sign / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            phase = np.conj(b) / mag  # e^{-i arg b}
            v00, v01 = c, s
            v10, v11 = -s * phase, c * phase

            cp, cq = a[:, p], a[:, q]
            a[:, p] = cp * v00 + cq * v10
            a[:, q] = cp * v01 + cq * v11
            rp, rq = a[p, :], a[q, :]
            a[p, :] = np.conj(v00)[:, None] * rp + np.conj(v10)[:, None] * rq
            a[q, :] = np.conj(v01)[:, None] * rp + np.conj(v11)[:, None] * rq
            wp, wq = w[:, p], w[:, q]
            w[:, p] = wp * v00 + wq * v10
            w[:, q] = wp * v01 + wq * v11
    else:
        if offdiag(a) > threshold:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")

    values = np.real(np.diag(a))
    order = np.argsort(values, kind="stable")
    return EigenDecomposition(values[order], w[:, order])


def hermitian_eig(a: np.ndarray, method: str = "jacobi") -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` routes through ``numpy.linalg.eigh`` after the same
    Hermiticity check; the Jacobi path is the reference implementation.
    """
    if method == "jacobi":
        return jacobi_eig(a)
    if method == "lapack":
        a = check_hermitian(a)
        values, vectors = np.linalg.eigh(0.5 * (a + a.conj().T))
        return EigenDecomposition(values, vectors)
    raise ValueError(f"unknown eigensolver method {method!r}")


def hermitian_eigvals(a: np.ndarray, method: str = "lapack") -> np.ndarray:
    if method == "lapack":
        a = check_hermitian(a)
        return np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    return hermitian_eig(a, method=method).values


def shannon_entropy(p) -> float:
    """Shannon entropy in nats, with 0 ln 0 = 0.

    Entries down to -1e-12 are treated as round-off and clamped to zero.
    """
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise NotNormalized("empty probability vector")
    if np.any(p < -1e-12):
        raise NotNormalized("probability vector has negative entries")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > 1e-9:
        raise NotNormalized(f"probabilities sum to {total!r}")
    nz = p[p > 0.0]
    return float(max(-np.sum(nz * np.log(nz)), 0.0))
