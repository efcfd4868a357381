"""Dephasing, entropies and the G-asymmetry of a probe state.

All entropies are in nats.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NegativeEigenvalue, SupportViolation
from .numerics import hermitian_eig, hermitian_eigvals, shannon_entropy
from .spectra import SpectralGenerator
from .states import NEG_EIG_TOL, DensityOperator, PureState, as_density

PURE_TOL = 1e-10
SUPPORT_TOL = 1e-10


def _check_dims(state, g: SpectralGenerator) -> None:
    if state.dim != g.dim:
        raise DimensionMismatch(f"state dim {state.dim} vs generator dim {g.dim}")


def _spectrum(matrix: np.ndarray, method: str) -> np.ndarray:
    ev = hermitian_eigvals(matrix, method=method)
    if ev.min() < -NEG_EIG_TOL:
        raise NegativeEigenvalue(f"eigenvalue {ev.min():.3e} below -{NEG_EIG_TOL}")
    return np.clip(ev, 0.0, None)


def _entropy_of_spectrum(ev: np.ndarray) -> float:
    ev = ev[ev > 0.0]
    return float(max(-np.sum(ev * np.log(ev)), 0.0))


def dephase(rho, g: SpectralGenerator) -> DensityOperator:
    """``sum_g P_g rho P_g``: drop coherences between distinct eigenspaces of ``g``."""
    rho = as_density(rho)
    _check_dims(rho, g)
    r = g.to_eigenbasis(np.array(rho.matrix))
    labels = g.labels
    r = np.where(labels[:, None] == labels[None, :], r, 0.0)
    return DensityOperator(g.from_eigenbasis(r))


def vn_entropy(rho, method: str = "lapack") -> float:
    if isinstance(rho, PureState):
        return 0.0
    rho = as_density(rho)
    return _entropy_of_spectrum(_spectrum(rho.matrix, method))


def generator_distribution(rho, g: SpectralGenerator) -> tuple[np.ndarray, np.ndarray]:
    """Distinct eigenvalues of ``g`` and their probabilities ``tr[rho P_g]``."""
    _check_dims(rho, g)
    if isinstance(rho, PureState):
        w = np.abs(g.to_eigenbasis(rho.amplitudes)) ** 2
    else:
        w = np.real(np.diag(g.to_eigenbasis(np.array(as_density(rho).matrix))))
    p = np.bincount(g.labels, weights=w, minlength=g.distinct_values.size)
    p = np.clip(p, 0.0, None)
    return g.distinct_values, p / p.sum()


def generator_entropy(rho, g: SpectralGenerator) -> float:
    _, p = generator_distribution(rho, g)
    return shannon_entropy(p)


def generator_variance(rho, g: SpectralGenerator) -> float:
    """Root-mean-square deviation of ``g`` in the state."""
    values, p = generator_distribution(rho, g)
    mean = np.dot(p, values)
    return float(np.sqrt(max(np.dot(p, (values - mean) ** 2), 0.0)))


def dephased_entropy(rho, g: SpectralGenerator, method: str = "lapack") -> float:
    """``S(U_G(rho))`` computed block by block in the eigenbasis of ``g``."""
    rho = as_density(rho)
    _check_dims(rho, g)
    r = g.to_eigenbasis(np.array(rho.matrix))
    labels = g.labels
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    spectra = []
    for block in np.split(order, bounds):
        sub = r[np.ix_(block, block)]
        spectra.append(_spectrum(sub, method) if block.size > 1 else np.clip(np.real(sub[0]), 0.0, None))
    return _entropy_of_spectrum(np.concatenate(spectra))


def g_asymmetry(rho, g: SpectralGenerator, method: str = "lapack", fast_path: bool = True) -> float:
    """``S(U_G(rho)) - S(rho)``, clamped at zero.

    Pure states (given as :class:`PureState`, or with ``S(rho) < 1e-10``) take
    the shortcut ``A_G = H(G|rho)``.
    """
    _check_dims(rho, g)
    if fast_path and isinstance(rho, PureState):
        return generator_entropy(rho, g)
    rho = as_density(rho)
    s = vn_entropy(rho, method=method)
    if fast_path and s < PURE_TOL:
        return generator_entropy(rho, g)
    a = dephased_entropy(rho, g, method=method) - s
    return max(a, 0.0) if a > -1e-9 else a


def _log_on_support(ev: np.ndarray, vecs: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    keep = ev > tol
    logm = (vecs[:, keep] * np.log(ev[keep])) @ vecs[:, keep].conj().T
    kernel = vecs[:, ~keep]
    return logm, kernel


def relative_entropy(sigma, tau, method: str = "lapack", strict: bool = False) -> float:
    """``D(sigma||tau) = tr[sigma (ln sigma - ln tau)]``.

    Returns ``inf`` when the support of ``sigma`` is not contained in that of
    ``tau``; with ``strict=True`` raises :class:`SupportViolation` instead.
    """
    s = as_density(sigma).matrix
    t = as_density(tau).matrix
    if s.shape != t.shape:
        raise DimensionMismatch(f"{s.shape} vs {t.shape}")
    ev_t, vec_t = hermitian_eig(t, method=method)
    log_t, kernel = _log_on_support(ev_t, vec_t, SUPPORT_TOL)
    if kernel.shape[1] and np.real(np.trace(kernel.conj().T @ s @ kernel)) > SUPPORT_TOL:
        if strict:
            raise SupportViolation("support of sigma exceeds support of tau")
        return float("inf")
    ev_s = _spectrum(s, method)
    neg_s = -_entropy_of_spectrum(ev_s)
    cross = np.real(np.trace(s @ log_t))
    return float(max(neg_s - cross, 0.0))
