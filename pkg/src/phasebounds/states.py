"""Probe states: pure amplitude vectors and density operators.

Multi-factor states use the little-endian index convention of
:mod:`phasebounds.spectra` (factor 0 is the least significant digit).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import DegenerateSpectrum, NegativeEigenvalue, NotNormalized, SizeExceeded
from .numerics import check_hermitian, hermitian_eigvals
from .spectra import MAX_DIM, MAX_QUBITS, SpectralGenerator

NORM_TOL = 1e-10
TRACE_TOL = 1e-9
NEG_EIG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).ravel()
        norm = np.sum(np.abs(a) ** 2)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"state norm^2 is {norm!r}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityOperator":
        a = self.amplitudes
        return DensityOperator(np.outer(a, a.conj()), self.label)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = check_hermitian(self.matrix, rtol=1e-10)
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise NotNormalized(f"trace is {tr!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Spectrum with round-off negatives clamped to zero."""
        ev = hermitian_eigvals(self.matrix)
        if ev.min() < -NEG_EIG_TOL:
            raise NegativeEigenvalue(f"eigenvalue {ev.min():.3e} is below -{NEG_EIG_TOL}")
        return np.clip(ev, 0.0, None)


State = PureState | DensityOperator


def as_density(state: State | np.ndarray) -> DensityOperator:
    if isinstance(state, DensityOperator):
        return state
    if isinstance(state, PureState):
        return state.density()
    arr = np.asarray(state)
    return PureState(arr).density() if arr.ndim == 1 else DensityOperator(arr)


def _check_size(n: int, what: str = "qubit count") -> None:
    if not 1 <= int(n) <= MAX_QUBITS:
        raise SizeExceeded(f"{what} {n} outside 1..{MAX_QUBITS}")


def basis_state(dim: int, index: int) -> PureState:
    a = np.zeros(dim, dtype=complex)
    a[index] = 1.0
    return PureState(a, f"basis({dim},{index})")


def ghz(n: int) -> PureState:
    """``(|0...0> + |1...1>)/sqrt2`` on n qubits."""
    _check_size(n)
    a = np.zeros(2**n, dtype=complex)
    a[0] = a[-1] = 1 / np.sqrt(2)
    return PureState(a, f"ghz({n})")


def minmax_superposition(g: SpectralGenerator) -> PureState:
    """Equal superposition of eigenvectors for the smallest and largest eigenvalue.

    Within a degenerate extreme eigenspace the eigenvector with the lowest
    basis index is used.
    """
    distinct, labels = g.distinct_values, g.labels
    if distinct.size < 2:
        raise DegenerateSpectrum(f"{g.description} has a single distinct eigenvalue")
    i_min = int(np.flatnonzero(labels == 0)[0])
    i_max = int(np.flatnonzero(labels == distinct.size - 1)[0])
    a = (g.eigenvector(i_min) + g.eigenvector(i_max)) / np.sqrt(2)
    return PureState(a, f"minmax({g.description})")


def coherent_number_state(mean: float, mass: float = 1 - 1e-12) -> PureState:
    """Number-basis amplitudes of a coherent state with real, positive alpha.

    Truncated at the smallest cutoff whose cumulative Poisson mass reaches
    ``mass``, then renormalised.
    """
    if mean < 0:
        raise ValueError("mean photon number must be >= 0")
    if not 0 < mass < 1:
        raise ValueError("mass must lie in (0, 1)")
    if mean == 0:
        return PureState(np.array([1.0 + 0j]), "coherent(0)")
    cutoff = int(stats.poisson.ppf(mass, mean))
    while stats.poisson.cdf(cutoff, mean) < mass:
        cutoff += 1
    if cutoff + 1 > MAX_DIM:
        raise SizeExceeded(f"coherent cutoff {cutoff} too large")
    p = stats.poisson.pmf(np.arange(cutoff + 1), mean)
    p /= p.sum()
    return PureState(np.sqrt(p).astype(complex), f"coherent({mean:g})")


def plus_product(K: int) -> PureState:
    _check_size(K)
    dim = 2**K
    return PureState(np.full(dim, dim**-0.5, dtype=complex), f"plus_product({K})")


def tensor(states: Sequence[PureState]) -> PureState:
    """Kronecker product with ``states[0]`` as the least significant factor."""
    states = list(states)
    if not states:
        raise ValueError("tensor needs at least one state")
    dim = int(np.prod([s.dim for s in states], dtype=object))
    if dim > MAX_DIM:
        raise SizeExceeded(f"product dimension {dim} exceeds {MAX_DIM}")
    amps = reduce(lambda acc, s: np.kron(acc, s.amplitudes), reversed(states[:-1]), states[-1].amplitudes)
    return PureState(amps, "tensor[" + ",".join(s.label for s in states) + "]")


def mix(weights: Sequence[float], states: Sequence[PureState | DensityOperator]) -> DensityOperator:
    weights = np.asarray(weights, dtype=float)
    if weights.size != len(states) or weights.size == 0:
        raise ValueError("weights and states must have equal, nonzero length")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > TRACE_TOL:
        raise NotNormalized("mixture weights must be nonnegative and sum to 1")
    mats = [as_density(s).matrix for s in states]
    if len({m.shape for m in mats}) != 1:
        raise ValueError("mixture components have different dimensions")
    return DensityOperator(sum(w * m for w, m in zip(weights, mats)), "mixture")


def maximally_mixed(dim: int) -> DensityOperator:
    return DensityOperator(np.eye(dim, dtype=complex) / dim, f"maxmixed({dim})")


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Random density operator ``X X^dagger / tr`` with Gaussian ``X`` of the given rank."""
    rank = dim if rank is None else rank
    x = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = x @ x.conj().T
    return DensityOperator(rho / np.trace(rho).real)


def random_pure(dim: int, rng: np.random.Generator) -> PureState:
    a = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(a / np.linalg.norm(a))
