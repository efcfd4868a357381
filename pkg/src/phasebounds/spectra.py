"""Shift generators described by their spectral data.

A generator is stored as eigenvalues plus an eigenbasis. The eigenbasis is
either the computational basis (``basis is None``) or an explicit unitary
whose columns are eigenvectors, kept as a sparse matrix so that generators
such as ``roy_h(12)`` stay cheap.

Index convention for multi-factor objects is little-endian: factor 0 is the
least significant digit of the basis index. For qubits, bit ``j`` of the
index is the state of qubit ``j`` and ``sigma_z|0> = +|0>``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, SizeExceeded

MAX_QUBITS = 20
MAX_DIM = 2**20
EIGENVALUE_TOL = 1e-9
UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class EigenvalueSummary:
    distinct_count: int
    min: float
    max: float
    gap: float
    multiplicities: dict


@dataclass(frozen=True, eq=False)
class SpectralGenerator:
    """Hermitian generator ``G = V diag(eigenvalues) V^dagger``."""

    eigenvalues: np.ndarray
    basis: sp.csr_matrix | None = None
    description: str = ""
    parts: tuple = field(default=(), repr=False)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float).ravel()
        if ev.size < 1:
            raise ValueError("generator needs at least one eigenvalue")
        if not np.all(np.isfinite(ev)):
            raise ValueError("eigenvalues must be finite")
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)
        if self.basis is not None:
            v = sp.csr_matrix(self.basis, dtype=complex)
            if v.shape != (ev.size, ev.size):
                raise DimensionMismatch(f"eigenbasis shape {v.shape} does not match dim {ev.size}")
            err = abs(v.conj().T @ v - sp.identity(ev.size, format="csr"))
            if err.nnz and err.max() > UNITARY_TOL:
                raise ValueError("explicit eigenbasis is not unitary")
            object.__setattr__(self, "basis", v)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def is_computational(self) -> bool:
        return self.basis is None

    @cached_property
    def integer_valued(self) -> bool:
        return bool(np.all(np.abs(self.eigenvalues - np.round(self.eigenvalues)) <= EIGENVALUE_TOL))

    @cached_property
    def _grouping(self) -> tuple[np.ndarray, np.ndarray]:
        return group_eigenvalues(self.eigenvalues)

    @property
    def distinct_values(self) -> np.ndarray:
        """Sorted distinct eigenvalues."""
        return self._grouping[0]

    @property
    def labels(self) -> np.ndarray:
        """For each basis index, the position of its eigenvalue in ``distinct_values``."""
        return self._grouping[1]

    def require_integer(self) -> None:
        if not self.integer_valued:
            raise ValueError(f"generator {self.description!r} does not have integer eigenvalues")

    def to_eigenbasis(self, x: np.ndarray) -> np.ndarray:
        """Express a vector (1-D) or operator (2-D) in the generator's eigenbasis."""
        if x.shape[0] != self.dim:
            raise DimensionMismatch(f"object of dim {x.shape[0]} vs generator dim {self.dim}")
        if self.basis is None:
            return x
        vh = self.basis.conj().T
        if x.ndim == 1:
            return vh @ x
        return np.asarray((vh @ (vh @ x.conj().T).conj().T))

    def from_eigenbasis(self, x: np.ndarray) -> np.ndarray:
        if self.basis is None:
            return x
        v = self.basis
        if x.ndim == 1:
            return v @ x
        return np.asarray(v @ (v @ x.conj().T).conj().T)

    def eigenvector(self, index: int) -> np.ndarray:
        if self.basis is None:
            e = np.zeros(self.dim, dtype=complex)
            e[index] = 1.0
            return e
        return self.basis[:, index].toarray().ravel()

    def matrix(self) -> np.ndarray:
        """Dense matrix in the computational basis."""
        if self.dim > 2**12:
            raise SizeExceeded(f"refusing dense {self.dim}x{self.dim} matrix")
        return self.from_eigenbasis(np.diag(self.eigenvalues.astype(complex)))

    def apply(self, f: Callable[[np.ndarray], np.ndarray], description: str | None = None) -> "SpectralGenerator":
        """The generator ``f(G)``, sharing this eigenbasis."""
        return SpectralGenerator(
            np.asarray(f(self.eigenvalues), dtype=float),
            self.basis,
            description or f"f({self.description})",
        )


def group_eigenvalues(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct eigenvalues and per-index labels.

    Integer-valued spectra are compared exactly after rounding; otherwise
    values closer than ``EIGENVALUE_TOL`` are merged.
    """
    values = np.asarray(values, dtype=float)
    rounded = np.round(values)
    if np.all(np.abs(values - rounded) <= EIGENVALUE_TOL):
        distinct, labels = np.unique(rounded, return_inverse=True)
        return distinct, labels.ravel()
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    new_group = np.concatenate([[True], np.diff(sorted_vals) > EIGENVALUE_TOL])
    group_ids = np.cumsum(new_group) - 1
    labels = np.empty(values.size, dtype=np.intp)
    labels[order] = group_ids
    distinct = sorted_vals[new_group]
    return distinct, labels


def summarize(g: SpectralGenerator) -> EigenvalueSummary:
    distinct, labels = g.distinct_values, g.labels
    counts = np.bincount(labels, minlength=distinct.size)
    keyed = {(int(v) if g.integer_valued else float(v)): int(c) for v, c in zip(distinct, counts)}
    return EigenvalueSummary(
        distinct_count=int(distinct.size),
        min=float(distinct[0]),
        max=float(distinct[-1]),
        gap=float(distinct[-1] - distinct[0]),
        multiplicities=keyed,
    )


def _check_qubits(n: int) -> None:
    if not 1 <= int(n) <= MAX_QUBITS:
        raise SizeExceeded(f"qubit count {n} outside 1..{MAX_QUBITS}")


def _popcount(n: int) -> np.ndarray:
    idx = np.arange(2**n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n)) & 1
    return bits.sum(axis=1)


def jz(n: int) -> SpectralGenerator:
    """Collective ``J_z = sigma_z^(1) + ... + sigma_z^(n)``."""
    _check_qubits(n)
    return SpectralGenerator(n - 2.0 * _popcount(n), None, f"jz({n})")


def jz_pow(n: int, q: int) -> SpectralGenerator:
    if q < 1:
        raise ValueError("power must be a positive integer")
    _check_qubits(n)
    return SpectralGenerator((n - 2.0 * _popcount(n)) ** q, None, f"jz_pow({n},{q})")


def n_jz(n: int) -> SpectralGenerator:
    _check_qubits(n)
    return SpectralGenerator(n * (n - 2.0 * _popcount(n)), None, f"n_jz({n})")


def _roy(n: int, phase: complex, name: str) -> SpectralGenerator:
    _check_qubits(n)
    dim = 2**n
    ev = np.zeros(dim)
    top = dim - 1
    # column 0 -> (|0..0> + phase|1..1>)/sqrt2 (eigenvalue +2^(n-1)),
    # column top -> (|0..0> - phase|1..1>)/sqrt2 (eigenvalue -2^(n-1))
    s = 1 / np.sqrt(2)
    rows = list(range(1, top)) + [0, top, 0, top]
    cols = list(range(1, top)) + [0, 0, top, top]
    vals = [1.0] * (top - 1) + [s, phase * s, s, -phase * s]
    basis = sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(dim, dim))
    ev[0] = 2.0 ** (n - 1)
    ev[top] = -(2.0 ** (n - 1))
    return SpectralGenerator(ev, basis, f"{name}({n})")


def roy_h(n: int) -> SpectralGenerator:
    """Hermitian part ``H`` of ``(sx + i sy)^{(x) n}``: eigenvalues 0 and +-2^(n-1)."""
    return _roy(n, 1.0, "roy_h")


def roy_a(n: int) -> SpectralGenerator:
    """``A`` with ``H + iA = (sx + i sy)^{(x) n}``; eigenvectors (|0..0> +- i|1..1>)/sqrt2."""
    return _roy(n, 1j, "roy_a")


NUMBER_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "identity": lambda k: k,
    "id": lambda k: k,
    "square": lambda k: k**2,
    "cube": lambda k: k**3,
    "const": lambda k: np.zeros_like(k),
}


def number_function(cutoff: int, f: Callable | str | Sequence[float]) -> SpectralGenerator:
    """``f(N)`` on the truncated number basis ``0..cutoff``."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    if cutoff + 1 > MAX_DIM:
        raise SizeExceeded(f"cutoff {cutoff} too large")
    k = np.arange(cutoff + 1, dtype=float)
    name = f if isinstance(f, str) else getattr(f, "__name__", "f")
    if isinstance(f, str):
        f = NUMBER_FUNCTIONS[f]
    if callable(f):
        values = np.array([f(x) for x in k], dtype=float) if not _vectorizes(f) else np.asarray(f(k), float)
    else:
        values = np.asarray(f, dtype=float)
        name = "table"
        if values.size != cutoff + 1:
            raise ValueError(f"need {cutoff + 1} values, got {values.size}")
    return SpectralGenerator(values, None, f"number_fn({cutoff},{name})")


def _vectorizes(f) -> bool:
    try:
        out = np.asarray(f(np.arange(3.0)))
    except Exception:
        return False
    return out.shape == (3,)


def multipass(K: int) -> SpectralGenerator:
    """``sum_k 2^(k-1) (1 + sigma_z^(k))/2`` on K qubits (qubit k-1 is bit k-1)."""
    _check_qubits(K)
    parts = [SpectralGenerator(np.array([2.0 ** (k - 1), 0.0]), None, f"pass({2 ** (k - 1)})") for k in range(1, K + 1)]
    g = composite_sum(parts)
    return SpectralGenerator(g.eigenvalues, None, f"multipass({K})", parts=g.parts)


def qubit(gap: float, low: float = 0.0) -> SpectralGenerator:
    """Two-level generator with eigenvalue ``low`` on |1> and ``low + gap`` on |0>."""
    return SpectralGenerator(np.array([low + gap, low]), None, f"qubit({gap})")


def composite_sum(parts: Sequence[SpectralGenerator]) -> SpectralGenerator:
    """``G_1 (x) 1 + 1 (x) G_2 + ...`` with factor 0 least significant."""
    parts = list(parts)
    if not parts:
        raise ValueError("composite_sum needs at least one part")
    dim = int(np.prod([p.dim for p in parts], dtype=object))
    if dim > MAX_DIM:
        raise SizeExceeded(f"composite dimension {dim} exceeds {MAX_DIM}")
    # kron(A, B) puts A in the most significant position, so fold from the last factor
    ev = reduce(lambda acc, p: np.add.outer(acc, p.eigenvalues).ravel(), reversed(parts[:-1]), parts[-1].eigenvalues)
    ev = np.asarray(ev, dtype=float).ravel()
    if all(p.is_computational for p in parts):
        basis = None
    else:
        mats = [p.basis if p.basis is not None else sp.identity(p.dim, dtype=complex, format="csr") for p in reversed(parts)]
        basis = reduce(lambda a, b: sp.kron(a, b, format="csr"), mats)
    desc = " + ".join(p.description for p in parts)
    return SpectralGenerator(ev, basis, f"sum[{desc}]", parts=tuple(parts))


def kron_index(digits: Sequence[int], dims: Sequence[int]) -> int:
    """Little-endian mixed-radix index of per-factor basis labels."""
    index, stride = 0, 1
    for d, size in zip(digits, dims):
        index += d * stride
        stride *= size
    return index
