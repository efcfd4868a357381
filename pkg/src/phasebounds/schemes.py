"""Iterative estimation schemes built from two-level probe components.

Each component is an equal superposition of the extreme eigenstates of some
(possibly nonlinear) generator, so for estimation purposes it acts like a
qubit whose two levels are separated by an integer eigenvalue gap. A scheme
is an ordered list of such components, each used ``copies`` times.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameters, DegenerateComponent, UnknownPreset

PRESETS = ("linear_multipass", "quadratic_iterative", "power_q_iterative", "roy_iterative", "none")


@dataclass(frozen=True)
class Component:
    gap: int
    copies: int
    qubit_cost: int
    pass_cost: int = 1
    low: int = 0
    note: str = ""

    def __post_init__(self):
        if int(self.gap) != self.gap or self.gap < 1:
            raise DegenerateComponent(f"component gap must be a positive integer, got {self.gap}")
        if self.copies < 0 or self.qubit_cost < 0 or self.pass_cost < 0:
            raise BadParameters("copies and costs must be nonnegative")


@dataclass(frozen=True)
class ResourceAccount:
    """Resources used by a scheme, with the reference accounting where it differs."""

    qubits: int = 0
    passes: int = 0
    photons: float = 0.0
    modes: int = 0
    copies: int = 0
    bits: int = 0
    qubits_reference: int | None = None
    passes_reference: int | None = None
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class SchemeSpec:
    components: tuple[Component, ...]
    preset: str = "custom"
    largest_gap_first: bool = True
    K: int = 0
    M: int = 0
    q: int | None = None
    notes: tuple[str, ...] = field(default=())

    def processing_order(self) -> tuple[Component, ...]:
        if not self.largest_gap_first:
            return self.components
        order = sorted(range(len(self.components)), key=lambda i: (-self.components[i].gap, i))
        return tuple(self.components[i] for i in order)

    def measurement_gaps(self) -> np.ndarray:
        """Gap of every single-copy measurement, in processing order."""
        gaps = [c.gap for c in self.processing_order() for _ in range(c.copies)]
        return np.asarray(gaps, dtype=np.int64)

    def component_index(self) -> np.ndarray:
        """Processing-order component index of every measurement."""
        idx = [i for i, c in enumerate(self.processing_order()) for _ in range(c.copies)]
        return np.asarray(idx, dtype=np.int64)

    @property
    def max_gap(self) -> int:
        return max((c.gap for c in self.components if c.copies), default=0)

    @property
    def bandwidth(self) -> int:
        """Largest frequency in the product of all measurement likelihoods."""
        return int(sum(c.gap * c.copies for c in self.components))

    @property
    def qubits(self) -> int:
        return int(sum(c.qubit_cost * c.copies for c in self.components))

    def resources(self) -> ResourceAccount:
        passes = int(sum(c.pass_cost * c.copies for c in self.components))
        qubits_ref = passes_ref = None
        if self.preset == "linear_multipass":
            passes_ref = self.M * (2 ** (self.K + 1) - 1)
        elif self.preset == "roy_iterative":
            qubits_ref = self.M * self.K * (self.K - 1) // 2
        return ResourceAccount(
            qubits=self.qubits,
            passes=passes,
            copies=self.M,
            bits=self.K,
            qubits_reference=qubits_ref,
            passes_reference=passes_ref,
            notes=self.notes,
        )

    def eigenvalue_distribution(self) -> tuple[np.ndarray, np.ndarray]:
        """Distribution of the total generator over all copies of the product probe.

        Each copy contributes its low or high eigenvalue with probability 1/2,
        independently, so the total distribution is a convolution.
        """
        offset = int(sum(c.low * c.copies for c in self.components))
        p = np.ones(1)
        for c in self.components:
            for _ in range(c.copies):
                q = np.zeros(p.size + c.gap)
                q[: p.size] += 0.5 * p
                q[c.gap :] += 0.5 * p
                p = q
        values = np.arange(p.size) + offset
        keep = p > 0
        return values[keep], p[keep]

    def composite_asymmetry(self) -> float:
        """Exact G-asymmetry (nats) of the full pure product probe."""
        _, p = self.eigenvalue_distribution()
        return float(-np.sum(p * np.log(p)))

    def distinct_eigenvalue_count(self) -> int:
        return int(self.eigenvalue_distribution()[0].size)


def _ceil_root_pow2(exponent: int, q: int) -> int:
    """Smallest integer l with l**q >= 2**exponent."""
    target = 2**exponent
    l = max(1, int(np.ceil(2.0 ** (exponent / q))))
    while l**q < target:
        l += 1
    while l > 1 and (l - 1) ** q >= target:
        l -= 1
    return l


def power_component(n: int, q: int, copies: int) -> Component:
    """Min/max superposition of ``(J_z)^q`` on ``n`` qubits as a two-level component."""
    if q % 2 == 0:
        low = n % 2
        gap = n**q - low
    else:
        low = -(n**q)
        gap = 2 * n**q
    if gap == 0:
        raise DegenerateComponent(f"(J_z)^{q} on {n} qubit(s) has a single eigenvalue")
    return Component(gap=gap, copies=copies, qubit_cost=n, pass_cost=1, low=low, note=f"(J_z)^{q} on {n} qubits")


def preset(name: str, K: int = 0, M: int = 1, q: int | None = None) -> SchemeSpec:
    if name not in PRESETS:
        raise UnknownPreset(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}")
    if name == "none":
        return SchemeSpec((), preset="none", K=0, M=0)
    if K < 1 or M < 1:
        raise BadParameters(f"preset {name} needs K >= 1 and M >= 1 (got K={K}, M={M})")

    if name == "linear_multipass":
        comps = tuple(
            Component(gap=2 ** (k - 1), copies=M, qubit_cost=1, pass_cost=2 ** (k - 1), note=f"qubit with {2 ** (k - 1)} passes")
            for k in range(1, K + 1)
        )
        return SchemeSpec(comps, preset=name, K=K, M=M)

    if name in ("quadratic_iterative", "power_q_iterative"):
        q = 2 if name == "quadratic_iterative" else q
        if q is None or q < 1:
            raise BadParameters("power_q_iterative needs q >= 1")
        comps, notes = [], []
        for k in range(1, K + 1):
            n_k = _ceil_root_pow2(k - 1, q)
            try:
                comps.append(power_component(n_k, q, M))
            except DegenerateComponent:
                comps.append(Component(gap=1, copies=M, qubit_cost=1, note="linear gap-1 qubit (substituted)"))
                notes.append(f"component k={k}: (J_z)^{q} on {n_k} qubit is degenerate; substituted a linear gap-1 qubit")
        return SchemeSpec(tuple(comps), preset=name, K=K, M=M, q=q, notes=tuple(notes))

    # roy_iterative: component k >= 2 uses H + 2^(l-1) on l = k-1 qubits, extreme eigenvalues 0 and 2^l
    comps = [Component(gap=1, copies=M, qubit_cost=1, note="linear gap-1 qubit (k=1)")]
    comps += [Component(gap=2 ** (k - 1), copies=M, qubit_cost=k - 1, note=f"H+2^{k - 2} on {k - 1} qubits") for k in range(2, K + 1)]
    notes = ("component k=1 would use 0 qubits; a single gap-1 qubit is used and counted",)
    return SchemeSpec(tuple(comps), preset=name, K=K, M=M, notes=notes)


def single_component(gap: int = 1, copies: int = 1) -> SchemeSpec:
    return SchemeSpec((Component(gap=gap, copies=copies, qubit_cost=1),), preset="custom", K=1, M=copies)
