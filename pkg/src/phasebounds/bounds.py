"""Closed-form entropic and variance-based bounds on phase estimation.

Entropies are in nats and errors in radians. ``rate_distortion_floor`` uses
the squared error inside the logarithm, ``H(prior) - ln(2 pi e eps^2)/2``,
which makes it the exact inverse of ``error_lower_bound``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .asymmetry import g_asymmetry, generator_entropy, generator_variance
from .errors import BadParameters, NotNormalized, UnknownPreset, ZeroVariance
from .schemes import ResourceAccount, SchemeSpec, preset

TWO_PI = 2.0 * math.pi
INV_SQRT_2PIE = (2.0 * math.pi * math.e) ** -0.5


@dataclass(frozen=True, eq=False)
class PriorDistribution:
    """Prior density of the shift on ``[0, 2pi)`` (or a gridded interval)."""

    kind: str = "uniform"
    sigma: float = 0.0
    mean: float = 0.0
    support: tuple[float, float] = (0.0, TWO_PI)
    density: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("uniform", "wrapped_gaussian", "gridded"):
            raise ValueError(f"unknown prior kind {self.kind!r}")
        if self.kind == "wrapped_gaussian" and not self.sigma > 0:
            raise ValueError("wrapped Gaussian needs sigma > 0")
        if self.kind == "gridded":
            d = np.asarray(self.density, dtype=float)
            a, b = self.support
            if d.ndim != 1 or d.size < 2 or not b > a:
                raise ValueError("gridded prior needs >= 2 density samples on a nonempty interval")
            if np.any(d < 0):
                raise NotNormalized("density must be nonnegative")
            total = np.trapezoid(d, dx=(b - a) / (d.size - 1))
            if abs(total - 1.0) > 1e-6:
                raise NotNormalized(f"gridded density integrates to {total!r}")
            d.setflags(write=False)
            object.__setattr__(self, "density", d)

    @property
    def grid(self) -> np.ndarray:
        a, b = self.support
        return np.linspace(a, b, self.density.size)

    def pdf(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        if self.kind == "uniform":
            return np.full(phi.shape, 1.0 / TWO_PI)
        if self.kind == "gridded":
            return np.interp(phi, self.grid, self.density, left=0.0, right=0.0)
        return _wrapped_normal_pdf(phi - self.mean, self.sigma)

    def entropy(self) -> float:
        return prior_entropy(self)

    def sample(self, rng: np.random.Generator) -> float:
        """One draw; consumes exactly one uniform (or one normal) variate."""
        if self.kind == "uniform":
            return rng.uniform(0.0, TWO_PI)
        if self.kind == "wrapped_gaussian":
            return (self.mean + self.sigma * rng.standard_normal()) % TWO_PI
        u = rng.uniform()
        grid = self.grid
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (self.density[1:] + self.density[:-1]) * np.diff(grid))])
        return float(np.interp(u * cdf[-1], cdf, grid))

    def describe(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform"}
        if self.kind == "wrapped_gaussian":
            return {"kind": "wrapped_gaussian", "sigma": self.sigma, "mean": self.mean}
        return {"kind": "gridded", "support": list(self.support), "points": int(self.density.size)}


UNIFORM = PriorDistribution()


def uniform_prior() -> PriorDistribution:
    return UNIFORM


def wrapped_gaussian(sigma: float, mean: float = 0.0) -> PriorDistribution:
    return PriorDistribution("wrapped_gaussian", sigma=float(sigma), mean=float(mean) % TWO_PI)


def gridded_prior(support: tuple[float, float], density) -> PriorDistribution:
    return PriorDistribution("gridded", support=(float(support[0]), float(support[1])), density=np.asarray(density, float))


def _wrapped_normal_pdf(x: np.ndarray, sigma: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if sigma < 2.0:
        x = (x + math.pi) % TWO_PI - math.pi
        k = np.arange(-(int(8 * sigma / TWO_PI) + 2), int(8 * sigma / TWO_PI) + 3)
        z = (x[..., None] + TWO_PI * k) / sigma
        return np.exp(-0.5 * z**2).sum(axis=-1) / (sigma * math.sqrt(TWO_PI))
    m = np.arange(1, int(math.sqrt(2 * 42) / sigma) + 2)
    terms = np.exp(-0.5 * (m * sigma) ** 2) * np.cos(np.multiply.outer(x, m))
    return (1.0 + 2.0 * terms.sum(axis=-1)) / TWO_PI


def prior_entropy(prior: PriorDistribution, points: int = 2**14 + 1) -> float:
    """Differential entropy ``-int p ln p`` in nats (trapezoid rule where numeric)."""
    if prior.kind == "uniform":
        return math.log(TWO_PI)
    if prior.kind == "gridded":
        d = prior.density
        a, b = prior.support
        f = np.where(d > 0, -d * np.log(np.where(d > 0, d, 1.0)), 0.0)
        return float(np.trapezoid(f, dx=(b - a) / (d.size - 1)))
    half = min(math.pi, 12.0 * prior.sigma)
    x = np.linspace(-half, half, points)
    d = _wrapped_normal_pdf(x, prior.sigma)
    f = np.where(d > 0, -d * np.log(np.where(d > 0, d, 1.0)), 0.0)
    return float(np.trapezoid(f, x))


# ---------------------------------------------------------------- bounds


def error_lower_bound(asymmetry: float, prior: PriorDistribution = UNIFORM) -> float:
    """Lower bound on the rms estimation error from the probe's G-asymmetry."""
    if asymmetry < 0:
        raise ValueError("asymmetry must be nonnegative")
    return INV_SQRT_2PIE * math.exp(prior_entropy(prior) - asymmetry)


def rate_distortion_floor(prior: PriorDistribution, error: float) -> float:
    """Minimum mutual information (nats) needed to reach rms error ``error``."""
    if not error > 0:
        raise ValueError("error must be positive")
    return prior_entropy(prior) - 0.5 * math.log(2 * math.pi * math.e * error**2)


def local_precision_lower(delta_g: float) -> float:
    """Quantum Cramer-Rao floor ``1/(2 dG)`` on the local precision."""
    if not delta_g > 0:
        raise ZeroVariance("generator variance is zero; local precision is unbounded")
    return 1.0 / (2.0 * delta_g)


def variance_entropy_floor(delta_g: float) -> float:
    """``(2 pi e)^(-1/2) [dG^2 + 1/12]^(-1/2)``: lower bound on ``exp(-H(G))`` for integer G."""
    return INV_SQRT_2PIE / math.sqrt(delta_g**2 + 1.0 / 12.0)


def multimode_entropy_cap(modes: int, mean_photons: float) -> tuple[float, float]:
    """Bounds on the asymmetry of any function of m mode photon numbers.

    Returns ``(tight, cap)`` with ``tight = m ln(1+N/m) + N ln(1+m/N)`` and
    ``cap = m + N``.
    """
    if modes < 1 or mean_photons < 0:
        raise BadParameters("need modes >= 1 and mean photon number >= 0")
    m, n = float(modes), float(mean_photons)
    # n ln(1 + m/n) -> 0 as n -> 0; below 1e-300 the ratio m/n would overflow
    tight = m * math.log1p(n / m) + (n * math.log1p(m / n) if n > 1e-300 else 0.0)
    return tight, m + n


@dataclass(frozen=True)
class BoundReport:
    mi_upper_asymmetry: float
    mi_upper_entropy: float
    error_lower: float
    error_lower_entropy: float
    local_precision_lower: float
    generator_rms: float
    prior_entropy: float
    notes: tuple[str, ...] = ()

    FORMULAS = {
        "mi_upper_asymmetry": "A_G = S(U_G(rho)) - S(rho)  [nats]",
        "mi_upper_entropy": "H(G|rho) = -sum_g p_g ln p_g  [nats]",
        "error_lower": "(2 pi e)^(-1/2) exp(H(prior)) exp(-A_G)  [rad]",
        "error_lower_entropy": "(2 pi e)^(-1/2) exp(H(prior)) exp(-H(G|rho))  [rad]",
        "local_precision_lower": "1 / (2 dG)  [rad]",
        "generator_rms": "dG = rms deviation of G",
        "prior_entropy": "H(prior) = -int p ln p  [nats]",
    }

    def to_dict(self) -> dict:
        out = {}
        for key, value in asdict(self).items():
            if key == "notes":
                out[key] = list(value)
            else:
                out[key] = {"value": value, "formula": self.FORMULAS[key]}
        return out


def bound_report(state, generator, prior: PriorDistribution = UNIFORM) -> BoundReport:
    a = g_asymmetry(state, generator)
    h = generator_entropy(state, generator)
    dg = generator_variance(state, generator)
    notes = []
    try:
        lp = local_precision_lower(dg)
    except ZeroVariance:
        lp = math.inf
        notes.append("generator variance is zero")
    return BoundReport(
        mi_upper_asymmetry=a,
        mi_upper_entropy=h,
        error_lower=error_lower_bound(a, prior),
        error_lower_entropy=error_lower_bound(h, prior),
        local_precision_lower=lp,
        generator_rms=dg,
        prior_entropy=prior_entropy(prior),
        notes=tuple(notes),
    )


# ---------------------------------------------------------------- schemes

SCHEME_BOUNDS = (
    "quadratic_iterative",
    "power_q_iterative",
    "roy_iterative",
    "linear_multipass",
    "qubit_universal",
    "optical_universal",
)


@dataclass(frozen=True)
class SchemeBound:
    preset: str
    value: float
    formula: str
    asymmetry_cap: float
    cap_bound: float
    exact_asymmetry: float | None
    exact_bound: float | None
    resources: ResourceAccount
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["resources"] = asdict(self.resources)
        d["resources"]["notes"] = list(self.resources.notes)
        return d


def scheme_bound(
    name: str | SchemeSpec,
    prior: PriorDistribution = UNIFORM,
    *,
    K: int | None = None,
    M: int = 1,
    q: int | None = None,
    n: int | None = None,
    modes: int | None = None,
    mean_photons: float | None = None,
) -> SchemeBound:
    """Scheme-specific lower bound on the rms error plus its resource account.

    ``value`` is the closed form for the preset. ``cap_bound`` is the generic
    entropic bound evaluated at the asymmetry cap (``ln(M 2^K)`` for the
    iterative schemes), and ``exact_bound`` uses the exact asymmetry of the
    composite product probe when one is defined.
    """
    spec = name if isinstance(name, SchemeSpec) else None
    name = spec.preset if spec is not None else name
    if name not in SCHEME_BOUNDS:
        raise UnknownPreset(f"no bound for preset {name!r}; expected one of {', '.join(SCHEME_BOUNDS)}")
    h = prior_entropy(prior)
    base = INV_SQRT_2PIE * math.exp(h)

    if name == "qubit_universal":
        if n is None or n < 1:
            raise BadParameters("qubit_universal needs n >= 1")
        cap = n * math.log(2)
        value = base * 2.0**-n
        return SchemeBound(name, value, "(2 pi e)^(-1/2) exp(H) 2^(-n)", cap, error_lower_bound(cap, prior), None, None, ResourceAccount(qubits=n))

    if name == "optical_universal":
        if modes is None or mean_photons is None:
            raise BadParameters("optical_universal needs modes and mean photon number")
        tight, cap = multimode_entropy_cap(modes, mean_photons)
        value = base * math.exp(-modes - mean_photons)
        return SchemeBound(
            name, value, "(2 pi e)^(-1/2) exp(H) exp(-m) exp(-<N>)", cap, error_lower_bound(cap, prior), None, None,
            ResourceAccount(photons=float(mean_photons), modes=int(modes)),
            extra={"mi_cap": cap, "mi_cap_tight": tight, "tight_bound": error_lower_bound(tight, prior)},
        )

    if spec is None:
        if K is None:
            raise BadParameters(f"{name} needs K")
        spec = preset(name, K=K, M=M, q=q)
    K, M = spec.K, spec.M
    res = spec.resources()
    n_used = res.qubits
    cap = math.log(M * 2**K)
    exact_a = spec.composite_asymmetry()
    extra = {}
    if name == "quadratic_iterative":
        value = base / (M * (1.0 + (math.sqrt(2) - 1.0) * n_used / M) ** 2)
        formula = "(2 pi e)^(-1/2) exp(H) / (M [1 + (sqrt2 - 1) n/M]^2)"
    elif name == "power_q_iterative":
        count = spec.distinct_eigenvalue_count()
        value = base / count
        formula = "(2 pi e)^(-1/2) exp(H) / #distinct eigenvalues of the composite generator"
        extra["distinct_eigenvalues"] = count
    elif name == "roy_iterative":
        n_ref = res.qubits_reference
        value = base / M * 2.0 ** (-math.sqrt(2.0 * n_ref / M))
        formula = "(2 pi e)^(-1/2) exp(H) M^(-1) 2^(-sqrt(2n/M)), n = M K (K-1)/2"
        extra["n_reference"] = n_ref
    else:
        value = base / M * 2.0 ** (-n_used / M)
        formula = "(2 pi e)^(-1/2) exp(H) M^(-1) 2^(-n/M)"
    return SchemeBound(name, value, formula, cap, error_lower_bound(cap, prior), exact_a, error_lower_bound(exact_a, prior), res, extra)
