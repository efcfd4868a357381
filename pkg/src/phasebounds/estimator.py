"""Monte Carlo simulation of iterative phase estimation.

Every component of a :class:`~phasebounds.schemes.SchemeSpec` is measured as a
two-outcome Ramsey fringe,

    P(b | phi) = (1 + (-1)^b cos(gap * phi - delta)) / 2,

with a feedback phase ``delta`` chosen by the policy. The estimator keeps a
Bayesian posterior on a uniform grid over [0, 2pi). Because every likelihood
is a trigonometric polynomial, a grid with more points than the total
bandwidth ``sum(gap * copies) + 1`` integrates the posterior and its first
circular moment exactly under a uniform prior; ``grid=None`` picks such a
grid, with ``2 * max gap`` of extra headroom so that the moments used for
feedback are alias-free as well.

Randomness: trial ``t`` owns a PCG64 stream whose 128-bit state and
increment are splitmix64 mixes of ``(seed, t)``. It draws the true phase from the prior first and
then one uniform per measurement in processing order.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numba
import numpy as np
from scipy import integrate

from .bounds import SCHEME_BOUNDS, UNIFORM, PriorDistribution, error_lower_bound, scheme_bound
from .errors import BadParameters, GridTooCoarse, InsufficientSamples, SizeExceeded
from .schemes import ResourceAccount, SchemeSpec, preset, single_component  # noqa: F401  (re-exported)

TWO_PI = 2.0 * math.pi
POLICIES = ("adaptive", "nonadaptive", "bitwise", "slope")
ESTIMATES = ("mean", "map")
MIN_GRID = 2**10
MAX_GRID = 2**22
DEFAULT_MI_BINS = 16

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def child_seed(seed: int, *keys: int) -> int:
    """Mix a master seed with integer keys (e.g. a trial index)."""
    h = splitmix64(int(seed) & _MASK64)
    for k in keys:
        h = splitmix64(h ^ (int(k) & _MASK64))
    return h


def _pcg_state(seed: int, trial: int) -> dict:
    c = child_seed(seed, trial)
    hi, lo = splitmix64(c), splitmix64(c ^ 0x6A09E667F3BCC909)
    ihi, ilo = splitmix64(c ^ 0xBB67AE8584CAA73B), splitmix64(c ^ 0x3C6EF372FE94F82B)
    return {
        "bit_generator": "PCG64",
        "state": {"state": (hi << 64) | lo, "inc": ((ihi << 64) | ilo) | 1},
        "has_uint32": 0,
        "uinteger": 0,
    }


class TrialStreams:
    """Per-trial PCG64 streams (128-bit state and increment from splitmix64).

    ``rng(t)`` re-seats one shared generator, which is much cheaper than
    building a new one per trial; the returned generator is only valid until
    the next call.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._bits = np.random.PCG64()
        self._gen = np.random.Generator(self._bits)

    def rng(self, trial: int) -> np.random.Generator:
        self._bits.state = _pcg_state(self.seed, trial)
        return self._gen


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """A fresh generator positioned at the start of trial ``trial``'s stream."""
    bits = np.random.PCG64()
    bits.state = _pcg_state(seed, trial)
    return np.random.Generator(bits)


def wrap(x):
    """Principal value in (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + math.pi, TWO_PI) - math.pi
    return np.where(y == -math.pi, math.pi, y)


# ---------------------------------------------------------------- kernel


@numba.njit(cache=True)
def _best_feedback(c1, c2, total):
    """Feedback maximising the expected sharpness of ``gap * phi`` after one outcome.

    ``c1``/``c2`` are the posterior moments at frequencies ``gap`` and
    ``2 gap``; the objective is ``|c1 + B| + |c1 - B|`` with
    ``B = (e^{-i delta} c2 + e^{i delta} total) / 2`` and has period pi.
    """
    best_d = 0.0
    best_v = -1.0
    n = 64
    for k in range(n):
        d = math.pi * k / n
        b = 0.5 * (np.exp(-1j * d) * c2 + np.exp(1j * d) * total)
        v = abs(c1 + b) + abs(c1 - b)
        if v > best_v:
            best_v = v
            best_d = d
    h = math.pi / n
    for _ in range(20):
        h *= 0.5
        for d in (best_d - h, best_d + h):
            b = 0.5 * (np.exp(-1j * d) * c2 + np.exp(1j * d) * total)
            v = abs(c1 + b) + abs(c1 - b)
            if v > best_v:
                best_v = v
                best_d = d
    return best_d


@numba.njit(cache=True)
def _trial_kernel(phi, u, gaps, copy_idx, comp_end, policy, estimate, prior_w, cos_tab, sin_tab, out_b, out_d):
    n_grid = prior_w.size
    n_meas = gaps.size
    post = prior_w.copy()
    total = 0.0
    rc = 0.0  # moment at frequency 1
    rs = 0.0
    fc = 0.0  # moment at the next measurement's gap
    fs = 0.0
    gc = 0.0  # moment at twice the next gap
    gs = 0.0
    step = gaps[0] if n_meas else 0
    m2 = 0
    m3 = 0
    for i in range(n_grid):
        w = post[i]
        total += w
        rc += w * cos_tab[i]
        rs += w * sin_tab[i]
        fc += w * cos_tab[m2]
        fs += w * sin_tab[m2]
        gc += w * cos_tab[m3]
        gs += w * sin_tab[m3]
        m2 = (m2 + step) % n_grid
        m3 = (m3 + 2 * step) % n_grid
    bits_est = 0.0
    ones = 0
    for j in range(n_meas):
        gap = gaps[j]
        if policy == 0:
            delta = _best_feedback(complex(fc, fs), complex(gc, gs), total)
        elif policy == 3:
            if rc * rc + rs * rs > 1e-24 * total * total:
                delta = gap * math.atan2(rs, rc) + 0.5 * math.pi
            else:
                delta = 0.5 * math.pi
        elif policy == 1:
            delta = 0.0 if copy_idx[j] % 2 == 0 else 0.5 * math.pi
        else:
            delta = gap * bits_est
        delta = delta % (2.0 * math.pi)
        p0 = 0.5 * (1.0 + math.cos(gap * phi - delta))
        b = 0 if u[j] < p0 else 1
        out_b[j] = b
        out_d[j] = delta
        sgn = 0.5 if b == 0 else -0.5
        cd = sgn * math.cos(delta)
        sd = sgn * math.sin(delta)
        scale = 1.0 / total
        step = gaps[j + 1] if j + 1 < n_meas else 0
        step2 = (2 * step) % n_grid
        total = 0.0
        rc = 0.0
        rs = 0.0
        fc = 0.0
        fs = 0.0
        gc = 0.0
        gs = 0.0
        need_r = policy == 3 or j + 1 == n_meas
        m = 0
        m2 = 0
        m3 = 0
        for i in range(n_grid):
            like = 0.5 + cos_tab[m] * cd + sin_tab[m] * sd
            if like < 0.0:
                like = 0.0
            w = post[i] * like * scale
            post[i] = w
            total += w
            if need_r:
                rc += w * cos_tab[i]
                rs += w * sin_tab[i]
            fc += w * cos_tab[m2]
            fs += w * sin_tab[m2]
            gc += w * cos_tab[m3]
            gs += w * sin_tab[m3]
            m += gap
            if m >= n_grid:
                m -= n_grid
            m2 += step
            if m2 >= n_grid:
                m2 -= n_grid
            m3 += step2
            if m3 >= n_grid:
                m3 -= n_grid
        if policy == 2:
            ones += b
            if comp_end[j]:
                copies = copy_idx[j] + 1
                if 2 * ones > copies:
                    bits_est += math.pi / gap
                ones = 0
    if estimate == 2:
        return bits_est % (2.0 * math.pi)
    if estimate == 1:
        best = 0
        for i in range(n_grid):
            if post[i] > post[best]:
                best = i
        return 2.0 * math.pi * best / n_grid
    if rc * rc + rs * rs > 1e-24 * total * total:
        return math.atan2(rs, rc) % (2.0 * math.pi)
    return 0.0


@numba.njit(cache=True)
def _run_trials(phis, uniforms, gaps, copy_idx, comp_end, policy, estimate, prior_w, cos_tab, sin_tab):
    n_trials = phis.size
    phi_hat = np.empty(n_trials)
    outcomes = np.empty((n_trials, gaps.size), dtype=np.int8)
    deltas = np.empty((n_trials, gaps.size))
    for t in range(n_trials):
        phi_hat[t] = _trial_kernel(
            phis[t], uniforms[t], gaps, copy_idx, comp_end, policy, estimate, prior_w, cos_tab, sin_tab, outcomes[t], deltas[t]
        )
    return phi_hat, outcomes, deltas


@numba.njit(cache=True, parallel=True)
def _run_trials_parallel(phis, uniforms, gaps, copy_idx, comp_end, policy, estimate, prior_w, cos_tab, sin_tab):
    n_trials = phis.size
    phi_hat = np.empty(n_trials)
    outcomes = np.empty((n_trials, gaps.size), dtype=np.int8)
    deltas = np.empty((n_trials, gaps.size))
    for t in numba.prange(n_trials):
        phi_hat[t] = _trial_kernel(
            phis[t], uniforms[t], gaps, copy_idx, comp_end, policy, estimate, prior_w, cos_tab, sin_tab, outcomes[t], deltas[t]
        )
    return phi_hat, outcomes, deltas


# ---------------------------------------------------------------- statistics


@dataclass
class TrialRecords:
    phi: np.ndarray
    phi_hat: np.ndarray
    outcomes: np.ndarray | None = None
    deltas: np.ndarray | None = None

    @property
    def wrapped_error(self) -> np.ndarray:
        return wrap(self.phi_hat - self.phi)

    def __len__(self):
        return self.phi.size

    def to_csv(self, path) -> None:
        n_out = self.outcomes.shape[1] if self.outcomes is not None else 0
        err = self.wrapped_error
        with open(path, "w") as fh:
            fh.write("trial,phi,phi_hat,wrapped_error,n_outcomes\n")
            for t in range(len(self)):
                fh.write(f"{t},{self.phi[t]:.9g},{self.phi_hat[t]:.9g},{err[t]:.9g},{n_out}\n")


def _jackknife_se(loo: np.ndarray, weights: np.ndarray | None = None) -> float:
    """Leave-one-out jackknife standard error; ``weights`` counts repeated LOO values."""
    if weights is None:
        weights = np.ones_like(loo)
    n = weights.sum()
    if n < 2:
        return float("nan")
    mean = np.dot(weights, loo) / n
    return float(math.sqrt((n - 1) / n * np.dot(weights, (loo - mean) ** 2)))


def rms_with_se(x: np.ndarray) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    n = x.size
    s = np.sum(x**2)
    est = math.sqrt(s / n)
    if n < 2:
        return est, float("nan")
    loo = np.sqrt(np.clip(s - x**2, 0.0, None) / (n - 1))
    return est, _jackknife_se(loo)


def sharpness_with_se(err: np.ndarray) -> tuple[float, float, float, float]:
    """Sharpness |<e^{i err}>| and Holevo variance S^-2 - 1, each with jackknife SE."""
    n = err.size
    c, s = np.cos(err), np.sin(err)
    sc, ss = c.sum(), s.sum()
    sharp = math.hypot(sc, ss) / n
    hv = sharp**-2 - 1.0 if sharp > 0 else math.inf
    if n < 2:
        return sharp, float("nan"), hv, float("nan")
    loo_s = np.hypot(sc - c, ss - s) / (n - 1)
    with np.errstate(divide="ignore"):
        loo_h = loo_s**-2.0 - 1.0
    return sharp, _jackknife_se(loo_s), hv, _jackknife_se(loo_h)


def _mi_from_counts(counts: np.ndarray) -> float:
    n = counts.sum()
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    nz = counts > 0
    plug = np.sum(counts[nz] / n * np.log(counts[nz] * n / np.outer(rows, cols)[nz]))
    m_xy = np.count_nonzero(nz)
    m_x = np.count_nonzero(rows)
    m_y = np.count_nonzero(cols)
    return float(plug + ((m_x - 1) + (m_y - 1) - (m_xy - 1)) / (2.0 * n))


def mutual_information(records: TrialRecords | tuple[np.ndarray, np.ndarray], bins: int = DEFAULT_MI_BINS) -> tuple[float, float]:
    """Binned mutual information (nats) between true and estimated phase.

    Plug-in estimate on a ``bins x bins`` histogram over [0, 2pi)^2 with the
    Miller-Madow correction applied to each entropy. Returns the estimate and
    its leave-one-out jackknife standard error.
    """
    if isinstance(records, TrialRecords):
        phi, phi_hat = records.phi, records.phi_hat
    else:
        phi, phi_hat = records
    phi = np.mod(np.asarray(phi, float), TWO_PI)
    phi_hat = np.mod(np.asarray(phi_hat, float), TWO_PI)
    n = phi.size
    if bins < 8:
        raise BadParameters("need at least 8 bins")
    if n < 10 * bins**2:
        raise InsufficientSamples(f"{n} trials < 10 * bins^2 = {10 * bins**2}")
    i = np.minimum((phi * bins / TWO_PI).astype(int), bins - 1)
    j = np.minimum((phi_hat * bins / TWO_PI).astype(int), bins - 1)
    counts = np.zeros((bins, bins))
    np.add.at(counts, (i, j), 1.0)
    est = _mi_from_counts(counts)
    occupied = np.argwhere(counts > 0)
    loo = np.empty(len(occupied))
    weights = np.empty(len(occupied))
    for k, (a, b) in enumerate(occupied):
        counts[a, b] -= 1
        loo[k] = _mi_from_counts(counts)
        counts[a, b] += 1
        weights[k] = counts[a, b]
    return est, _jackknife_se(loo, weights)


# ---------------------------------------------------------------- reports


@dataclass
class EstimationReport:
    trials: int
    epsilon: float
    epsilon_se: float
    epsilon_raw: float
    epsilon_raw_se: float
    holevo_variance: float
    holevo_variance_se: float
    sharpness: float
    sharpness_se: float
    mutual_information: float | None
    mutual_information_se: float | None
    mi_bins: int | None
    bounds: dict
    resources: ResourceAccount
    seed: int
    config: dict = field(default_factory=dict)
    exact_epsilon: float | None = None
    records: TrialRecords | None = field(default=None, repr=False)

    @property
    def bwb_applicable(self) -> bool:
        return self.epsilon <= 0.3

    @property
    def bwb_holds(self) -> bool:
        """``V_H <= eps^2 <= (pi/2)^2 V_H`` (meaningful when eps <= 0.3)."""
        e2 = self.epsilon**2
        return self.holevo_variance <= e2 <= (math.pi / 2) ** 2 * self.holevo_variance

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "records"}
        d["resources"]["notes"] = list(self.resources.notes)
        d["bwb"] = {"applicable": self.bwb_applicable, "holds": self.bwb_holds}
        return d


def _summarize(records: TrialRecords, bins: int | None) -> dict:
    err = records.wrapped_error
    eps, eps_se = rms_with_se(err)
    raw, raw_se = rms_with_se(records.phi_hat - records.phi)
    sharp, sharp_se, hv, hv_se = sharpness_with_se(err)
    mi = mi_se = None
    if bins is not None:
        mi, mi_se = mutual_information(records, bins)
    return dict(
        trials=len(records), epsilon=eps, epsilon_se=eps_se, epsilon_raw=raw, epsilon_raw_se=raw_se,
        holevo_variance=hv, holevo_variance_se=hv_se, sharpness=sharp, sharpness_se=sharp_se,
        mutual_information=mi, mutual_information_se=mi_se, mi_bins=bins,
    )


def _resolve_bins(mi_bins: int | None | str, trials: int) -> int | None:
    if mi_bins == "auto":
        return DEFAULT_MI_BINS if trials >= 10 * DEFAULT_MI_BINS**2 else None
    if mi_bins is not None and trials < 10 * mi_bins**2:
        raise InsufficientSamples(f"{trials} trials < 10 * bins^2 = {10 * mi_bins**2}")
    return mi_bins


def auto_grid(spec: SchemeSpec) -> int:
    # alias-free for the posterior's first moment and the 2*gap feedback moment
    need = max(spec.bandwidth + 2 * spec.max_gap + 2, 16 * spec.max_gap, MIN_GRID)
    n = 1 << (need - 1).bit_length()
    if n > MAX_GRID:
        raise SizeExceeded(f"posterior grid of {n} points exceeds {MAX_GRID}")
    return n


def _check_grid(grid: int, spec: SchemeSpec) -> None:
    if grid < MIN_GRID or grid & (grid - 1):
        raise BadParameters(f"grid must be a power of two >= {MIN_GRID}, got {grid}")
    if spec.max_gap and TWO_PI / grid > TWO_PI / (16 * spec.max_gap):
        raise GridTooCoarse(f"grid of {grid} points is too coarse for gap {spec.max_gap}")


def _bitwise_compatible(spec: SchemeSpec) -> bool:
    gaps = sorted(c.gap for c in spec.components)
    return gaps == [2**k for k in range(len(gaps))] and all(c.copies >= 1 for c in spec.components)


def simulate(
    spec: SchemeSpec,
    prior: PriorDistribution = UNIFORM,
    trials: int = 1000,
    seed: int = 0,
    policy: str = "adaptive",
    grid: int | None = None,
    estimate: str = "mean",
    mi_bins: int | None | str = "auto",
    keep_records: bool = True,
    threads: int = 1,
) -> EstimationReport:
    """Run ``trials`` independent estimation trials of ``spec``.

    Components are processed in ``spec.processing_order()`` (largest gap
    first by default). ``policy`` picks the feedback phase: ``adaptive``
    greedily maximises the expected posterior sharpness of ``gap * phi``
    (this also separates the modes of a multimodal posterior), ``slope``
    sits on the steepest part of the fringe at ``gap`` times the posterior
    mean, ``nonadaptive`` alternates 0 and pi/2, and ``bitwise`` runs the textbook
    bit-by-bit majority-vote estimator (power-of-two gaps only), whose
    estimate replaces the posterior one.
    """
    if trials < 1:
        raise BadParameters("need at least one trial")
    if policy not in POLICIES:
        raise BadParameters(f"unknown policy {policy!r}")
    if estimate not in ESTIMATES:
        raise BadParameters(f"unknown estimate {estimate!r}")
    if policy == "bitwise" and not _bitwise_compatible(spec):
        raise BadParameters("bitwise policy needs gaps 1, 2, 4, ..., 2^(K-1)")
    resolved_grid = auto_grid(spec) if grid is None else int(grid)
    _check_grid(resolved_grid, spec)
    bins = _resolve_bins(mi_bins, trials)

    gaps = spec.measurement_gaps()
    comp = spec.component_index()
    copy_idx = np.zeros(gaps.size, dtype=np.int64)
    comp_end = np.zeros(gaps.size, dtype=np.bool_)
    for j in range(gaps.size):
        copy_idx[j] = copy_idx[j - 1] + 1 if j and comp[j] == comp[j - 1] else 0
        comp_end[j] = j == gaps.size - 1 or comp[j + 1] != comp[j]

    phis = np.empty(trials)
    uniforms = np.empty((trials, gaps.size))
    streams = TrialStreams(seed)
    for t in range(trials):
        rng = streams.rng(t)
        phis[t] = prior.sample(rng)
        uniforms[t] = rng.random(gaps.size)

    theta = TWO_PI * np.arange(resolved_grid) / resolved_grid
    prior_w = prior.pdf(theta)
    prior_w = prior_w / prior_w.sum()
    cos_tab, sin_tab = np.cos(theta), np.sin(theta)
    policy_code = POLICIES.index(policy)
    estimate_code = 2 if policy == "bitwise" else ESTIMATES.index(estimate)

    if threads > 1:
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
        runner = _run_trials_parallel
    else:
        runner = _run_trials
    phi_hat, outcomes, deltas = runner(phis, uniforms, gaps, copy_idx, comp_end, policy_code, estimate_code, prior_w, cos_tab, sin_tab)

    records = TrialRecords(phis, phi_hat, outcomes, deltas)
    stats = _summarize(records, bins)
    bounds = compare_bounds(spec, prior, stats)
    config = {
        "preset": spec.preset, "K": spec.K, "M": spec.M, "q": spec.q, "trials": trials, "seed": seed,
        "policy": policy, "estimate": estimate if policy != "bitwise" else "bitwise", "grid": resolved_grid,
        "mi_bins": bins, "prior": prior.describe(), "largest_gap_first": spec.largest_gap_first,
        "gaps": [c.gap for c in spec.components], "copies": [c.copies for c in spec.components],
    }
    return EstimationReport(
        **stats, bounds=bounds, resources=spec.resources(), seed=seed, config=config,
        records=records if keep_records else None,
    )


def compare_bounds(spec: SchemeSpec, prior: PriorDistribution, stats: dict) -> dict:
    asym = spec.composite_asymmetry()
    floor = error_lower_bound(asym, prior)
    eps, eps_se = stats["epsilon"], stats["epsilon_se"]
    se = 0.0 if math.isnan(eps_se) else eps_se
    out = {
        "composite_asymmetry": asym,
        "error_lower": floor,
        "epsilon_respects_error_lower": eps + 3 * se >= floor,
    }
    if spec.preset in SCHEME_BOUNDS:
        sb = scheme_bound(spec, prior)
        out["scheme_bound"] = sb.value
        out["scheme_bound_formula"] = sb.formula
        out["epsilon_respects_scheme_bound"] = eps + 3 * se >= sb.value
        out["cap_asymmetry"] = sb.asymmetry_cap
    if stats["mutual_information"] is not None:
        mi_se = stats["mutual_information_se"]
        out["mi_respects_asymmetry"] = stats["mutual_information"] - 3 * (0.0 if math.isnan(mi_se) else mi_se) <= asym
    return out


# ---------------------------------------------------------------- canonical measurement

CANONICAL_GRID = 2**16


def fejer_density(theta, D: int) -> np.ndarray:
    """Density of the estimate offset for the canonical measurement on D levels."""
    theta = np.asarray(theta, dtype=float)
    half = 0.5 * theta
    s = np.sin(half)
    small = np.abs(s) < 1e-12
    safe = np.where(small, 1.0, s)
    val = np.sin(D * half) ** 2 / (TWO_PI * D * safe**2)
    return np.where(small, D / TWO_PI, val)


def canonical_epsilon(D: int) -> float:
    """Exact rms error of the canonical measurement by quadrature.

    The integrand ``theta^2 p(theta)`` is split as ``g(theta)(1 - cos D theta)/2``
    with smooth ``g``; the oscillatory half uses a cosine-weighted rule.
    """
    if D == 1:
        return math.pi / math.sqrt(3)

    def g(t):
        if t < 1e-8:
            return 4.0 / (TWO_PI * D)
        return t * t / (TWO_PI * D * math.sin(0.5 * t) ** 2)

    with warnings.catch_warnings():
        # QUADPACK flags round-off at this tolerance; agreement with the
        # closed-form series is ~1e-12 relative
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        smooth, _ = integrate.quad(g, 0.0, math.pi, epsabs=0.0, epsrel=1e-13, limit=200)
        osc, _ = integrate.quad(g, 0.0, math.pi, weight="cos", wvar=D, epsabs=0.0, epsrel=1e-13, limit=400)
    return math.sqrt(smooth - osc)


def _sample_fejer_cdf(u: np.ndarray, D: int) -> np.ndarray:
    theta = np.linspace(-math.pi, math.pi, CANONICAL_GRID + 1)
    dens = fejer_density(theta, D)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(theta))])
    cdf /= cdf[-1]
    return np.interp(u, cdf, theta)


FEJER_BLOCK = 32


@numba.njit(cache=True)
def _fejer_from_block(u, D):
    """Rejection draw of ``Y / D`` wrapped, Y with density ``(1 - cos y) / (pi y^2)``.

    The proposal mixes uniform on [-2, 2] with a ``2 / y^2`` tail, using four
    uniforms per attempt. Returns NaN if the block runs out (probability
    about 0.21^(len(u)/4)).
    """
    for a in range(u.size // 4):
        u0, u1, u2, u3 = u[4 * a], u[4 * a + 1], u[4 * a + 2], u[4 * a + 3]
        if u0 < 0.5:
            y = -2.0 + 4.0 * u1
        else:
            y = 2.0 / (1.0 - u1)
            if u2 < 0.5:
                y = -y
        if abs(y) <= 2.0:
            envelope = 1.0 / (2.0 * math.pi)
        else:
            envelope = 2.0 / (math.pi * y * y)
        if y == 0.0:
            target = 1.0 / (2.0 * math.pi)
        else:
            target = (1.0 - math.cos(y)) / (math.pi * y * y)
        if u3 * envelope <= target:
            x = y / D
            return (x + math.pi) % (2.0 * math.pi) - math.pi
    return math.nan


def _sample_fejer_wrapped(rng: np.random.Generator, D: int) -> float:
    """Exact draw of the canonical-measurement offset for any D."""
    while True:
        x = _fejer_from_block(rng.random(FEJER_BLOCK), D)
        if not math.isnan(x):
            return float(x)


def canonical_sample(
    K: int,
    prior: PriorDistribution = UNIFORM,
    trials: int = 10000,
    seed: int = 0,
    method: str | None = None,
    mi_bins: int | None | str = "auto",
    keep_records: bool = True,
) -> EstimationReport:
    """Sample estimates of the canonical phase measurement on ``D = 2^K`` levels.

    ``method="cdf"`` inverts the tabulated CDF on a 2^16-point grid, which
    resolves the density's oscillations only for ``K <= 12``; ``"wrapped"``
    is an exact rejection sampler valid for any K. The default picks ``cdf``
    when it is accurate.
    """
    if not 1 <= K <= 24:
        raise SizeExceeded(f"K={K} outside 1..24")
    D = 2**K
    method = method or ("cdf" if 16 * D <= CANONICAL_GRID else "wrapped")
    if method not in ("cdf", "wrapped"):
        raise BadParameters(f"unknown canonical sampling method {method!r}")
    bins = _resolve_bins(mi_bins, trials)
    phis = np.empty(trials)
    offsets = np.empty(trials)
    u = np.empty(trials)
    streams = TrialStreams(seed)
    for t in range(trials):
        rng = streams.rng(t)
        phis[t] = prior.sample(rng)
        if method == "cdf":
            u[t] = rng.random()
        else:
            offsets[t] = _sample_fejer_wrapped(rng, D)
    if method == "cdf":
        offsets = _sample_fejer_cdf(u, D)
    phi_hat = np.mod(phis + offsets, TWO_PI)
    records = TrialRecords(phis, phi_hat)
    stats = _summarize(records, bins)
    spec = preset("linear_multipass", K=K, M=1)
    bounds = compare_bounds(spec, prior, stats)
    exact = canonical_epsilon(D)
    bounds["canonical_constant"] = exact * 2.0 ** (K / 2)
    config = {"mode": "canonical", "K": K, "D": D, "trials": trials, "seed": seed, "method": method, "mi_bins": bins, "prior": prior.describe()}
    return EstimationReport(
        **stats, bounds=bounds, resources=spec.resources(), seed=seed, config=config, exact_epsilon=exact,
        records=records if keep_records else None,
    )


# ---------------------------------------------------------------- scans

FITS = ("power", "exp", "exp-sqrt")


@dataclass
class ScanReport:
    preset: str
    M: int
    fit_kind: str
    rows: list[dict]
    slope: float
    intercept: float
    residuals: list[float]
    r_squared: float
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def fit_scaling(n: Sequence[float], eps: Sequence[float], kind: str) -> tuple[float, float, np.ndarray, float]:
    """Least-squares line through ``ln eps`` vs ``ln n``, ``n`` or ``sqrt n``."""
    if kind not in FITS:
        raise BadParameters(f"unknown fit {kind!r}")
    n = np.asarray(n, dtype=float)
    y = np.log(np.asarray(eps, dtype=float))
    x = {"power": np.log(n), "exp": n, "exp-sqrt": np.sqrt(n)}[kind]
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), resid, float(r2)


def scaling_scan(
    preset_name: str,
    K_values: Sequence[int],
    M: int = 1,
    trials: int = 1000,
    seed: int = 0,
    fit: str = "power",
    q: int | None = None,
    prior: PriorDistribution = UNIFORM,
    policy: str = "adaptive",
    canonical: bool = False,
    threads: int = 1,
) -> ScanReport:
    """Simulate each K, record ``(n, eps)`` and fit the predicted scaling law.

    With ``canonical=True`` (linear multipass, M=1 only) each point uses the
    exact canonical-measurement error instead of a Monte Carlo run.
    """
    K_values = list(K_values)
    if len(K_values) < 4:
        raise BadParameters("a scan needs at least 4 points")
    if canonical and (preset_name != "linear_multipass" or M != 1):
        raise BadParameters("canonical scans are defined for linear_multipass with M=1")
    rows = []
    for K in K_values:
        spec = preset(preset_name, K=K, M=M, q=q)
        bound = scheme_bound(spec, prior) if preset_name in SCHEME_BOUNDS else None
        if canonical:
            eps, eps_se, mc = canonical_epsilon(2**K), 0.0, None
        else:
            rep = simulate(spec, prior, trials, child_seed(seed, K), policy=policy, mi_bins=None, keep_records=False, threads=threads)
            eps, eps_se, mc = rep.epsilon, rep.epsilon_se, rep
        rows.append({
            "K": K,
            "n": spec.qubits,
            "n_reference": spec.resources().qubits_reference,
            "epsilon": eps,
            "epsilon_se": eps_se,
            "holevo_variance": mc.holevo_variance if mc else None,
            "bwb_holds": mc.bwb_holds if mc else None,
            "bound": bound.value if bound else None,
            "exact_asymmetry_bound": bound.exact_bound if bound else None,
            "grid": mc.config["grid"] if mc else None,
        })
    slope, intercept, resid, r2 = fit_scaling([r["n"] for r in rows], [r["epsilon"] for r in rows], fit)
    config = {"preset": preset_name, "K_values": K_values, "M": M, "q": q, "trials": trials, "seed": seed,
              "fit": fit, "policy": policy, "canonical": canonical, "prior": prior.describe()}
    return ScanReport(preset_name, M, fit, rows, slope, intercept, [float(r) for r in resid], r2, config)
