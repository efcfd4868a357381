import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasebounds.bounds import UNIFORM, wrapped_gaussian
from phasebounds.errors import BadParameters, GridTooCoarse, InsufficientSamples, SizeExceeded
from phasebounds.estimator import (
    TrialRecords,
    canonical_epsilon,
    canonical_sample,
    child_seed,
    fejer_density,
    fit_scaling,
    mutual_information,
    rms_with_se,
    scaling_scan,
    sharpness_with_se,
    simulate,
    splitmix64,
    wrap,
)
from phasebounds.schemes import Component, SchemeSpec, preset, single_component

NO_INFO = math.pi / math.sqrt(3)


def test_splitmix_reference_value():
    # first output of the reference splitmix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert child_seed(1, 2) != child_seed(2, 1)


def test_wrap():
    np.testing.assert_allclose(wrap([0.0, math.pi, -math.pi, 3 * math.pi, 7.0]), [0, math.pi, math.pi, math.pi, 7 - 2 * math.pi])


def fourier_posterior_mean(gaps, outcomes, deltas):
    """Exact posterior circular mean under a uniform prior via trig-polynomial products."""
    bw = int(np.sum(gaps))
    c = np.zeros(2 * bw + 1, complex)
    c[bw] = 1.0
    for gap, b, d in zip(gaps, outcomes, deltas):
        s = 1.0 if b == 0 else -1.0
        new = 0.5 * c.copy()
        # cos(gap phi - d) = (e^{i(gap phi - d)} + e^{-i(gap phi - d)}) / 2
        new[gap:] += 0.25 * s * np.exp(-1j * d) * c[:-gap]
        new[:-gap] += 0.25 * s * np.exp(1j * d) * c[gap:]
        c = new
    # int p(phi) e^{i phi} dphi is proportional to the coefficient of e^{-i phi}
    return np.angle(c[bw - 1]) % (2 * math.pi)


@pytest.mark.parametrize("policy", ["adaptive", "nonadaptive", "slope"])
def test_posterior_mean_matches_fourier_oracle(policy):
    spec = preset("linear_multipass", K=4, M=3)
    rep = simulate(spec, trials=20, seed=3, policy=policy, mi_bins=None)
    rec = rep.records
    gaps = spec.measurement_gaps()
    for t in range(20):
        want = fourier_posterior_mean(gaps, rec.outcomes[t], rec.deltas[t])
        assert abs(wrap(rec.phi_hat[t] - want)) < 1e-9


def test_likelihood_convention():
    # one gap-1 measurement, delta fixed at 0 by the nonadaptive policy: P(b=0) = (1 + cos phi)/2
    rep = simulate(single_component(1, 1), trials=4000, seed=5, policy="nonadaptive", mi_bins=None)
    b = rep.records.outcomes[:, 0]
    p0 = (1 + np.cos(rep.records.phi)) / 2
    assert abs(np.mean(b == 0) - np.mean(p0)) < 0.03
    assert np.corrcoef(b == 0, p0)[0, 1] > 0.5


def test_determinism_and_threads():
    spec = preset("linear_multipass", K=3, M=2)
    a = simulate(spec, trials=300, seed=11, mi_bins=None)
    b = simulate(spec, trials=300, seed=11, mi_bins=None)
    c = simulate(spec, trials=300, seed=11, mi_bins=None, threads=2)
    assert a.to_dict() == b.to_dict() == c.to_dict()
    np.testing.assert_array_equal(a.records.phi_hat, c.records.phi_hat)
    d = simulate(spec, trials=300, seed=12, mi_bins=None)
    assert d.epsilon != a.epsilon


def test_trial_streams_are_prefix_stable():
    spec = preset("linear_multipass", K=2, M=2)
    short = simulate(spec, trials=50, seed=9, mi_bins=None)
    long = simulate(spec, trials=80, seed=9, mi_bins=None)
    np.testing.assert_array_equal(short.records.phi_hat, long.records.phi_hat[:50])


def test_no_measurement_baseline():
    rep = simulate(preset("none"), trials=20000, seed=1)
    assert abs(rep.epsilon - NO_INFO) < 3 * rep.epsilon_se
    zero_copies = SchemeSpec((Component(gap=1, copies=0, qubit_cost=1),))
    rep = simulate(zero_copies, trials=20000, seed=2, mi_bins=None)
    assert abs(rep.epsilon - NO_INFO) < 3 * rep.epsilon_se


def test_many_copies_shrink_error():
    eps = [simulate(single_component(1, m), trials=1500, seed=4, mi_bins=None).epsilon for m in (1, 8, 64)]
    assert eps[0] > eps[1] > eps[2]
    assert eps[2] < 0.25


def test_bound_respected_and_bwb():
    spec = preset("linear_multipass", K=6, M=4)
    rep = simulate(spec, trials=3000, seed=7)
    assert rep.bounds["epsilon_respects_error_lower"]
    assert rep.bounds["epsilon_respects_scheme_bound"]
    assert rep.bounds["mi_respects_asymmetry"]
    assert rep.bwb_applicable and rep.bwb_holds


def test_bitwise_policy():
    spec = preset("linear_multipass", K=5, M=5)
    rep = simulate(spec, trials=1000, seed=2, policy="bitwise", mi_bins=None)
    # majority votes land on the 2^-K lattice offset by half a cell
    assert rep.epsilon < 0.2
    with pytest.raises(BadParameters):
        simulate(preset("quadratic_iterative", K=4, M=2), trials=10, policy="bitwise")


def test_map_estimate_runs():
    rep = simulate(preset("linear_multipass", K=3, M=4), trials=500, seed=1, estimate="map", mi_bins=None)
    assert rep.epsilon < 0.5


def test_grid_checks():
    spec = preset("linear_multipass", K=8, M=1)
    with pytest.raises(GridTooCoarse):
        simulate(spec, trials=5, grid=1024)
    with pytest.raises(BadParameters):
        simulate(spec, trials=5, grid=3000)
    rep = simulate(spec, trials=5, grid=4096, mi_bins=None)
    assert rep.config["grid"] == 4096


def test_gaussian_prior_simulation():
    prior = wrapped_gaussian(0.3, mean=1.0)
    rep = simulate(single_component(1, 0), prior, trials=20000, seed=3, mi_bins=None)
    # no data: the estimate is the prior circular mean, so the error is the prior spread
    assert rep.epsilon == pytest.approx(0.3, rel=0.03)


def test_invalid_inputs():
    with pytest.raises(BadParameters):
        simulate(preset("none"), trials=0)
    with pytest.raises(BadParameters):
        simulate(preset("none"), trials=5, policy="psychic")
    with pytest.raises(InsufficientSamples):
        simulate(preset("none"), trials=100, mi_bins=16)


# ------------------------------------------------------------ statistics


def test_rms_jackknife_matches_delta_method(rng):
    x = rng.normal(size=5000)
    est, se = rms_with_se(x)
    delta = np.std(x**2, ddof=1) / (2 * est * math.sqrt(x.size))
    assert se == pytest.approx(delta, rel=0.02)


def test_holevo_variance_of_wrapped_normal(rng):
    s = 0.4
    err = wrap(rng.normal(scale=s, size=200000))
    sharp, sharp_se, hv, hv_se = sharpness_with_se(err)
    assert sharp == pytest.approx(math.exp(-s * s / 2), abs=4 * sharp_se)
    assert hv == pytest.approx(math.exp(s * s) - 1, abs=4 * hv_se)


def test_mutual_information_independent(rng):
    phi = rng.uniform(0, 2 * math.pi, 20000)
    est, se = mutual_information((phi, rng.uniform(0, 2 * math.pi, 20000)), bins=16)
    assert abs(est) < 3 * se + 1e-3


def test_mutual_information_deterministic_copy(rng):
    phi = rng.uniform(0, 2 * math.pi, 40000)
    est, _ = mutual_information((phi, phi), bins=8)
    assert est == pytest.approx(math.log(8), abs=0.01)


def test_mutual_information_preconditions(rng):
    phi = rng.uniform(0, 1, 100)
    with pytest.raises(InsufficientSamples):
        mutual_information((phi, phi), bins=8)
    with pytest.raises(BadParameters):
        mutual_information((phi, phi), bins=4)


def test_single_qubit_information_cap():
    rep = simulate(single_component(1, 1), trials=5000, seed=8)
    assert rep.mutual_information - 3 * rep.mutual_information_se <= math.log(2)


def test_csv(tmp_path):
    rep = simulate(preset("linear_multipass", K=2, M=1), trials=5, seed=0, mi_bins=None)
    path = tmp_path / "trials.csv"
    rep.records.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "trial,phi,phi_hat,wrapped_error,n_outcomes"
    assert len(lines) == 6 and lines[1].endswith(",2")


# ------------------------------------------------------------ canonical measurement


def fejer_series_eps(D):
    k = np.arange(1, D)
    return math.sqrt(math.pi**2 / 3 + 4 * np.sum((1 - k / D) * (-1.0) ** k / k**2))


def test_fejer_density_normalized():
    x = np.linspace(-math.pi, math.pi, 200001)
    for D in (1, 2, 7, 64):
        assert np.trapezoid(fejer_density(x, D), x) == pytest.approx(1.0, abs=1e-8)


def test_canonical_epsilon_closed_forms():
    assert canonical_epsilon(1) == pytest.approx(NO_INFO)
    assert canonical_epsilon(2) == pytest.approx(math.sqrt(math.pi**2 / 3 - 2), rel=1e-12)
    assert canonical_epsilon(2) == pytest.approx(1.1358, abs=1e-4)
    for D in (3, 16, 255, 4096, 2**16):
        assert canonical_epsilon(D) == pytest.approx(fejer_series_eps(D), rel=1e-9)


@pytest.mark.parametrize(
    "K, trials",
    [(1, 20000), (4, 20000), (8, 20000), (12, 100000), (14, 400000), pytest.param(16, 3000000, marks=pytest.mark.slow)],
)
def test_canonical_monte_carlo_matches_quadrature(K, trials):
    # the error density has 1/theta^2 tails: rare large errors (rate ~6/D)
    # carry the mean square, so trials must be large compared with D / 6
    rep = canonical_sample(K, trials=trials, seed=K, mi_bins=None)
    assert abs(rep.epsilon - rep.exact_epsilon) < 3 * rep.epsilon_se


def test_canonical_samplers_agree():
    a = canonical_sample(10, trials=20000, seed=1, method="cdf")
    b = canonical_sample(10, trials=20000, seed=1, method="wrapped")
    assert abs(a.epsilon - b.epsilon) < 3 * math.hypot(a.epsilon_se, b.epsilon_se)


def test_canonical_limits():
    with pytest.raises(SizeExceeded):
        canonical_sample(25, trials=1)


# ------------------------------------------------------------ scans


@given(st.floats(-3, -0.1), st.floats(-2, 2), st.sampled_from(["power", "exp", "exp-sqrt"]))
def test_fit_recovers_exact_law(slope, intercept, kind):
    n = np.array([3.0, 6, 12, 24, 48])
    x = {"power": np.log(n), "exp": n, "exp-sqrt": np.sqrt(n)}[kind]
    s, i, resid, r2 = fit_scaling(n, np.exp(slope * x + intercept), kind)
    assert s == pytest.approx(slope, abs=1e-9) and i == pytest.approx(intercept, abs=1e-8)
    assert r2 == pytest.approx(1.0)


def test_scan_canonical_slope():
    rep = scaling_scan("linear_multipass", range(8, 14), M=1, fit="exp", canonical=True)
    assert rep.slope == pytest.approx(-0.5 * math.log(2), rel=0.02)


def test_scan_needs_four_points():
    with pytest.raises(BadParameters):
        scaling_scan("linear_multipass", [1, 2, 3], M=1)
