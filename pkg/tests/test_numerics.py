import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize

from conftest import random_hermitian
from phasebounds.errors import NotHermitian, NotNormalized
from phasebounds.numerics import _round_robin, hermitian_eig, hermitian_eigvals, jacobi_eig, shannon_entropy


def det_scan_roots(a, lo, hi, steps=4000):
    """Independent oracle: sign changes of the real determinant det(A - x I), refined by brentq."""
    n = a.shape[0]

    def f(x):
        return np.real(np.linalg.det(a - x * np.eye(n)))

    xs = np.linspace(lo, hi, steps)
    fs = np.array([f(x) for x in xs])
    roots = []
    for i in np.flatnonzero(np.sign(fs[:-1]) != np.sign(fs[1:])):
        roots.append(optimize.brentq(f, xs[i], xs[i + 1], xtol=1e-14))
    return np.array(roots)


def test_identity():
    vals, vecs = jacobi_eig(np.eye(2))
    np.testing.assert_allclose(vals, [1.0, 1.0])
    np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(2), atol=1e-12)


def test_diagonal_sorted():
    vals, _ = jacobi_eig(np.diag([3.0, -1.0]))
    np.testing.assert_allclose(vals, [-1.0, 3.0])


def test_matches_determinant_oracle(rng):
    a = random_hermitian(rng, 6)
    vals, _ = jacobi_eig(a)
    bound = np.abs(a).sum(axis=1).max() + 1
    roots = det_scan_roots(a, -bound, bound)
    assert roots.size == 6
    np.testing.assert_allclose(vals, roots, atol=1e-8)


@pytest.mark.parametrize("dim", [1, 2, 3, 7, 16, 33, 64, 256])
def test_reconstruction_and_orthonormality(rng, dim):
    a = random_hermitian(rng, dim)
    vals, v = jacobi_eig(a)
    norm = np.abs(a).max()
    assert np.all(np.diff(vals) >= 0)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(dim), atol=1e-10)
    assert np.abs((v * vals) @ v.conj().T - a).max() <= 1e-9 * norm
    resid = np.linalg.norm(a @ v - v * vals, axis=0)
    assert resid.max() <= 1e-9 * np.linalg.norm(a, 2)


def test_degenerate_spectrum(rng):
    u, _ = np.linalg.qr(rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))
    d = np.array([1, 1, 1, 2, 2, 5, 5, 5], float)
    a = (u * d) @ u.conj().T
    vals, v = jacobi_eig(a)
    np.testing.assert_allclose(vals, d, atol=1e-12)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(8), atol=1e-10)


def test_agrees_with_lapack(rng):
    a = random_hermitian(rng, 40)
    np.testing.assert_allclose(hermitian_eig(a, "jacobi").values, hermitian_eig(a, "lapack").values, atol=1e-10)
    np.testing.assert_allclose(hermitian_eigvals(a, "jacobi"), hermitian_eigvals(a), atol=1e-10)


def test_round_robin_covers_every_pair_once():
    for n in (2, 5, 8, 11):
        pairs = [(p, q) for ps, qs in _round_robin(n) for p, q in zip(ps, qs)]
        assert sorted(pairs) == [(p, q) for p in range(n) for q in range(p + 1, n)]
        for ps, qs in _round_robin(n):
            idx = np.concatenate([ps, qs])
            assert idx.size == np.unique(idx).size


def test_not_hermitian():
    with pytest.raises(NotHermitian):
        jacobi_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotHermitian):
        jacobi_eig(np.ones((2, 3)))
    with pytest.raises(NotHermitian):
        jacobi_eig(np.array([[np.nan]]))


def test_entropy_examples():
    assert shannon_entropy([1, 0, 0]) == 0.0
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(np.log(2), abs=1e-15)
    assert shannon_entropy([0.5, 0.5 + 5e-10, -1e-13]) == pytest.approx(np.log(2), abs=1e-8)


def test_entropy_poisson_near_gaussian():
    from scipy import stats

    k = np.arange(200)
    p = stats.poisson.pmf(k, 4.0)
    p = p[: np.searchsorted(np.cumsum(p), 1 - 1e-12) + 1]
    p /= p.sum()
    assert shannon_entropy(p) == pytest.approx(0.5 * np.log(2 * np.pi * np.e * 4), rel=0.05)


def test_entropy_rejects_bad_vectors():
    with pytest.raises(NotNormalized):
        shannon_entropy([0.5, 0.6])
    with pytest.raises(NotNormalized):
        shannon_entropy([1.1, -0.1])
    with pytest.raises(NotNormalized):
        shannon_entropy([])


probs = st.lists(st.floats(0, 1), min_size=2, max_size=12).filter(lambda v: sum(v) > 1e-3)


@given(probs, st.floats(0, 1))
def test_entropy_concave_and_bounded(raw, lam):
    p = np.array(raw) / np.sum(raw)
    q = np.roll(p, 1)
    h = shannon_entropy(p)
    assert -1e-15 <= h <= np.log(p.size) + 1e-12
    mixed = lam * p + (1 - lam) * q
    mixed /= mixed.sum()
    assert shannon_entropy(mixed) >= lam * h + (1 - lam) * shannon_entropy(q) - 1e-12
