import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasebounds import spectra
from phasebounds.errors import SizeExceeded
from phasebounds.spectra import composite_sum, jz, jz_pow, kron_index, multipass, n_jz, number_function, roy_a, roy_h, summarize

SX = np.array([[0, 1], [1, 0]], complex)
SY = np.array([[0, -1j], [1j, 0]])


def brute_jz(n):
    """sigma_z sum built from Kronecker products (qubit 0 least significant)."""
    sz = np.diag([1.0, -1.0])
    total = np.zeros((2**n, 2**n))
    for j in range(n):
        ops = [np.eye(2)] * n
        ops[j] = sz
        term = ops[n - 1]
        for op in reversed(ops[: n - 1]):
            term = np.kron(term, op)
        total += term
    return np.diag(total)


def test_jz_small():
    np.testing.assert_array_equal(jz(2).eigenvalues, [2, 0, 0, -2])
    assert summarize(jz(5)).distinct_count == 6
    assert summarize(jz(3)).gap == 6


@pytest.mark.parametrize("n", range(1, 7))
def test_jz_matches_kronecker_sum(n):
    np.testing.assert_array_equal(jz(n).eigenvalues, brute_jz(n))


def test_jz_pow_examples():
    np.testing.assert_array_equal(jz_pow(2, 2).eigenvalues, [4, 0, 0, 4])
    np.testing.assert_array_equal(jz_pow(2, 2).distinct_values, [0, 4])
    ev = jz_pow(3, 2).distinct_values
    assert ev[ev > 0].min() == 1
    np.testing.assert_array_equal(jz_pow(2, 3).eigenvalues, [8, 0, 0, -8])


def test_jz_pow_is_elementwise_power():
    for n, q in itertools.product(range(1, 11), range(1, 5)):
        np.testing.assert_array_equal(jz_pow(n, q).eigenvalues, jz(n).eigenvalues ** q)


def test_n_jz():
    np.testing.assert_array_equal(n_jz(2).eigenvalues, [4, 0, 0, -4])
    assert summarize(n_jz(3)).gap == 18
    assert summarize(n_jz(4)).distinct_count == 5


def test_roy_spectrum():
    s = summarize(roy_h(3))
    assert s.multiplicities == {-4: 1, 0: 6, 4: 1}
    for n in range(2, 13):
        for g in (roy_h(n), roy_a(n)):
            np.testing.assert_array_equal(g.distinct_values, [-(2 ** (n - 1)), 0, 2 ** (n - 1)])


def roy_pair_dense(n):
    """H and A from the defining tensor product (sx + i sy)^(x)n = H + iA."""
    lower = SX + 1j * SY
    t = lower
    for _ in range(n - 1):
        t = np.kron(t, lower)
    return (t + t.conj().T) / 2, (t - t.conj().T) / 2j


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_roy_spectra_match_tensor_definition(n):
    h, a = roy_pair_dense(n)
    np.testing.assert_allclose(np.linalg.eigvalsh(h), np.sort(roy_h(n).eigenvalues), atol=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(a), np.sort(roy_a(n).eigenvalues), atol=1e-12)


def test_roy_h_small_matrices():
    np.testing.assert_allclose(roy_h(1).matrix(), SX, atol=1e-15)
    m = np.zeros((4, 4))
    m[0, 3] = m[3, 0] = 2
    np.testing.assert_allclose(roy_h(2).matrix(), m, atol=1e-15)
    v = roy_a(3).eigenvector(0)
    np.testing.assert_allclose(v[[0, 7]], [2**-0.5, 1j * 2**-0.5])


def test_number_function():
    np.testing.assert_array_equal(number_function(4, "identity").eigenvalues, np.arange(5))
    np.testing.assert_array_equal(number_function(3, lambda k: k**2).eigenvalues, [0, 1, 4, 9])
    assert summarize(number_function(5, "const")).distinct_count == 1
    np.testing.assert_array_equal(number_function(2, [0.5, 1.5, 0.5]).distinct_values, [0.5, 1.5])


def test_composite_sum_examples():
    np.testing.assert_array_equal(composite_sum([jz(1), jz(1)]).eigenvalues, [2, 0, 0, -2])
    ev = multipass(3).eigenvalues
    assert sorted(ev) == list(range(8))


def test_composite_sum_little_endian():
    a = spectra.SpectralGenerator(np.array([0.0, 1.0, 2.0]))
    b = spectra.SpectralGenerator(np.array([0.0, 10.0]))
    g = composite_sum([a, b])
    for da, db in itertools.product(range(3), range(2)):
        assert g.eigenvalues[kron_index([da, db], [3, 2])] == a.eigenvalues[da] + b.eigenvalues[db]


def test_quadratic_pair_brute_force():
    g = composite_sum([jz_pow(1, 2), jz_pow(2, 2)])
    brute = {x + y for x in jz_pow(1, 2).eigenvalues for y in jz_pow(2, 2).eigenvalues}
    assert set(g.distinct_values) == brute == {1.0, 5.0}


def test_composite_explicit_basis_is_unitary():
    g = composite_sum([roy_h(2), jz(1)])
    v = g.basis.toarray()
    np.testing.assert_allclose(v.conj().T @ v, np.eye(8), atol=1e-12)
    dense = g.matrix()
    expect = np.kron(np.eye(2), roy_h(2).matrix()) + np.kron(np.diag([1.0, -1.0]), np.eye(4))
    np.testing.assert_allclose(dense, expect, atol=1e-12)


def test_size_limits():
    with pytest.raises(SizeExceeded):
        jz(21)
    with pytest.raises(SizeExceeded):
        composite_sum([jz(11), jz(10)])


def test_grouping_tolerance():
    g = spectra.SpectralGenerator(np.array([0.1, 0.1 + 1e-12, 0.3]))
    assert summarize(g).distinct_count == 2
    g = spectra.SpectralGenerator(np.array([1.0, 1.0 + 1e-11, 2.0]))
    assert g.integer_valued and g.distinct_values.tolist() == [1.0, 2.0]


@given(st.lists(st.integers(1, 4), min_size=1, max_size=4))
def test_composite_extremes_are_sums(sizes):
    parts = [jz(k) for k in sizes]
    g = composite_sum(parts)
    assert g.eigenvalues.max() == sum(p.eigenvalues.max() for p in parts)
    assert g.eigenvalues.min() == sum(p.eigenvalues.min() for p in parts)


@given(st.integers(1, 10))
def test_jz_distinct_count(n):
    assert summarize(jz(n)).distinct_count == n + 1
