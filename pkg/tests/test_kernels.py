"""Compiled and numpy kernels must agree; both are checked against LAPACK."""
import numpy as np
import pytest

from paulivol import _backend
from paulivol._kernels_py import CPTP, NCP_POSITIVE, NON_POSITIVE

from conftest import random_hermitian


@pytest.mark.parametrize("n", [2, 3, 4])
def test_eigvalsh_matches_lapack(kernels, rng, n):
    h = random_hermitian(rng, n, 500)
    np.testing.assert_allclose(kernels.eigvalsh_batch(h), np.linalg.eigvalsh(h), atol=1e-12)


def test_eigvalsh_degenerate_and_diagonal(kernels):
    stack = np.array([np.eye(4), np.diag([1.0, 0, 0, 0]), np.zeros((4, 4)), np.diag([3.0, -1, 3, -1])])
    out = kernels.eigvalsh_batch(stack.astype(complex))
    np.testing.assert_array_equal(out, [[1, 1, 1, 1], [0, 0, 0, 1], [0, 0, 0, 0], [-1, -1, 3, 3]])


def test_eigvalsh_tiny_off_diagonal(kernels):
    a = np.diag([1.0, 1.0, 2.0, 2.0]).astype(complex)
    a[0, 1] = a[1, 0] = 1e-200
    a[2, 3], a[3, 2] = 1e-300j, -1e-300j
    np.testing.assert_allclose(kernels.eigvalsh_batch(a[None])[0], [1, 1, 2, 2], atol=1e-15)


def test_eigh_vectors(rng):
    h = random_hermitian(rng, 4, 200)
    w, v = _backend.get_kernels("python").eigh_batch(h)
    np.testing.assert_allclose(h @ v, v * w[:, None, :], atol=1e-12)
    np.testing.assert_allclose(np.conj(np.swapaxes(v, 1, 2)) @ v, np.broadcast_to(np.eye(4), h.shape), atol=1e-12)


def test_classify_codes_known_points(kernels):
    x = np.array([[0.5, 0.5, 0.5], [1, 1, -1], [2, 0, 0], [1, 1, 1], [0, 0, 0], [-1, -1, -1]], dtype=float)
    assert kernels.classify_codes(x, 1e-12).tolist() == [CPTP, NCP_POSITIVE, NON_POSITIVE, CPTP, CPTP, NCP_POSITIVE]


@pytest.mark.skipif(not _backend.COMPILED, reason="compiled kernels not built")
def test_backends_bit_identical(rng):
    c, p = _backend.get_kernels("cython"), _backend.get_kernels("python")
    x = rng.uniform(-1.1, 1.1, size=(200_000, 3))
    x[:8] = [[1, 1, 1], [1, 0, 0], [0.5, 0.5, 0], [1, -1, -1], [1, 1, -1], [0, 0, 0], [1 + 1e-13, 0, 0], [1, 1, 1.5]]
    assert np.array_equal(c.pauli_spectrum(x), p.pauli_spectrum(x))
    assert np.array_equal(c.classify_codes(x, 1e-12), p.classify_codes(x, 1e-12))
    assert c.count_regions(x, 1e-12) == p.count_regions(x, 1e-12)
    assert c.count_strata(x, 1e-12) == p.count_strata(x, 1e-12)
    assert c.max_abs_eigenvalue(x) == p.max_abs_eigenvalue(x)


def test_count_strata_detects_boundary(kernels):
    x = np.array([[1, 1, 1], [1, 0, 0], [0.5, 0.5, 0], [0.1, 0.2, 0.3], [1, 1, -1]], dtype=float)
    assert kernels.count_strata(x, 1e-12) == (1, 1, 1)


def test_max_abs_eigenvalue_first_argmax(kernels):
    x = np.array([[0, 0, 0], [1, 1, 1], [1, -1, -1]], dtype=float)
    assert kernels.max_abs_eigenvalue(x) == (2.0, 1)


@pytest.mark.parametrize("tiny", [1e-320, 3e-310 + 2e-321j, 1e-300])
def test_eigvalsh_subnormal_off_diagonal(kernels, tiny):
    # a coarse |a_pq| must not turn the phase rotation into a rescaling
    a = np.diag([0.1, 0.4, 0.2, 0.3]).astype(np.complex128)
    a[0, 2] = tiny
    a[2, 0] = np.conj(tiny)
    b = np.array([a, a + np.diag([0, 0, 0, 1e-3])])
    # the second matrix forces extra sweeps over the first
    b[1, 1, 3] = b[1, 3, 1] = 0.05
    w = kernels.eigvalsh_batch(b)
    np.testing.assert_allclose(w[0], [0.1, 0.2, 0.3, 0.4], rtol=0, atol=1e-15)
    np.testing.assert_allclose(w[1], np.linalg.eigvalsh(b[1]), atol=1e-15)
