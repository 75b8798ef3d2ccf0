import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paulivol import channels, linalg, su4
from paulivol.channels import PauliChannel


def test_generator_examples():
    g = su4.build_generators()
    assert len(g) == 15
    assert np.trace(g[2] @ g[2]).real == pytest.approx(2, abs=1e-12)
    np.testing.assert_allclose(g[7], np.diag([1, 1, -2, 0]) / math.sqrt(3), atol=1e-15)
    np.testing.assert_allclose(g[14], np.diag([1, 1, 1, -3]) / math.sqrt(6), atol=1e-15)
    np.testing.assert_array_equal(g[2], np.diag([1, -1, 0, 0]))
    assert abs(np.trace(g[2] @ g[7])) <= 1e-12


def test_generator_algebra():
    g = np.array(su4.build_generators())
    gram = np.einsum("aij,bji->ab", g, g)
    np.testing.assert_allclose(gram, 2 * np.eye(15), atol=1e-12)
    for m in g:
        np.testing.assert_array_equal(m, m.conj().T)
        assert abs(np.trace(m)) <= 1e-12


@pytest.mark.parametrize("index,levels", [(2, (0, 1)), (5, (0, 2)), (10, (0, 3))])
def test_imaginary_generators_couple_expected_levels(index, levels):
    m = su4.build_generators()[index - 1]
    nz = {tuple(sorted(ij)) for ij in zip(*np.nonzero(m))}
    assert nz == {levels}
    assert m.real.any() == False  # noqa: E712
    i, j = levels
    assert m[i, j] == -1j and m[j, i] == 1j


def test_exponential_of_lambda3():
    out = linalg.generator_exponential(su4.build_generators()[2], math.pi / 2)
    np.testing.assert_allclose(out, np.diag([1j, -1j, 1, 1]), atol=1e-15)


def test_core_diagonal_examples():
    np.testing.assert_allclose(su4.core_diagonal((math.pi / 2,) * 3), np.diag([1, 0, 0, 0]), atol=1e-12)
    lo = su4.core_diagonal(su4.THETA_LOWER)
    np.testing.assert_allclose(lo, np.eye(4) / 4, atol=1e-15)
    with pytest.raises(ValueError, match="theta_1"):
        su4.core_diagonal((0.1, math.pi / 2, math.pi / 2))


def test_core_diagonal_matches_hand_formula():
    rng = np.random.default_rng(3)
    lo, hi = np.array(su4.THETA_LOWER), np.array(su4.THETA_UPPER)
    theta = lo + rng.random((500, 3)) * (hi - lo)
    a2, b2, c2 = (np.sin(theta[:, i]) ** 2 for i in range(3))
    # expanded diagonal entries of the core, written out per level
    c3 = 0.5 * (2 * a2 - 1) * b2 * c2
    c8 = (3 * b2 - 2) * c2 / (2 * math.sqrt(3))
    c15 = (4 * c2 - 3) / (2 * math.sqrt(6))
    expect = np.stack(
        [
            0.25 + c3 + c8 / math.sqrt(3) + c15 / math.sqrt(6),
            0.25 - c3 + c8 / math.sqrt(3) + c15 / math.sqrt(6),
            0.25 - 2 * c8 / math.sqrt(3) + c15 / math.sqrt(6),
            0.25 - 3 * c15 / math.sqrt(6),
        ],
        axis=1,
    )
    np.testing.assert_allclose(su4.core_diagonal_entries(theta), expect, atol=1e-15)


def test_core_diagonal_sorted_on_grid():
    grids = [np.linspace(lo, hi, 21) for lo, hi in zip(su4.THETA_LOWER, su4.THETA_UPPER)]
    theta = np.array(list(itertools.product(*grids)))
    d = su4.core_diagonal_entries(theta)
    # all three coefficients are non-negative in range, so level 1 dominates
    assert np.all(d[:, :1] >= d - 1e-15)
    assert np.all(d >= -1e-15)
    np.testing.assert_allclose(d.sum(axis=1), 1, atol=1e-14)


def test_core_diagonal_not_monotone_in_general():
    # a^2 = 1, b^2 = 2/3, c^2 = 1 by hand: coefficients 1/3, 0, 1/(2 sqrt 6)
    d = su4.core_diagonal_entries((math.pi / 2, su4.THETA_LOWER[1], math.pi / 2))[0]
    np.testing.assert_allclose(d, [2 / 3, 0, 1 / 3, 0], atol=1e-15)


def test_zero_alpha_gives_core():
    theta = (1.0, 1.2, 1.3)
    rho = su4.density_from_euler(su4.EulerParameters((0.0,) * 12, theta))
    np.testing.assert_allclose(rho.matrix, su4.core_diagonal(theta), atol=1e-15)
    corner = su4.density_from_euler(su4.EulerParameters((0.0,) * 12, (math.pi / 2,) * 3))
    np.testing.assert_allclose(corner.matrix, np.diag([1, 0, 0, 0]), atol=1e-12)


def unitary_by_expm(alpha):
    """Independent oracle: product of scipy matrix exponentials."""
    from scipy.linalg import expm

    g = su4.build_generators()
    u = np.eye(4, dtype=complex)
    for a, idx in zip(alpha, su4.EULER_SEQUENCE):
        u = u @ expm(1j * a * g[idx - 1])
    return u


def test_euler_unitary_matches_expm():
    alpha, _ = su4.sample_euler_batch(5, 50)
    u = su4.euler_unitary_batch(alpha)
    for a, m in zip(alpha, u):
        np.testing.assert_allclose(m, unitary_by_expm(a), atol=1e-12)


def test_euler_product_unitary():
    alpha, _ = su4.sample_euler_batch(11, 1000)
    u = su4.euler_unitary_batch(alpha)
    np.testing.assert_allclose(u @ np.conj(np.swapaxes(u, 1, 2)), np.broadcast_to(np.eye(4), u.shape), atol=1e-10)


def test_spectrum_preserved_and_valid():
    alpha, theta = su4.sample_euler_batch(9, 10_000)
    rho = su4.density_from_euler_batch(alpha, theta)
    np.testing.assert_array_less(np.abs(rho - np.conj(np.swapaxes(rho, 1, 2))).max(), 1e-14)
    np.testing.assert_allclose(np.trace(rho, axis1=1, axis2=2), 1, atol=1e-12)
    w = np.linalg.eigvalsh(rho)
    assert w.min() >= -1e-10
    np.testing.assert_allclose(w, np.sort(su4.core_diagonal_entries(theta), axis=1), atol=1e-10)


def test_density_check():
    p = su4.sample_euler(4)
    su4.density_from_euler(p).check()
    with pytest.raises(ValueError):
        su4.DensityMatrix4(np.diag([1.0, 1.0, 0, 0]).astype(complex)).check()
    with pytest.raises(ValueError):
        su4.DensityMatrix4(np.diag([1.5, 0, 0, -0.5]).astype(complex)).check()


def test_out_of_range_rejected():
    with pytest.raises(ValueError, match="alpha_2"):
        su4.density_from_euler(su4.EulerParameters((0.0, 2.0) + (0.0,) * 10, (math.pi / 2,) * 3))
    with pytest.raises(ValueError):
        su4.EulerParameters((0.0,) * 11, (1.0, 1.0, 1.0))
    # boundaries themselves are in range
    su4.EulerParameters(su4.ALPHA_UPPER, su4.THETA_LOWER).check_ranges()


def test_sampler_determinism_and_ranges():
    assert su4.sample_euler(17) == su4.sample_euler(17)
    assert su4.sample_euler(17) != su4.sample_euler(18)
    alpha, theta = su4.sample_euler_batch(1, 10_000)
    su4.check_alpha(alpha)
    su4.check_theta(theta)
    mean = alpha[:, 0].mean()
    se = math.pi / math.sqrt(12) / math.sqrt(len(alpha))
    assert abs(mean - math.pi / 2) <= 3 * se


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_random_density_valid(seed):
    su4.density_from_euler(su4.sample_euler(seed)).check()


def test_choi_candidate_examples():
    choi, tp, unital = su4.choi_candidate_from_density(su4.DensityMatrix4(np.eye(4, dtype=complex) / 4))
    np.testing.assert_array_equal(choi, np.eye(4) / 2)
    assert tp and unital
    choi, tp, unital = su4.choi_candidate_from_density(np.diag([1, 0, 0, 0]).astype(complex))
    np.testing.assert_array_equal(choi, np.diag([2, 0, 0, 0]))
    assert not tp
    np.testing.assert_array_equal(linalg.partial_trace(choi, "second"), np.diag([2, 0]))
    b = channels.choi_from_pauli(PauliChannel((0.5, 0.25, 0.125)))
    _, tp, unital = su4.choi_candidate_from_density(b / 2)
    assert tp and unital
