"""Euler-angle parametrization of 4x4 density matrices.

A density matrix is written as ``U(alpha) D(theta) U(alpha)^dagger`` where
``U`` is an ordered product of twelve one-parameter subgroups generated by
generalized Gell-Mann matrices and ``D`` is a diagonal core spanned by the
Cartan generators. Sampling is uniform in the parameters over their ranges,
which is *not* the Haar measure.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from . import linalg
from ._backend import _kernels_py
from ._streams import check_seed, chunk_rng

# generator index (1-based) for each of the twelve Euler factors
EULER_SEQUENCE = (3, 2, 3, 5, 3, 10, 3, 2, 3, 5, 3, 2)

ALPHA_UPPER = tuple(math.pi if i % 2 == 0 else math.pi / 2 for i in range(12))
THETA_LOWER = (math.pi / 4, math.acos(1 / math.sqrt(3)), math.pi / 3)
THETA_UPPER = (math.pi / 2, math.pi / 2, math.pi / 2)
RANGE_ATOL = 1e-12

SAMPLING_NOTE = "uniform in Euler parameters over their ranges; not Haar-distributed"


@lru_cache(maxsize=None)
def _generators(d):
    out = []
    for k in range(1, d):
        for j in range(k):
            s = np.zeros((d, d), dtype=np.complex128)
            s[j, k] = s[k, j] = 1.0
            a = np.zeros((d, d), dtype=np.complex128)
            a[j, k] = -1j
            a[k, j] = 1j
            out += [s, a]
        diag = np.zeros(d)
        diag[:k] = 1.0
        diag[k] = -k
        out.append(np.diag(diag * math.sqrt(2.0 / (k * (k + 1)))).astype(np.complex128))
    for m in out:
        m.setflags(write=False)
    return tuple(out)


def build_generators():
    """The 15 generalized Gell-Mann matrices of SU(4), in the standard order.

    ``result[i - 1]`` is Lambda_i: Lambda_3, Lambda_8 and Lambda_15 are the
    diagonal ones, Lambda_2, Lambda_5 and Lambda_10 the imaginary generators
    coupling levels (1,2), (1,3) and (1,4). Normalized as ``tr(L_i L_j) = 2 delta_ij``.
    """
    return _generators(4)


@dataclass(frozen=True)
class EulerParameters:
    alpha: Tuple[float, ...]
    theta: Tuple[float, float, float]

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        theta = tuple(float(t) for t in self.theta)
        if len(alpha) != 12 or len(theta) != 3:
            raise ValueError(f"need 12 alpha and 3 theta angles, got {len(alpha)} and {len(theta)}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "theta", theta)

    def check_ranges(self):
        check_alpha(np.array([self.alpha]))
        check_theta(np.array([self.theta]))
        return self


@dataclass(frozen=True)
class DensityMatrix4:
    matrix: np.ndarray

    def check(self, atol=1e-12):
        m = linalg.check_hermitian(self.matrix)
        tr = np.trace(m).real
        if abs(tr - 1) > atol:
            raise ValueError(f"trace {tr} != 1")
        lo = linalg.hermitian_eigenvalues(m)[0]
        if lo < -1e-10:
            raise ValueError(f"negative eigenvalue {lo}")
        return self


def check_alpha(alpha):
    alpha = np.asarray(alpha, dtype=np.float64)
    upper = np.array(ALPHA_UPPER)
    bad = (alpha < -RANGE_ATOL) | (alpha > upper + RANGE_ATOL)
    if np.any(bad):
        row, col = np.argwhere(bad)[0]
        raise ValueError(f"alpha_{col + 1} = {alpha[row, col]} outside [0, {upper[col]}]")
    return alpha


def check_theta(theta):
    theta = np.asarray(theta, dtype=np.float64)
    lo, hi = np.array(THETA_LOWER), np.array(THETA_UPPER)
    bad = (theta < lo - RANGE_ATOL) | (theta > hi + RANGE_ATOL)
    if np.any(bad):
        row, col = np.argwhere(bad)[0]
        raise ValueError(f"theta_{col + 1} = {theta[row, col]} outside [{lo[col]}, {hi[col]}]")
    return theta


def core_diagonal_entries(theta):
    """Diagonal of the core matrix for rows of ``theta``, shape ``(N, 4)``."""
    theta = check_theta(np.atleast_2d(theta))
    a2, b2, c2 = (np.sin(theta[:, i]) ** 2 for i in range(3))
    g = build_generators()
    coef3 = 0.5 * (-1 + 2 * a2) * b2 * c2
    coef8 = (-2 + 3 * b2) * c2 / (2 * math.sqrt(3))
    coef15 = (-3 + 4 * c2) / (2 * math.sqrt(6))
    d3, d8, d15 = (np.diag(g[i - 1]).real for i in (3, 8, 15))
    return 0.25 + coef3[:, None] * d3 + coef8[:, None] * d8 + coef15[:, None] * d15


def core_diagonal(theta):
    """``1/4 + c3 L3 + c8 L8 + c15 L15`` with coefficients set by the three theta angles."""
    return np.diag(core_diagonal_entries(np.asarray(theta, dtype=np.float64))[0]).astype(np.complex128)


@lru_cache(maxsize=None)
def _factor_eigh():
    g = build_generators()
    out = {}
    for idx in set(EULER_SEQUENCE):
        w, v = _kernels_py.eigh_batch(g[idx - 1][None])
        out[idx] = (w[0], v[0])
    return out


def euler_unitary_batch(alpha):
    """Ordered product of the twelve generator exponentials for rows of ``alpha``."""
    alpha = check_alpha(np.atleast_2d(alpha))
    eig = _factor_eigh()
    u = np.broadcast_to(np.eye(4, dtype=np.complex128), (alpha.shape[0], 4, 4)).copy()
    for k, idx in enumerate(EULER_SEQUENCE):
        w, v = eig[idx]
        # I + V (e^{i a w} - 1) V^dagger is exactly I at a = 0
        phases = np.expm1(1j * alpha[:, k, None] * w[None, :])
        factor = np.eye(4) + np.einsum("ij,nj,kj->nik", v, phases, v.conj())
        u = u @ factor
    return u


def density_from_euler_batch(alpha, theta):
    """Density matrices ``U D U^dagger`` for rows of ``alpha`` (N, 12) and ``theta`` (N, 3)."""
    alpha = np.atleast_2d(np.asarray(alpha, dtype=np.float64))
    theta = np.atleast_2d(np.asarray(theta, dtype=np.float64))
    if alpha.shape[0] != theta.shape[0]:
        raise ValueError("alpha and theta batch sizes differ")
    u = euler_unitary_batch(alpha)
    d = core_diagonal_entries(theta)
    return (u * d[:, None, :]) @ np.conj(np.swapaxes(u, 1, 2))


def density_from_euler(p):
    rho = density_from_euler_batch(np.array([p.alpha]), np.array([p.theta]))[0]
    return DensityMatrix4(rho)


def sample_euler_batch(seed, count):
    """``count`` parameter sets uniform over their ranges; returns ``(alpha, theta)`` arrays."""
    rng = chunk_rng(check_seed(seed), 0)
    u = rng.random((count, 15))
    alpha = u[:, :12] * np.array(ALPHA_UPPER)
    lo, hi = np.array(THETA_LOWER), np.array(THETA_UPPER)
    theta = lo + u[:, 12:] * (hi - lo)
    return alpha, theta


def sample_euler(seed):
    alpha, theta = sample_euler_batch(seed, 1)
    return EulerParameters(tuple(alpha[0]), tuple(theta[0]))


def choi_candidate_from_density(rho, atol=1e-9):
    """Read ``2 * rho`` as a Choi matrix and test trace preservation and unitality.

    Returns:
        ``(choi, trace_preserving, unital)``.
    """
    m = rho.matrix if isinstance(rho, DensityMatrix4) else np.asarray(rho, dtype=np.complex128)
    choi = 2 * m
    tp = np.allclose(linalg.partial_trace(choi, "second"), np.eye(2), rtol=0, atol=atol)
    unital = np.allclose(linalg.partial_trace(choi, "first"), np.eye(2), rtol=0, atol=atol)
    return choi, bool(tp), bool(unital)
