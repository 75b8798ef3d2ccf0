"""Dense complex linear algebra for 2x2, 3x3 and 4x4 matrices.

Matrices are plain ``numpy`` complex128 arrays. The eigensolver is a cyclic
Jacobi iteration (see ``_kernels``), which is exact to a few ulps at these
sizes and needs no LAPACK call.
"""
from functools import lru_cache

import numpy as np

from ._backend import kernels, _kernels_py

HERMITIAN_ATOL = 1e-10
MAX_DIM = 4

IDENTITY_2 = np.eye(2, dtype=np.complex128)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (SIGMA_1, SIGMA_2, SIGMA_3)


class NotHermitianError(ValueError):
    """Raised when a matrix is further than ``HERMITIAN_ATOL`` from Hermitian.

    ``index`` holds the (row, column) of the worst offending entry.
    """

    def __init__(self, index, asymmetry):
        self.index = index
        self.asymmetry = asymmetry
        super().__init__(
            f"matrix is not Hermitian: |M[{index[0]},{index[1]}] - conj(M[{index[1]},{index[0]}])| "
            f"= {asymmetry:.3e} > {HERMITIAN_ATOL:g}"
        )


def as_matrix(m):
    """Coerce ``m`` to a square complex128 array of dimension 2, 3 or 4."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (2, 3, MAX_DIM):
        raise ValueError(f"expected a square matrix of dimension 2, 3 or 4, got shape {a.shape}")
    return a


def check_hermitian(m, atol=HERMITIAN_ATOL):
    """Return the symmetrized ``(M + M^dagger)/2`` or raise :class:`NotHermitianError`."""
    a = np.asarray(m, dtype=np.complex128)
    diff = np.abs(a - a.conj().swapaxes(-1, -2))
    worst = float(diff.max()) if diff.size else 0.0
    if worst > atol:
        idx = np.unravel_index(int(np.argmax(diff)), diff.shape)[-2:]
        raise NotHermitianError(tuple(int(i) for i in idx), worst)
    return 0.5 * (a + a.conj().swapaxes(-1, -2))


def hermitian_eigenvalues(m):
    """Eigenvalues of a Hermitian matrix, sorted ascending.

    Args:
        m: 2x2, 3x3 or 4x4 Hermitian matrix.

    Returns:
        1-D float array of length ``dim``.

    Raises:
        NotHermitianError: if the input is not Hermitian within 1e-10.
    """
    h = check_hermitian(as_matrix(m))
    return kernels.eigvalsh_batch(h[None])[0]


def hermitian_eigenvalues_batch(ms):
    """Vectorized :func:`hermitian_eigenvalues` over a stack of shape ``(N, d, d)``."""
    a = np.asarray(ms, dtype=np.complex128)
    if a.ndim != 3 or a.shape[1] != a.shape[2] or a.shape[1] > MAX_DIM:
        raise ValueError(f"expected a stack of square matrices with dim <= 4, got shape {a.shape}")
    return kernels.eigvalsh_batch(check_hermitian(a))


def hermitian_eigh(m):
    """Ascending eigenvalues and column eigenvectors of a Hermitian matrix."""
    h = check_hermitian(as_matrix(m))
    w, v = _kernels_py.eigh_batch(h[None])
    return w[0], v[0]


def generator_exponential(h, angle):
    """Return ``exp(i * angle * H)`` for Hermitian ``H``.

    Built from the eigendecomposition of ``H``: ``V diag(e^{i angle w}) V^dagger``.
    """
    w, v = _eigh_cached(_freeze(check_hermitian(as_matrix(h))))
    return (v * np.exp(1j * angle * w)) @ v.conj().T


def _freeze(a):
    return a.shape[0], tuple(a.ravel().tolist())


@lru_cache(maxsize=64)
def _eigh_cached(frozen):
    n, flat = frozen
    a = np.array(flat, dtype=np.complex128).reshape(n, n)
    w, v = _kernels_py.eigh_batch(a[None])
    w, v = w[0], v[0]
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def kronecker(a, b):
    """Kronecker product ``A (x) B``; the result may not exceed 4x4."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("kronecker expects two matrices")
    if a.shape[0] * b.shape[0] > MAX_DIM or a.shape[1] * b.shape[1] > MAX_DIM:
        raise ValueError(
            f"kronecker result {a.shape[0] * b.shape[0]}x{a.shape[1] * b.shape[1]} exceeds 4x4"
        )
    return np.kron(a, b)


def partial_trace(m, subsystem):
    """Trace out one qubit factor of a 4x4 matrix.

    Args:
        m: 4x4 matrix on C^2 (x) C^2.
        subsystem: ``"first"`` or ``"second"``, the factor to remove.

    Returns:
        The reduced 2x2 matrix.
    """
    a = np.asarray(m, dtype=np.complex128)
    if a.shape[-2:] != (4, 4):
        raise ValueError(f"partial_trace expects a 4x4 matrix, got shape {a.shape}")
    t = a.reshape(a.shape[:-2] + (2, 2, 2, 2))
    if subsystem == "second":
        return np.einsum("...ijkj->...ik", t)
    if subsystem == "first":
        return np.einsum("...ijil->...jl", t)
    raise ValueError(f"subsystem must be 'first' or 'second', got {subsystem!r}")


def is_unitary(u, atol=1e-10):
    u = np.asarray(u, dtype=np.complex128)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u @ u.conj().T, np.eye(u.shape[0]), rtol=0.0, atol=atol
    )
