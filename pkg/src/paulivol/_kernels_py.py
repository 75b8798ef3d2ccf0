"""Pure numpy implementations of the hot kernels.

Every function here has a compiled twin in ``_kernels.pyx`` with the same
signature and the same results (bit-identical for the counting kernels,
within roundoff for the eigensolver).
"""
import numpy as np

MAX_SWEEPS = 30
_OFF_RTOL = 1e-15
_TINY = np.finfo(np.float64).tiny

CPTP = 0
NCP_POSITIVE = 1
NON_POSITIVE = 2


def _jacobi(a, want_vectors):
    a = np.array(a, dtype=np.complex128, copy=True)
    if a.ndim == 2:
        a = a[None]
    nb, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape).copy() if want_vectors else None
    iu = np.triu_indices(n, 1)

    for _ in range(MAX_SWEEPS):
        off = np.sum(np.abs(a[:, iu[0], iu[1]]) ** 2, axis=1)
        frob = np.sum(np.abs(a) ** 2, axis=(1, 2))
        if np.all(off <= (_OFF_RTOL ** 2) * frob):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                g = np.abs(apq)
                # below the smallest normal double, |apq| is too coarse for a unit phase
                active = g >= _TINY
                gs = np.where(active, g, 1.0)
                e = np.where(active, apq / gs, 1.0)
                ec = np.conj(e)
                with np.errstate(over="ignore"):
                    theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * gs)
                sgn = np.where(theta >= 0.0, 1.0, -1.0)
                with np.errstate(over="ignore"):
                    t = np.where(active, sgn / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # A <- A U with U = diag(1, conj(e)) @ [[c, s], [-s, c]] on (p, q)
                cp = a[:, :, p].copy()
                cq = a[:, :, q].copy()
                a[:, :, p] = c[:, None] * cp - (s * ec)[:, None] * cq
                a[:, :, q] = s[:, None] * cp + (c * ec)[:, None] * cq
                rp = a[:, p, :].copy()
                rq = a[:, q, :].copy()
                a[:, p, :] = c[:, None] * rp - (s * e)[:, None] * rq
                a[:, q, :] = s[:, None] * rp + (c * e)[:, None] * rq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                if want_vectors:
                    vp = v[:, :, p].copy()
                    vq = v[:, :, q].copy()
                    v[:, :, p] = c[:, None] * vp - (s * ec)[:, None] * vq
                    v[:, :, q] = s[:, None] * vp + (c * ec)[:, None] * vq
    w = np.real(np.diagonal(a, axis1=1, axis2=2)).copy()
    return w, v


def eigvalsh_batch(a):
    """Ascending eigenvalues of a stack of small Hermitian matrices.

    Cyclic complex Jacobi rotations; no Hermiticity check (callers do it).
    """
    w, _ = _jacobi(a, False)
    return np.sort(w, axis=1)


def eigh_batch(a):
    """Eigenvalues (ascending) and column eigenvectors of Hermitian matrices."""
    w, v = _jacobi(a, True)
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v


def pauli_spectrum(x):
    """Closed-form Choi eigenvalues (lambda_1..lambda_4, unsorted) for rows of ``x``."""
    x = np.asarray(x, dtype=np.float64)
    x1, x2, x3 = x[:, 0], x[:, 1], x[:, 2]
    out = np.empty((x.shape[0], 4))
    out[:, 0] = 0.5 * (1.0 + x1 - x2 - x3)
    out[:, 1] = 0.5 * (1.0 - x1 + x2 - x3)
    out[:, 2] = 0.5 * (1.0 - x1 - x2 + x3)
    out[:, 3] = 0.5 * (1.0 + x1 + x2 + x3)
    return out


def classify_codes(x, tol):
    x = np.asarray(x, dtype=np.float64)
    inside = np.max(np.abs(x), axis=1) <= 1.0 + tol
    cp = np.min(pauli_spectrum(x), axis=1) >= -tol
    codes = np.full(x.shape[0], NON_POSITIVE, dtype=np.int8)
    codes[inside & cp] = CPTP
    codes[inside & ~cp] = NCP_POSITIVE
    return codes


def count_regions(x, tol):
    """Return ``(n_cube, n_cp, n_ncp)`` hit counts for the rows of ``x``."""
    codes = classify_codes(x, tol)
    n_cp = int(np.count_nonzero(codes == CPTP))
    n_ncp = int(np.count_nonzero(codes == NCP_POSITIVE))
    return n_cp + n_ncp, n_cp, n_ncp


def count_strata(x, tol):
    """Return ``(vertex, edge, face)`` hit counts among CP rows of ``x``."""
    codes = classify_codes(x, tol)
    lam = pauli_spectrum(x)
    rank = np.count_nonzero(lam > tol, axis=1)
    cp = codes == CPTP
    return (
        int(np.count_nonzero(cp & (rank == 1))),
        int(np.count_nonzero(cp & (rank == 2))),
        int(np.count_nonzero(cp & (rank == 3))),
    )


def max_abs_eigenvalue(x):
    """Largest |lambda_i| over the rows of ``x`` and the first row attaining it."""
    m = np.max(np.abs(pauli_spectrum(x)), axis=1)
    i = int(np.argmax(m))
    return float(m[i]), i
