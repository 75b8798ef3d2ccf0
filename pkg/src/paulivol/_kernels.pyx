# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``_kernels_py`` function for function."""
import numpy as np
cimport numpy as cnp
from libc.float cimport DBL_MIN
from libc.math cimport fabs, sqrt, hypot

cnp.import_array()

DEF MAX_N = 4
cdef int MAX_SWEEPS = 30
cdef double OFF_RTOL = 1e-15

CPTP = 0
NCP_POSITIVE = 1
NON_POSITIVE = 2


cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double creal(double complex)
    double complex conj(double complex)


cdef void _jacobi_one(double complex[:, :] a, double[:] w, int n) noexcept nogil:
    cdef double complex m[MAX_N][MAX_N]
    cdef double complex apq, e, ec, xp, xq
    cdef double g, theta, t, c, s, off, frob, sgn, tmp
    cdef int i, j, p, q, k, sweep

    for i in range(n):
        for j in range(n):
            m[i][j] = a[i, j]

    for sweep in range(MAX_SWEEPS):
        off = 0.0
        frob = 0.0
        for i in range(n):
            for j in range(n):
                tmp = cabs(m[i][j])
                frob += tmp * tmp
                if j > i:
                    off += tmp * tmp
        if off <= OFF_RTOL * OFF_RTOL * frob:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p][q]
                g = cabs(apq)
                if g < DBL_MIN:
                    # too small for a unit phase; treat as an exact zero
                    m[p][q] = 0.0
                    m[q][p] = 0.0
                    continue
                e = apq / g
                ec = conj(e)
                theta = (creal(m[q][q]) - creal(m[p][p])) / (2.0 * g)
                sgn = 1.0 if theta >= 0.0 else -1.0
                t = sgn / (fabs(theta) + hypot(theta, 1.0))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    xp = m[k][p]
                    xq = m[k][q]
                    m[k][p] = c * xp - (s * ec) * xq
                    m[k][q] = s * xp + (c * ec) * xq
                for k in range(n):
                    xp = m[p][k]
                    xq = m[q][k]
                    m[p][k] = c * xp - (s * e) * xq
                    m[q][k] = s * xp + (c * e) * xq
                m[p][q] = 0.0
                m[q][p] = 0.0

    for i in range(n):
        w[i] = creal(m[i][i])
    # insertion sort, n <= 4
    for i in range(1, n):
        tmp = w[i]
        j = i - 1
        while j >= 0 and w[j] > tmp:
            w[j + 1] = w[j]
            j -= 1
        w[j + 1] = tmp


def eigvalsh_batch(a):
    """Ascending eigenvalues of a stack of small Hermitian matrices (n <= 4)."""
    arr = np.ascontiguousarray(a, dtype=np.complex128)
    if arr.ndim == 2:
        arr = arr[None]
    cdef Py_ssize_t nb = arr.shape[0]
    cdef int n = arr.shape[1]
    if n > MAX_N or arr.shape[2] != n:
        raise ValueError(f"compiled eigensolver supports square n <= {MAX_N}, got {arr.shape[1:]}")
    out = np.empty((nb, n), dtype=np.float64)
    cdef double complex[:, :, :] av = arr
    cdef double[:, :] ov = out
    cdef Py_ssize_t b
    with nogil:
        for b in range(nb):
            _jacobi_one(av[b], ov[b], n)
    return out


def eigh_batch(a):
    from . import _kernels_py
    return _kernels_py.eigh_batch(a)


cdef inline void _spectrum(double x1, double x2, double x3, double* lam) noexcept nogil:
    lam[0] = 0.5 * (1.0 + x1 - x2 - x3)
    lam[1] = 0.5 * (1.0 - x1 + x2 - x3)
    lam[2] = 0.5 * (1.0 - x1 - x2 + x3)
    lam[3] = 0.5 * (1.0 + x1 + x2 + x3)


cdef inline int _code(double x1, double x2, double x3, double tol, double* lam) noexcept nogil:
    cdef double mx = fabs(x1)
    cdef double mn
    cdef int k
    if fabs(x2) > mx:
        mx = fabs(x2)
    if fabs(x3) > mx:
        mx = fabs(x3)
    _spectrum(x1, x2, x3, lam)
    if not (mx <= 1.0 + tol):
        return 2
    mn = lam[0]
    for k in range(1, 4):
        if lam[k] < mn:
            mn = lam[k]
    if mn >= -tol:
        return 0
    return 1


def pauli_spectrum(x):
    """Closed-form Choi eigenvalues (lambda_1..lambda_4, unsorted) for rows of ``x``."""
    cdef double[:, :] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty((xv.shape[0], 4), dtype=np.float64)
    cdef double[:, :] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            _spectrum(xv[i, 0], xv[i, 1], xv[i, 2], &ov[i, 0])
    return out


def classify_codes(x, double tol):
    cdef double[:, :] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(xv.shape[0], dtype=np.int8)
    cdef signed char[:] ov = out
    cdef double lam[4]
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = <signed char>_code(xv[i, 0], xv[i, 1], xv[i, 2], tol, lam)
    return out


def count_regions(x, double tol):
    """Return ``(n_cube, n_cp, n_ncp)`` hit counts for the rows of ``x``."""
    cdef double[:, :] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double lam[4]
    cdef Py_ssize_t i, n_cp = 0, n_ncp = 0
    cdef int code
    with nogil:
        for i in range(xv.shape[0]):
            code = _code(xv[i, 0], xv[i, 1], xv[i, 2], tol, lam)
            if code == 0:
                n_cp += 1
            elif code == 1:
                n_ncp += 1
    return int(n_cp + n_ncp), int(n_cp), int(n_ncp)


def count_strata(x, double tol):
    """Return ``(vertex, edge, face)`` hit counts among CP rows of ``x``."""
    cdef double[:, :] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double lam[4]
    cdef Py_ssize_t i
    cdef Py_ssize_t hits[5]
    cdef int code, k, rank
    for k in range(5):
        hits[k] = 0
    with nogil:
        for i in range(xv.shape[0]):
            code = _code(xv[i, 0], xv[i, 1], xv[i, 2], tol, lam)
            if code != 0:
                continue
            rank = 0
            for k in range(4):
                if lam[k] > tol:
                    rank += 1
            hits[rank] += 1
    return int(hits[1]), int(hits[2]), int(hits[3])


def max_abs_eigenvalue(x):
    """Largest |lambda_i| over the rows of ``x`` and the first row attaining it."""
    cdef double[:, :] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double lam[4]
    cdef double best = -1.0, v
    cdef Py_ssize_t i, arg = 0
    cdef int k
    with nogil:
        for i in range(xv.shape[0]):
            _spectrum(xv[i, 0], xv[i, 1], xv[i, 2], lam)
            for k in range(4):
                v = fabs(lam[k])
                if v > best:
                    best = v
                    arg = i
    return float(best), int(arg)
