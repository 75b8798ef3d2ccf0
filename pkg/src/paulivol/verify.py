"""Property suites run by ``paulivol verify``.

Each check returns a record ``{"suite", "name", "passed", "observed"}``.
Everything is a deterministic function of ``(samples, seed)``.
"""
import math

import numpy as np

from . import channels, linalg, su4, volume
from ._backend import kernels
from ._streams import chunk_rng
from .channels import DEFAULT_TOL, PauliChannel

SUITES = ("spectrum", "bounds", "volume", "su4")
_STREAM_BASE = 10_000


def _rng(seed, k):
    return chunk_rng(seed, _STREAM_BASE + k)


def _record(suite, name, passed, **observed):
    return {"suite": suite, "name": name, "passed": bool(passed), "observed": observed}


def random_unitaries(rng, n):
    """Haar-random 2x2 unitaries via QR of complex Gaussian matrices."""
    z = (rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def affine_choi_batch(x, t):
    b = channels.choi_from_pauli_batch(x).astype(np.complex128)
    t1, t2, t3 = t[:, 0], t[:, 1], t[:, 2]
    for i, s in ((0, 1), (1, -1), (2, 1), (3, -1)):
        b[:, i, i] += 0.5 * s * t3
    tm = 0.5 * (t1 - 1j * t2)
    b[:, 0, 1] = b[:, 2, 3] = tm
    b[:, 1, 0] = b[:, 3, 2] = np.conj(tm)
    return b


def check_spectrum(samples, seed, workers=1):
    out = []
    x = _rng(seed, 0).uniform(-1, 1, size=(samples, 3))
    closed = np.sort(kernels.pauli_spectrum(x), axis=1)
    numeric = linalg.hermitian_eigenvalues_batch(channels.choi_from_pauli_batch(x))
    diff = float(np.max(np.abs(closed - numeric)))
    out.append(_record("spectrum", "closed_form_vs_eigensolver", diff <= 1e-10, max_abs_diff=diff, n=samples))

    rng = _rng(seed, 1)
    xa = rng.uniform(-1, 1, size=(samples, 3))
    ta = rng.uniform(-1, 1, size=(samples, 3))
    b = affine_choi_batch(xa, ta)
    tr_dev = float(np.max(np.abs(np.trace(b, axis1=1, axis2=2) - 2)))
    out.append(_record("spectrum", "choi_trace_is_two", tr_dev <= 1e-12, max_trace_deviation=tr_dev))

    eye = np.eye(2)
    tp_dev = float(np.max(np.abs(linalg.partial_trace(b, "second") - eye)))
    unital_dev = float(np.max(np.abs(linalg.partial_trace(channels.choi_from_pauli_batch(xa), "first") - eye)))
    nonunital_dev = np.max(np.abs(linalg.partial_trace(b, "first") - eye), axis=(1, 2))
    t_norm = np.max(np.abs(ta), axis=1)
    nonunital_ok = bool(np.all(nonunital_dev[t_norm > 0] > 0))
    out.append(
        _record(
            "spectrum",
            "trace_preserving_and_unital_iff_t_zero",
            tp_dev <= 1e-15 and unital_dev <= 1e-15 and nonunital_ok,
            max_tr2_deviation=tp_dev,
            max_tr1_deviation_unital=unital_dev,
            min_tr1_deviation_nonunital=float(np.min(nonunital_dev)),
        )
    )

    x = _rng(seed, 2).uniform(-1, 1, size=(samples, 3))
    eig_cp = np.min(kernels.pauli_spectrum(x), axis=1) >= -DEFAULT_TOL
    x1, x2, x3 = x.T
    ineq_cp = (np.abs(1 + x3) - np.abs(x1 + x2) >= -2 * DEFAULT_TOL) & (
        np.abs(1 - x3) - np.abs(x1 - x2) >= -2 * DEFAULT_TOL
    )
    disagree = int(np.count_nonzero(eig_cp != ineq_cp))
    out.append(
        _record(
            "spectrum",
            "cp_inequalities_match_eigenvalue_sign",
            disagree == 0,
            disagreements=disagree,
            cp_fraction=float(np.mean(eig_cp)),
        )
    )
    return out


def check_bounds(samples, seed, workers=1):
    out = []
    best, arg = volume.bound_scan(samples, seed, workers=workers)
    at_vertex = tuple(int(v) for v in arg.x) in volume.TETRAHEDRON_VERTICES
    out.append(
        _record(
            "bounds",
            "choi_eigenvalues_bounded_by_two",
            best == 2.0 and at_vertex,
            max_abs_eigenvalue=best,
            argmax=list(arg.x),
        )
    )

    x = _rng(seed, 3).uniform(-1, 1, size=(samples, 3))
    det = x[:, 0] * x[:, 1] * x[:, 2]
    violations = int(np.count_nonzero(np.abs(det) > 1))
    out.append(
        _record(
            "bounds",
            "det_T_in_unit_interval",
            violations == 0,
            violations=violations,
            min_det=float(det.min()),
            max_det=float(det.max()),
        )
    )

    n3 = min(samples, 10_000)
    x = _rng(seed, 4).uniform(-1, 1, size=(n3, 3))
    base = np.sort(kernels.pauli_spectrum(x), axis=1)
    worst = 0.0
    for k in (1, 2, 3):
        flip = -np.ones(3)
        flip[k - 1] = 1
        worst = max(worst, float(np.max(np.abs(np.sort(kernels.pauli_spectrum(x * flip), axis=1) - base))))
    out.append(_record("bounds", "pauli_postcompose_permutes_spectrum", worst == 0.0, max_abs_diff=worst, n=n3))

    nu = min(samples, 1000)
    rng = _rng(seed, 5)
    x = rng.uniform(-1, 1, size=(nu, 3))
    us = random_unitaries(rng, nu)
    bs = channels.choi_from_pauli_batch(x)
    iu = np.einsum("ij,nkl->nikjl", np.eye(2), us).reshape(nu, 4, 4)
    conj = iu @ bs @ np.conj(np.swapaxes(iu, 1, 2))
    d = float(
        np.max(np.abs(linalg.hermitian_eigenvalues_batch(conj) - np.sort(kernels.pauli_spectrum(x), axis=1)))
    )
    out.append(_record("bounds", "unitary_conjugation_preserves_spectrum", d <= 1e-10, max_abs_diff=d, n=nu))

    vertices = []
    for c in volume.cube_corners():
        p = PauliChannel(tuple(c))
        if channels.classify_pauli(p).label is channels.Label.CPTP:
            if channels.kraus_stratum(p).stratum is channels.Stratum.VERTEX:
                vertices.append(tuple(int(v) for v in c))
    x = volume.sample_points(volume.CP_TETRAHEDRON, seed, min(samples, 10_000), workers=workers)
    lam = kernels.pauli_spectrum(x)
    rank_ok = bool(
        np.all(np.count_nonzero(lam > DEFAULT_TOL, axis=1) == 4 - np.count_nonzero(lam <= DEFAULT_TOL, axis=1))
    )
    out.append(
        _record(
            "bounds",
            "vertices_are_pauli_sign_patterns",
            sorted(vertices) == sorted(volume.TETRAHEDRON_VERTICES) and rank_ok,
            vertices=[list(v) for v in sorted(vertices)],
        )
    )
    return out


def check_volume(samples, seed, workers=1):
    out = []
    n = max(samples, volume.MIN_MC_SAMPLES)
    est = volume.mc_measure_all(n, seed, workers=workers)
    for key, exact in (("cp", volume.exact_cp_measure()[1]), ("ncp", volume.exact_ncp_measure())):
        e = est[key]
        dev = abs(e.measure - float(exact))
        out.append(
            _record(
                "volume",
                f"mc_{key}_matches_exact",
                dev <= 4 * e.std_error,
                measure=e.measure,
                exact=str(exact),
                std_error=e.std_error,
                sigmas=dev / e.std_error if e.std_error else 0.0,
            )
        )
    total = est["cp"].measure + est["ncp"].measure
    out.append(_record("volume", "cp_plus_ncp_is_one", total == 1.0, total=total))

    frac = volume.grid_cp_fraction(201)
    dev = abs(float(frac) - 1 / 3)
    out.append(_record("volume", "grid_oracle_cp_fraction", dev <= 2e-3, fraction=float(frac), deviation=dev))

    hits = volume.stratum_measure_check(n, seed, workers=workers)
    injected = volume.stratum_measure_check(
        volume.MIN_MC_SAMPLES, seed, inject=[(1, 1, 1), (1, 0, 0), (0.5, 0.5, 0.0)]
    )
    base = volume.stratum_measure_check(volume.MIN_MC_SAMPLES, seed)
    detected = tuple(i - b for i, b in zip(injected, base)) == (1, 1, 1)
    out.append(
        _record(
            "volume",
            "lower_strata_have_measure_zero",
            hits == (0, 0, 0) and detected,
            vertex_edge_face_hits=list(hits),
            injection_detected=detected,
        )
    )
    return out


def check_su4(samples, seed, workers=1):
    out = []
    g = np.array(su4.build_generators())
    gram = np.einsum("aij,bji->ab", g, g)
    gram_dev = float(np.max(np.abs(gram - 2 * np.eye(15))))
    herm = float(np.max(np.abs(g - np.conj(np.swapaxes(g, 1, 2)))))
    tr = float(np.max(np.abs(np.trace(g, axis1=1, axis2=2))))
    out.append(
        _record(
            "su4",
            "generator_algebra",
            gram_dev <= 1e-12 and herm == 0.0 and tr <= 1e-12,
            max_gram_deviation=gram_dev,
        )
    )

    alpha, theta = su4.sample_euler_batch(seed, samples)
    u = su4.euler_unitary_batch(alpha[: min(samples, 1000)])
    udev = float(np.max(np.abs(u @ np.conj(np.swapaxes(u, 1, 2)) - np.eye(4))))
    out.append(_record("su4", "euler_product_is_unitary", udev <= 1e-10, max_deviation=udev))

    rho = su4.density_from_euler_batch(alpha, theta)
    w = linalg.hermitian_eigenvalues_batch(rho)
    core = np.sort(su4.core_diagonal_entries(theta), axis=1)
    sdev = float(np.max(np.abs(w - core)))
    out.append(_record("su4", "conjugation_preserves_core_spectrum", sdev <= 1e-10, max_abs_diff=sdev))

    trdev = float(np.max(np.abs(np.trace(rho, axis1=1, axis2=2) - 1)))
    lo = float(np.min(w))
    out.append(
        _record(
            "su4",
            "density_matrices_valid",
            lo >= -1e-10 and trdev <= 1e-12,
            min_eigenvalue=lo,
            max_trace_deviation=trdev,
        )
    )

    corner = su4.core_diagonal((math.pi / 2,) * 3)
    cdev = float(np.max(np.abs(corner - np.diag([1, 0, 0, 0]))))
    out.append(_record("su4", "corner_core_is_pure", cdev <= 1e-12, max_deviation=cdev))
    return out


_CHECKS = {"spectrum": check_spectrum, "bounds": check_bounds, "volume": check_volume, "su4": check_su4}


def run_suite(suite, samples, seed, workers=1):
    """Run one suite (or ``"all"``) and return the list of property records."""
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in _CHECKS:
            raise ValueError(f"unknown suite {name!r}; expected one of {('all',) + SUITES}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    records = []
    for name in names:
        records += _CHECKS[name](samples, seed, workers)
    return records
