"""Acceptance criteria, one test per criterion.

Each test emits a single ``[PASS]``/``[FAIL]`` line, collected into an
"acceptance criteria" section at the end of the pytest run. Running this
file as a script prints the same eleven lines without pytest.
"""
import json
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from paulivol import channels, cli, linalg, su4, verify, volume
from paulivol._backend import kernels
from paulivol._streams import chunk_rng
from paulivol.channels import DEFAULT_TOL

SEED = 20240611


def report(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    print(line)
    return line


def criterion_1():
    cart, mu = volume.exact_cp_measure()
    ncp = volume.exact_ncp_measure()
    ok = (
        isinstance(mu, Fraction)
        and cart == Fraction(8, 3)
        and mu == Fraction(1, 3)
        and ncp == Fraction(2, 3)
        and ncp / mu == 2
    )
    return ok, f"volume {cart}, measure {mu}, ncp {ncp}, ratio {ncp / mu}"


def criterion_2():
    start = time.perf_counter()
    worst = 0.0
    for seed in range(1000, 1020):
        est = volume.mc_measure_all(1_000_000, seed)
        for key, exact in (("cp", 1 / 3), ("ncp", 2 / 3)):
            e = est[key]
            worst = max(worst, abs(e.measure - exact) / e.std_error)
    elapsed = time.perf_counter() - start
    return worst <= 4 and elapsed < 10, f"max deviation {worst:.2f} sigma over 20 seeds, {elapsed:.2f} s"


def criterion_3():
    start = time.perf_counter()
    frac = volume.grid_cp_fraction(201)
    elapsed = time.perf_counter() - start
    dev = abs(float(frac) - 1 / 3)
    return dev <= 2e-3 and elapsed < 30, f"fraction {float(frac):.7f}, deviation {dev:.2e}, {elapsed:.2f} s"


def criterion_4():
    best, arg = volume.bound_scan(1_000_000, SEED)
    x = chunk_rng(SEED, 0).uniform(-1, 1, size=(1_000_000, 3))
    over = int(np.count_nonzero(np.abs(kernels.pauli_spectrum(x)) > 2))
    at_corner = tuple(int(v) for v in arg.x) in volume.TETRAHEDRON_VERTICES
    return best == 2.0 and at_corner and over == 0, f"max |lambda| {best} at {arg.x}, {over} samples above 2"


def criterion_5():
    rng = chunk_rng(SEED, 1)
    x = rng.uniform(-1, 1, size=(100_000, 3))
    b = channels.choi_from_pauli_batch(x)
    closed = np.sort(kernels.pauli_spectrum(x), axis=1)
    numeric = linalg.hermitian_eigenvalues_batch(b)
    diff = float(np.max(np.abs(closed - numeric)))
    t = rng.uniform(-1, 1, size=(100_000, 3))
    traces = np.concatenate([np.trace(b, axis1=1, axis2=2), np.trace(verify.affine_choi_batch(x, t), axis1=1, axis2=2)])
    tr = float(np.max(np.abs(traces - 2)))
    return diff <= 1e-10 and tr <= 1e-12, f"max eigenvalue diff {diff:.2e}, max trace deviation {tr:.2e}"


def criterion_6():
    x = chunk_rng(SEED, 2).uniform(-1, 1, size=(100_000, 3))
    by_eig = np.min(kernels.pauli_spectrum(x), axis=1) >= -DEFAULT_TOL
    by_ineq = np.array([channels.cp_inequalities_hold(channels.PauliChannel(tuple(r)), DEFAULT_TOL) for r in x])
    n = int(np.count_nonzero(by_eig != by_ineq))
    return n == 0, f"{n} disagreements on 1e5 points at tolerance 1e-12"


def criterion_7():
    x = chunk_rng(SEED, 3).uniform(-1, 1, size=(1_000_000, 3))
    det = np.prod(x, axis=1)
    bad = int(np.count_nonzero((det < -1) | (det > 1)))
    return bad == 0, f"{bad} violations, det range [{det.min():.4f}, {det.max():.4f}]"


def criterion_8():
    rng = chunk_rng(SEED, 4)
    x = rng.uniform(-1, 1, size=(10_000, 3))
    flips_ok = True
    for k in (1, 2, 3):
        for row in x[:10_000]:
            p = channels.PauliChannel(tuple(row))
            q = channels.pauli_postcompose(p, k)
            if sorted(channels.pauli_choi_eigenvalues(q)) != sorted(channels.pauli_choi_eigenvalues(p)):
                flips_ok = False
    us = verify.random_unitaries(rng, 1000)
    worst = 0.0
    for u, row in zip(us, x[:1000]):
        b = channels.choi_from_pauli(channels.PauliChannel(tuple(row)))
        c = channels.unitary_conjugate_choi(b, u)
        worst = max(worst, float(np.max(np.abs(linalg.hermitian_eigenvalues(c) - linalg.hermitian_eigenvalues(b)))))
    return flips_ok and worst <= 1e-10, f"sign flips preserve multiset: {flips_ok}; conjugation max diff {worst:.2e}"


def criterion_9():
    alpha, theta = su4.sample_euler_batch(SEED, 10_000)
    rho = su4.density_from_euler_batch(alpha, theta)
    herm = float(np.max(np.abs(rho - np.conj(np.swapaxes(rho, 1, 2)))))
    tr = float(np.max(np.abs(np.trace(rho, axis1=1, axis2=2) - 1)))
    w = linalg.hermitian_eigenvalues_batch(rho)
    spec_dev = float(np.max(np.abs(w - np.sort(su4.core_diagonal_entries(theta), axis=1))))
    corner = float(np.max(np.abs(su4.core_diagonal((np.pi / 2,) * 3) - np.diag([1, 0, 0, 0]))))
    ok = herm <= 1e-12 and tr <= 1e-12 and w.min() >= -1e-10 and spec_dev <= 1e-10 and corner <= 1e-12
    return ok, f"min eigenvalue {w.min():.2e}, trace dev {tr:.2e}, spectrum dev {spec_dev:.2e}, corner dev {corner:.1e}"


def criterion_10():
    hits = volume.stratum_measure_check(1_000_000, SEED, tol=1e-12)
    base = volume.stratum_measure_check(1000, SEED)
    injected = {
        (1, 1, 1): (1, 0, 0),
        (1, 0, 0): (0, 1, 0),
        (0.5, 0.5, 0.0): (0, 0, 1),
    }
    detected = all(
        tuple(a - b for a, b in zip(volume.stratum_measure_check(1000, SEED, inject=[p]), base)) == want
        for p, want in injected.items()
    )
    return hits == (0, 0, 0) and detected, f"vertex/edge/face hits {hits}, injections detected: {detected}"


def _payloads(argv, tmp):
    """Result payload (and any data stream bytes) for workers 1 and 4, twice each."""
    out = []
    for workers in (1, 4, 1, 4):
        data = tmp / f"data_{workers}_{len(out)}"
        args = argv + ["--seed", "77", "--workers", str(workers)]
        if argv[0] == "sample":
            args += ["--data", str(data)]
        cfg = cli.config_from_args(cli.build_parser().parse_args(args))
        payload, _ = cli.run_config(cfg)
        payload = dict(payload)
        if "data" in payload:
            payload["data"] = data.read_bytes().hex()
        out.append(json.dumps(payload, sort_keys=True).encode())
    return out


def criterion_11(tmp):
    runs = {
        "volume": ["volume", "--region", "cp", "--samples", "1000000"],
        "sample": ["sample", "--region", "cube", "--count", "100000"],
        "verify": ["verify", "--suite", "all", "--samples", "100000"],
    }
    same = {}
    for name, argv in runs.items():
        p = _payloads(argv, tmp)
        same[name] = all(q == p[0] for q in p[1:])
    return all(same.values()), ", ".join(f"{k} identical: {v}" for k, v in same.items())


CRITERIA = {
    1: ("exact CP measure", criterion_1),
    2: ("Monte Carlo reproduction", criterion_2),
    3: ("grid oracle", criterion_3),
    4: ("eigenvalue bound", criterion_4),
    5: ("spectrum consistency", criterion_5),
    6: ("classification equivalence", criterion_6),
    7: ("det T range", criterion_7),
    8: ("sign flips and conjugation", criterion_8),
    9: ("SU(4) construction", criterion_9),
    10: ("measure-zero strata", criterion_10),
    11: ("determinism", criterion_11),
}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, tmp_path, acceptance_log):
    title, fn = CRITERIA[number]
    ok, detail = fn(tmp_path) if number == 11 else fn()
    acceptance_log.append(report(number, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    import pathlib
    import tempfile

    failed = 0
    with tempfile.TemporaryDirectory() as d:
        for number, (title, fn) in sorted(CRITERIA.items()):
            ok, detail = fn(pathlib.Path(d)) if number == 11 else fn()
            report(number, title, ok, detail)
            failed += not ok
    sys.exit(1 if failed else 0)
