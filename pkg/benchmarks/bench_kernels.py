"""Compare the compiled and numpy kernel backends.

Usage::

    python benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]

Prints the best-of-``repeat`` wall time per kernel and backend, and checks
that both backends return identical counts on the same input.
"""
import argparse
import time

import numpy as np

from paulivol import _backend


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1_000_000, help="points per kernel call")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = {"python": _backend.get_kernels("python")}
    if _backend.COMPILED:
        backends["cython"] = _backend.get_kernels("cython")
    else:
        print("compiled extension not available; timing the numpy backend only")

    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, size=(args.n, 3))
    m = rng.normal(size=(args.n // 100, 4, 4)) + 1j * rng.normal(size=(args.n // 100, 4, 4))
    m = m + np.conj(np.swapaxes(m, 1, 2))
    cases = {
        "count_regions": lambda k: k.count_regions(x, 1e-12),
        "count_strata": lambda k: k.count_strata(x, 1e-12),
        "max_abs_eigenvalue": lambda k: k.max_abs_eigenvalue(x),
        "pauli_spectrum": lambda k: k.pauli_spectrum(x),
        "eigvalsh_batch (n/100 4x4)": lambda k: k.eigvalsh_batch(m),
    }

    print(f"{'kernel':<30}" + "".join(f"{b:>12}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    for name, fn in cases.items():
        times, outs = [], []
        for k in backends.values():
            t, out = best_time(lambda: fn(k), args.repeat)
            times.append(t)
            outs.append(out)
        row = f"{name:<30}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:>9.1f}x"
            if isinstance(outs[0], tuple):
                assert outs[0] == outs[1], f"{name}: backends disagree"
            else:
                np.testing.assert_allclose(outs[0], outs[1], atol=1e-12)
        print(row)


if __name__ == "__main__":
    main()
