"""Seeded, chunked random streams.

Work of ``n`` draws is split into fixed-size chunks; chunk ``i`` of seed ``s``
always uses the PCG64 stream seeded by ``SeedSequence(s, spawn_key=(i,))``.
Results therefore do not depend on how many workers process the chunks.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK_SIZE = 1 << 16


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    return int(seed)


def chunk_rng(seed, index):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(check_seed(seed), spawn_key=(index,))))


def chunk_plan(n, chunk_size=CHUNK_SIZE):
    """List of ``(index, size)`` pairs covering ``n`` draws."""
    full, rest = divmod(n, chunk_size)
    plan = [(i, chunk_size) for i in range(full)]
    if rest:
        plan.append((full, rest))
    return plan


def map_chunks(fn, n, seed, workers=1, chunk_size=CHUNK_SIZE):
    """Apply ``fn(rng, size, index)`` to every chunk, returning results in chunk order."""
    check_seed(seed)
    plan = chunk_plan(n, chunk_size)

    def run(item):
        index, size = item
        return fn(chunk_rng(seed, index), size, index)

    if workers <= 1 or len(plan) <= 1:
        return [run(item) for item in plan]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, plan))


def uniform_cube(rng, size):
    """``size`` points uniform in [-1, 1]^3."""
    return rng.uniform(-1.0, 1.0, size=(size, 3))
