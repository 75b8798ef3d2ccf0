"""Measure of CP and NCP Pauli channels inside the cube of positive ones.

The measure of a set of scaling vectors ``(x1, x2, x3)`` is its Lebesgue
volume times ``KAPPA = 1/8``, so the cube ``[-1, 1]^3`` of positive
trace-preserving Pauli maps has measure 1. The CP maps form the tetrahedron
spanned by the four Pauli unitaries.
"""
import enum
import itertools
import math
from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from ._backend import kernels
from ._streams import check_seed, chunk_rng, map_chunks, uniform_cube, CHUNK_SIZE
from .channels import DEFAULT_TOL, PauliChannel

KAPPA = Fraction(1, 8)
CUBE_VOLUME = 8
MIN_MC_SAMPLES = 1000
MAX_REJECTION_ATTEMPTS = 10_000_000

TETRAHEDRON_VERTICES = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))


class RegionLabel(str, enum.Enum):
    PTP_CUBE = "PTP_CUBE"
    CP_TETRAHEDRON = "CP_TETRAHEDRON"
    NCP_COMPLEMENT = "NCP_COMPLEMENT"
    CUSTOM = "CUSTOM"


@dataclass(frozen=True)
class Region:
    """A subset of the cube. ``predicate`` maps an ``(N, 3)`` array to a boolean mask."""

    label: RegionLabel
    predicate: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: Optional[str] = None

    def contains(self, x, tol=DEFAULT_TOL):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if self.label is RegionLabel.CUSTOM:
            return np.asarray(self.predicate(x), dtype=bool)
        codes = kernels.classify_codes(x, tol)
        if self.label is RegionLabel.PTP_CUBE:
            return codes != 2
        if self.label is RegionLabel.CP_TETRAHEDRON:
            return codes == 0
        return codes == 1

    @property
    def key(self):
        return self.name or self.label.value

    @classmethod
    def custom(cls, predicate, name="CUSTOM"):
        return cls(RegionLabel.CUSTOM, predicate, name)


PTP_CUBE = Region(RegionLabel.PTP_CUBE)
CP_TETRAHEDRON = Region(RegionLabel.CP_TETRAHEDRON)
NCP_COMPLEMENT = Region(RegionLabel.NCP_COMPLEMENT)

REGIONS = {"cube": PTP_CUBE, "cp": CP_TETRAHEDRON, "ncp": NCP_COMPLEMENT}


@dataclass(frozen=True)
class VolumeEstimate:
    region: str
    measure: float
    cartesian_volume: float
    n_samples: int
    std_error: float
    seed: int
    hits: int
    kappa: float = float(KAPPA)

    def to_json(self):
        d = asdict(self)
        d["n"] = d.pop("n_samples")
        return d


# --- exact geometry -----------------------------------------------------------


def _det3(a, b, c):
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def tetrahedron_determinant(vertices=TETRAHEDRON_VERTICES):
    """Integer determinant of the edge vectors from the first vertex."""
    v0, *rest = vertices
    edges = [tuple(vi - ui for vi, ui in zip(v, v0)) for v in rest]
    return _det3(*edges)


def exact_cp_measure():
    """Exact ``(cartesian_volume, measure)`` of the CP tetrahedron: ``(8/3, 1/3)``."""
    volume = Fraction(abs(tetrahedron_determinant()), 6)
    return volume, KAPPA * volume


def exact_ncp_measure():
    return 1 - exact_cp_measure()[1]


def exact_measure(region):
    """Exact measure of a built-in region, or ``None`` for custom ones."""
    if region.label is RegionLabel.PTP_CUBE:
        return Fraction(1)
    if region.label is RegionLabel.CP_TETRAHEDRON:
        return exact_cp_measure()[1]
    if region.label is RegionLabel.NCP_COMPLEMENT:
        return exact_ncp_measure()
    return None


def grid_cp_fraction(points_per_axis=201):
    """Fraction of a regular grid over the cube whose Choi eigenvalues are all >= 0.

    Grid coordinates are ``j / (m - 1)`` for even offsets ``j``, so each
    eigenvalue inequality is checked in exact integer arithmetic.
    """
    m = int(points_per_axis)
    if m < 2:
        raise ValueError("points_per_axis must be >= 2")
    s = m - 1
    j = 2 * np.arange(m, dtype=np.int64) - s
    j2, j3 = np.meshgrid(j, j, indexing="ij")
    count = 0
    for j1 in j:
        ok = (
            (s + j1 - j2 - j3 >= 0)
            & (s - j1 + j2 - j3 >= 0)
            & (s - j1 - j2 + j3 >= 0)
            & (s + j1 + j2 + j3 >= 0)
        )
        count += int(np.count_nonzero(ok))
    return Fraction(count, m**3)


# --- Monte Carlo --------------------------------------------------------------


def _region_hits(region, x, tol):
    if region.label is RegionLabel.CUSTOM:
        return int(np.count_nonzero(region.contains(x, tol)))
    n_cube, n_cp, n_ncp = kernels.count_regions(x, tol)
    return {RegionLabel.PTP_CUBE: n_cube, RegionLabel.CP_TETRAHEDRON: n_cp, RegionLabel.NCP_COMPLEMENT: n_ncp}[
        region.label
    ]


def estimate_from_hits(region, hits, n, seed):
    p = hits / n
    cartesian = CUBE_VOLUME * p
    return VolumeEstimate(
        region=region.key,
        measure=float(KAPPA) * cartesian,
        cartesian_volume=cartesian,
        n_samples=n,
        std_error=math.sqrt(p * (1 - p) / n) * CUBE_VOLUME * float(KAPPA),
        seed=seed,
        hits=hits,
    )


def mc_measure(region, n, seed, workers=1, tol=DEFAULT_TOL):
    """Hit-or-miss estimate of the measure of ``region`` from ``n`` uniform cube points.

    Points come from per-chunk PCG64 streams, so the estimate is identical
    for any ``workers``.
    """
    if n < MIN_MC_SAMPLES:
        raise ValueError(f"need at least {MIN_MC_SAMPLES} samples, got {n}")
    seed = check_seed(seed)
    hits = sum(map_chunks(lambda rng, size, _: _region_hits(region, uniform_cube(rng, size), tol), n, seed, workers))
    return estimate_from_hits(region, hits, n, seed)


def mc_measure_all(n, seed, workers=1, tol=DEFAULT_TOL):
    """Estimates for cube, CP and NCP regions from one shared sample stream."""
    if n < MIN_MC_SAMPLES:
        raise ValueError(f"need at least {MIN_MC_SAMPLES} samples, got {n}")
    seed = check_seed(seed)
    counts = map_chunks(lambda rng, size, _: kernels.count_regions(uniform_cube(rng, size), tol), n, seed, workers)
    totals = [sum(c[i] for c in counts) for i in range(3)]
    return {
        key: estimate_from_hits(REGIONS[key], hits, n, seed)
        for key, hits in zip(("cube", "cp", "ncp"), totals)
    }


def sample_points(region, seed, count, workers=1, tol=DEFAULT_TOL, max_attempts=MAX_REJECTION_ATTEMPTS):
    """``count`` points uniform in ``region`` by rejection from the cube, shape ``(count, 3)``.

    Raises:
        ValueError: if the region yields no hit within ``max_attempts`` draws.
    """
    seed = check_seed(seed)
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return np.empty((0, 3))

    def chunk(index):
        x = uniform_cube(chunk_rng(seed, index), CHUNK_SIZE)
        return x[region.contains(x, tol)]

    parts, have, index = [], 0, 0
    window = max(1, workers)
    pool = None
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        pool = ThreadPoolExecutor(max_workers=workers)
    try:
        while have < count:
            if have == 0 and index * CHUNK_SIZE >= max_attempts:
                raise ValueError(f"region {region.key} produced no point in {index * CHUNK_SIZE} attempts")
            indices = range(index, index + window)
            results = list(pool.map(chunk, indices)) if pool else [chunk(i) for i in indices]
            for r in results:
                parts.append(r)
                have += len(r)
            index += window
    finally:
        if pool:
            pool.shutdown()
    return np.concatenate(parts)[:count]


def sample_channel(region, seed, count, workers=1, tol=DEFAULT_TOL):
    """Uniform Pauli channels from ``region``; see :func:`sample_points`."""
    return [PauliChannel(tuple(row)) for row in sample_points(region, seed, count, workers, tol)]


def cube_corners():
    """The eight cube corners, CP vertices first."""
    rest = [c for c in itertools.product((1, -1), repeat=3) if c not in TETRAHEDRON_VERTICES]
    return np.array(list(TETRAHEDRON_VERTICES[1:]) + [TETRAHEDRON_VERTICES[0]] + rest, dtype=np.float64)


def bound_scan(n, seed, workers=1, include_corners=True):
    """Largest Choi eigenvalue modulus over the cube corners and ``n`` uniform points.

    Returns:
        ``(max_abs_eigenvalue, argmax)`` with ``argmax`` a :class:`PauliChannel`.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    best, arg = -1.0, None
    if include_corners:
        corners = cube_corners()
        best, i = kernels.max_abs_eigenvalue(corners)
        arg = corners[i]
    if n:
        seed = check_seed(seed)

        def run(rng, size, _):
            x = uniform_cube(rng, size)
            v, i = kernels.max_abs_eigenvalue(x)
            return v, x[i]

        for v, x in map_chunks(run, n, seed, workers):
            if v > best:
                best, arg = v, x
    return best, PauliChannel(tuple(arg))


def max_abs_eigenvalue(points):
    """``(max |lambda|, argmax row)`` over explicit points."""
    x = np.atleast_2d(np.asarray(points, dtype=np.float64))
    v, i = kernels.max_abs_eigenvalue(x)
    return v, PauliChannel(tuple(x[i]))


def stratum_measure_check(n, seed, inject=None, workers=1, tol=DEFAULT_TOL):
    """Count uniform samples landing on tetrahedron vertices, edges or faces.

    Lower-dimensional strata have zero volume, so the expected result is
    ``(0, 0, 0)``. Points given in ``inject`` are appended to the stream to
    check that the detector does fire on boundary points.
    """
    if n < MIN_MC_SAMPLES:
        raise ValueError(f"need at least {MIN_MC_SAMPLES} samples, got {n}")
    seed = check_seed(seed)
    counts = map_chunks(lambda rng, size, _: kernels.count_strata(uniform_cube(rng, size), tol), n, seed, workers)
    if inject is not None and len(inject):
        counts.append(kernels.count_strata(np.atleast_2d(np.asarray(inject, dtype=np.float64)), tol))
    return tuple(sum(c[i] for c in counts) for i in range(3))
