"""Single-qubit maps in Pauli, affine and general-unital form.

Choi convention: block ``(i, j)`` of the 4x4 Choi matrix is the map applied
to ``|i><j|``, i.e. ``B = sum_ij |i><j| (x) E(|i><j|)``. With this convention
tracing out the second factor gives the identity for every trace-preserving
map, and tracing out the first gives the identity for unital maps.
"""
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from . import linalg
from ._backend import kernels
from ._streams import map_chunks

DEFAULT_TOL = 1e-12
POSITIVITY_ATOL = 1e-9
DEFAULT_MESH_ORDER = 64
RANDOM_PURE_STATES = 10_000
_PURE_STATE_SEED = 0x5EED


class Label(str, enum.Enum):
    CPTP = "CPTP"
    NCP_POSITIVE = "NCP_POSITIVE"
    NON_POSITIVE = "NON_POSITIVE"


class Stratum(str, enum.Enum):
    VERTEX = "VERTEX"
    EDGE = "EDGE"
    FACE = "FACE"
    INTERIOR = "INTERIOR"


_LABEL_BY_CODE = {0: Label.CPTP, 1: Label.NCP_POSITIVE, 2: Label.NON_POSITIVE}
_STRATUM_BY_RANK = {1: Stratum.VERTEX, 2: Stratum.EDGE, 3: Stratum.FACE, 4: Stratum.INTERIOR}


def _triple(values, name):
    t = tuple(float(v) for v in values)
    if len(t) != 3:
        raise ValueError(f"{name} needs 3 components, got {len(t)}")
    return t


@dataclass(frozen=True)
class QubitState:
    """Qubit state given by its Bloch vector."""

    bloch: Tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "bloch", _triple(self.bloch, "bloch"))

    @property
    def norm(self):
        return math.sqrt(sum(a * a for a in self.bloch))

    def is_valid(self, atol=1e-12):
        return self.norm <= 1.0 + atol

    def density_matrix(self):
        a1, a2, a3 = self.bloch
        return 0.5 * np.array([[1 + a3, a1 - 1j * a2], [a1 + 1j * a2, 1 - a3]], dtype=np.complex128)


@dataclass(frozen=True)
class PauliChannel:
    """Pauli channel with Bloch-axis scaling factors ``x``."""

    x: Tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "x", _triple(self.x, "x"))

    def as_affine(self):
        return AffineChannel(self.x, (0.0, 0.0, 0.0))


@dataclass(frozen=True)
class AffineChannel:
    """Trace-preserving map ``a -> x * a + t`` on Bloch vectors (componentwise scaling)."""

    x: Tuple[float, float, float]
    t: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "x", _triple(self.x, "x"))
        object.__setattr__(self, "t", _triple(self.t, "t"))

    @property
    def is_unital(self):
        return self.t == (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class GeneralUnitalChoi:
    """Parameters of the general unital, trace-preserving qubit Choi matrix.

    ``a`` is real; ``x``, ``y``, ``z``, ``w`` are complex.
    """

    a: float
    x: complex = 0j
    y: complex = 0j
    z: complex = 0j
    w: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        for name in ("x", "y", "z", "w"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def from_pauli(cls, p):
        x1, x2, x3 = p.x
        return cls(a=(1 + x3) / 2, z=(x1 + x2) / 2, w=(x1 - x2) / 2)


@dataclass(frozen=True)
class ChannelClass:
    label: Label
    min_choi_eigenvalue: float
    witness: Optional[QubitState] = None


@dataclass(frozen=True)
class KrausStratum:
    rank: int
    stratum: Stratum


class PositivityResult(NamedTuple):
    is_positive: bool
    min_output_eigenvalue: float
    witness: QubitState


class BlowupFinding(NamedTuple):
    params: GeneralUnitalChoi
    min_choi_eigenvalue: float
    max_abs_choi_eigenvalue: float
    is_positive: bool


# --- Choi matrices -----------------------------------------------------------


def choi_from_affine(c):
    """Choi matrix of an affine trace-preserving map; trace 2, ``tr_2 B = 1``."""
    x1, x2, x3 = c.x
    t1, t2, t3 = c.t
    tm = complex(t1, -t2)
    tp = complex(t1, t2)
    return 0.5 * np.array(
        [
            [1 + t3 + x3, tm, 0, x1 + x2],
            [tp, 1 - t3 - x3, x1 - x2, 0],
            [0, x1 - x2, 1 + t3 - x3, tm],
            [x1 + x2, 0, tp, 1 - t3 + x3],
        ],
        dtype=np.complex128,
    )


def choi_from_pauli(p):
    return choi_from_affine(p.as_affine())


def choi_from_pauli_batch(x):
    """Stack of Pauli Choi matrices for rows of ``x`` (shape ``(N, 3)``)."""
    x = np.asarray(x, dtype=np.float64)
    x1, x2, x3 = x[:, 0], x[:, 1], x[:, 2]
    b = np.zeros((x.shape[0], 4, 4), dtype=np.complex128)
    b[:, 0, 0] = b[:, 3, 3] = 0.5 * (1 + x3)
    b[:, 1, 1] = b[:, 2, 2] = 0.5 * (1 - x3)
    b[:, 0, 3] = b[:, 3, 0] = 0.5 * (x1 + x2)
    b[:, 1, 2] = b[:, 2, 1] = 0.5 * (x1 - x2)
    return b


def general_unital_choi_matrix(g):
    a, x, y, z, w = g.a, g.x, g.y, g.z, g.w
    cx, cy, cz, cw = x.conjugate(), y.conjugate(), z.conjugate(), w.conjugate()
    return np.array(
        [
            [a, x, y, z],
            [cx, 1 - a, w, -y],
            [cy, cw, 1 - a, -x],
            [cz, -cy, -cx, a],
        ],
        dtype=np.complex128,
    )


def _general_unital_batch(a, x, y, z, w):
    b = np.empty((a.shape[0], 4, 4), dtype=np.complex128)
    cx, cy, cz, cw = np.conj(x), np.conj(y), np.conj(z), np.conj(w)
    rows = (
        (a, x, y, z),
        (cx, 1 - a, w, -y),
        (cy, cw, 1 - a, -x),
        (cz, -cy, -cx, a),
    )
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            b[:, i, j] = v
    return b


def choi_matrix(c):
    """Choi matrix of any supported channel value."""
    if isinstance(c, PauliChannel):
        return choi_from_pauli(c)
    if isinstance(c, AffineChannel):
        return choi_from_affine(c)
    if isinstance(c, GeneralUnitalChoi):
        return general_unital_choi_matrix(c)
    raise TypeError(f"unsupported channel type {type(c).__name__}")


# --- spectra and classification -----------------------------------------------


def pauli_choi_eigenvalues(p, sort=True):
    """Closed-form Choi eigenvalues of a Pauli channel.

    With ``sort=False`` the values come back in the order
    ``(1+x1-x2-x3, 1-x1+x2-x3, 1-x1-x2+x3, 1+x1+x2+x3) / 2``.
    """
    lam = kernels.pauli_spectrum(np.array([p.x], dtype=np.float64))[0]
    return np.sort(lam) if sort else lam


def cp_inequalities_hold(p, tol=0.0):
    """``|1 + x3| >= |x1 + x2|`` and ``|1 - x3| >= |x1 - x2|``.

    Each side difference is twice a Choi eigenvalue, so ``tol`` is applied
    as a slack of ``2 * tol`` to agree with the eigenvalue test.
    """
    x1, x2, x3 = p.x
    slack = -2 * tol
    return abs(1 + x3) - abs(x1 + x2) >= slack and abs(1 - x3) - abs(x1 - x2) >= slack


def classify_pauli(p, tol=DEFAULT_TOL):
    """Classify a Pauli channel as CPTP, NCP but positive, or not positive.

    Positivity is the cube test ``max |x_i| <= 1``; complete positivity is
    the sign of the smallest closed-form Choi eigenvalue. For a non-positive
    channel the witness is the pure state along the offending axis.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    x = np.array([p.x], dtype=np.float64)
    label = _LABEL_BY_CODE[int(kernels.classify_codes(x, tol)[0])]
    lam_min = float(np.min(kernels.pauli_spectrum(x)[0]))
    witness = None
    if label is Label.NON_POSITIVE:
        i = int(np.argmax(np.abs(x[0])))
        axis = [0.0, 0.0, 0.0]
        axis[i] = 1.0
        witness = QubitState(axis)
    return ChannelClass(label, lam_min, witness)


def classify(c, tol=DEFAULT_TOL, mesh_order=DEFAULT_MESH_ORDER):
    """Classify any channel value.

    Pauli channels use the exact closed form. Affine and general-unital maps
    use the numerical eigensolver for complete positivity and
    :func:`numeric_positivity_check` for positivity, which can refute but only
    sample-certify positivity.
    """
    if isinstance(c, PauliChannel):
        return classify_pauli(c, tol)
    if isinstance(c, AffineChannel) and c.is_unital:
        return classify_pauli(PauliChannel(c.x), tol)
    lam_min = float(linalg.hermitian_eigenvalues(choi_matrix(c))[0])
    pos = numeric_positivity_check(c, mesh_order)
    if not pos.is_positive:
        return ChannelClass(Label.NON_POSITIVE, lam_min, pos.witness)
    label = Label.CPTP if lam_min >= -tol else Label.NCP_POSITIVE
    return ChannelClass(label, lam_min, None)


def apply(c, s):
    """Image of the state ``s`` under an affine (or Pauli) map."""
    if isinstance(c, PauliChannel):
        c = c.as_affine()
    return QubitState(tuple(xi * ai + ti for xi, ai, ti in zip(c.x, s.bloch, c.t)))


def affine_T_from_general_unital(g):
    """Real 3x3 Bloch-action matrix of a general unital Choi parametrization.

    Rows are ``(Re[w+z], -Im[w+z], 2Re[x])``, ``(Im[z-w], Re[z-w], 2Im[x])``,
    ``(2Re[y], -2Im[y], 2a-1)``. This matches the block convention of
    :func:`choi_from_affine` applied to the complex-conjugated parameters;
    the two agree whenever the parameters are real.
    """
    x, y, z, w = g.x, g.y, g.z, g.w
    return np.array(
        [
            [(w + z).real, -(w + z).imag, 2 * x.real],
            [(z - w).imag, (z - w).real, 2 * x.imag],
            [2 * y.real, -2 * y.imag, 2 * g.a - 1],
        ]
    )


def det_T(p):
    x1, x2, x3 = p.x
    return x1 * x2 * x3


def kraus_stratum(p, tol=DEFAULT_TOL):
    """Kraus rank of a CP Pauli channel and the face of the tetrahedron it lies on.

    Raises:
        ValueError: if the channel is not CPTP.
    """
    cls = classify_pauli(p, tol)
    if cls.label is not Label.CPTP:
        raise ValueError(
            f"Kraus strata are defined for CPTP Pauli channels only; x={p.x} is {cls.label.value} "
            f"(min Choi eigenvalue {cls.min_choi_eigenvalue:.3e})"
        )
    rank = int(np.count_nonzero(pauli_choi_eigenvalues(p) > tol))
    return KrausStratum(rank, _STRATUM_BY_RANK[rank])


def pauli_postcompose(p, k):
    """Follow the channel by the Pauli unitary ``sigma_k`` (k in 1, 2, 3).

    Axis ``k`` keeps its sign, the other two flip; the Choi spectrum is permuted.
    """
    if k not in (1, 2, 3):
        raise ValueError(f"k must be 1, 2 or 3, got {k!r}")
    return PauliChannel(tuple(xi if i == k - 1 else -xi for i, xi in enumerate(p.x)))


def unitary_conjugate_choi(b, u):
    """Choi matrix of the channel followed by ``rho -> U rho U^dagger``."""
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2) or not linalg.is_unitary(u):
        raise ValueError("U must be a 2x2 unitary (U U^dagger = 1 within 1e-10)")
    b = np.asarray(b, dtype=np.complex128)
    if b.shape != (4, 4):
        raise ValueError(f"expected a 4x4 Choi matrix, got shape {b.shape}")
    iu = linalg.kronecker(linalg.IDENTITY_2, u)
    return iu @ b @ iu.conj().T


# --- positivity ---------------------------------------------------------------


def _pure_states(mesh_order):
    theta = np.linspace(0.0, np.pi, mesh_order)
    phi = np.linspace(0.0, 2 * np.pi, 2 * mesh_order, endpoint=False)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    grid = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1).reshape(-1, 3)
    rnd = np.random.default_rng(_PURE_STATE_SEED).normal(size=(RANDOM_PURE_STATES, 3))
    rnd /= np.linalg.norm(rnd, axis=1, keepdims=True)
    axes = np.vstack([np.eye(3), -np.eye(3)])
    return np.vstack([axes, grid, rnd])


def _bloch_to_rho(a):
    rho = np.empty((a.shape[0], 2, 2), dtype=np.complex128)
    rho[:, 0, 0] = 0.5 * (1 + a[:, 2])
    rho[:, 1, 1] = 0.5 * (1 - a[:, 2])
    rho[:, 0, 1] = 0.5 * (a[:, 0] - 1j * a[:, 1])
    rho[:, 1, 0] = 0.5 * (a[:, 0] + 1j * a[:, 1])
    return rho


def _min_output_eigenvalues(chois, rho):
    """Smallest eigenvalue of ``E(rho_m)`` for every Choi ``(K, 4, 4)`` and state ``(M, 2, 2)``."""
    blocks = chois.reshape(-1, 2, 2, 2, 2)
    out = np.einsum("mij,kiajb->kmab", rho, blocks)
    h = 0.5 * (out + np.conj(np.swapaxes(out, -1, -2)))
    d0 = h[..., 0, 0].real
    d1 = h[..., 1, 1].real
    return 0.5 * (d0 + d1) - np.hypot(0.5 * (d0 - d1), np.abs(h[..., 0, 1]))


def numeric_positivity_check(c, mesh_order=DEFAULT_MESH_ORDER):
    """Sample whether the map sends every pure state to a positive matrix.

    Pure inputs suffice by convexity. The states are the six axis states, a
    ``mesh_order x 2*mesh_order`` polar/azimuthal grid and 10^4 fixed random
    pure states. A failure is a proof of non-positivity (the witness); a pass
    only certifies positivity on the sampled states.
    """
    if mesh_order < 2:
        raise ValueError("mesh_order must be >= 2")
    states = _pure_states(mesh_order)
    mins = _min_output_eigenvalues(choi_matrix(c)[None], _bloch_to_rho(states))[0]
    i = int(np.argmin(mins))
    lo = float(mins[i])
    return PositivityResult(lo >= -POSITIVITY_ATOL, lo, QubitState(states[i]))


def _sample_blowup_params(rng, size, scale, pauli_embedded):
    if pauli_embedded:
        x = rng.uniform(-1.0 - scale, 1.0 + scale, size=(size, 3))
        zero = np.zeros(size, dtype=np.complex128)
        return (
            (1 + x[:, 2]) / 2,
            zero,
            zero,
            ((x[:, 0] + x[:, 1]) / 2).astype(np.complex128),
            ((x[:, 0] - x[:, 1]) / 2).astype(np.complex128),
        )
    u = rng.uniform(-scale, scale, size=(size, 8))
    a = rng.uniform(-scale, 1.0 + scale, size=size)
    return a, u[:, 0] + 1j * u[:, 1], u[:, 2] + 1j * u[:, 3], u[:, 4] + 1j * u[:, 5], u[:, 6] + 1j * u[:, 7]


def blowup_scan(trials, seed, scale, pauli_embedded=False, mesh_order=DEFAULT_MESH_ORDER, workers=1):
    """Search general unital maps for positive ones with a Choi eigenvalue above 2 in modulus.

    Returns ``(findings, stats)`` where ``stats`` counts how many trials had
    a large eigenvalue and how many of those passed the cheap axis test.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if scale < 0:
        raise ValueError("scale must be non-negative")
    axis_rho = _bloch_to_rho(np.vstack([np.eye(3), -np.eye(3)]))

    def run(rng, size, index):
        params = _sample_blowup_params(rng, size, scale, pauli_embedded)
        b = _general_unital_batch(*params)
        lam = kernels.eigvalsh_batch(b)
        big = np.flatnonzero(np.max(np.abs(lam), axis=1) > 2.0)
        passed_axes = big[np.all(_min_output_eigenvalues(b[big], axis_rho) >= -POSITIVITY_ATOL, axis=1)]
        found = []
        for i in passed_axes:
            g = GeneralUnitalChoi(*(complex(p[i]) if k else float(p[i]) for k, p in enumerate(params)))
            pos = numeric_positivity_check(g, mesh_order)
            if pos.is_positive:
                found.append(BlowupFinding(g, float(lam[i, 0]), float(np.max(np.abs(lam[i]))), True))
        return found, len(big), len(passed_axes)

    chunks = map_chunks(run, trials, seed, workers=workers, chunk_size=1 << 14)
    findings = [f for chunk in chunks for f in chunk[0]]
    stats = {
        "trials": trials,
        "large_eigenvalue": sum(c[1] for c in chunks),
        "passed_axis_test": sum(c[2] for c in chunks),
        "findings": len(findings),
    }
    return findings, stats


def blowup_search(trials, seed, scale, pauli_embedded=False, mesh_order=DEFAULT_MESH_ORDER, workers=1):
    """Findings of :func:`blowup_scan` only."""
    return blowup_scan(trials, seed, scale, pauli_embedded, mesh_order, workers)[0]


def reverify_finding(f, mesh_order=DEFAULT_MESH_ORDER):
    """Recheck both predicates of a blow-up finding from its parameters alone."""
    lam = linalg.hermitian_eigenvalues(general_unital_choi_matrix(f.params))
    return bool(np.max(np.abs(lam)) > 2.0) and numeric_positivity_check(f.params, mesh_order).is_positive
