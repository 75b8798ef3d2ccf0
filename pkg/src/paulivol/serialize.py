"""JSON and CSV interchange formats.

Channels::

    {"kind": "pauli", "x": [x1, x2, x3]}
    {"kind": "affine", "x": [x1, x2, x3], "t": [t1, t2, t3]}
    {"kind": "general_unital", "params": {"a": a, "x": [re, im], "y": [re, im], ...}}

Complex numbers are ``[re, im]`` pairs throughout.
"""
import csv
import math

import numpy as np

from ._backend import kernels
from .channels import (
    AffineChannel,
    ChannelClass,
    GeneralUnitalChoi,
    PauliChannel,
    QubitState,
    _LABEL_BY_CODE,
)
from .su4 import EulerParameters

SAMPLE_CSV_HEADER = ("x1", "x2", "x3", "class", "lambda1", "lambda2", "lambda3", "lambda4")


class FormatError(ValueError):
    """Malformed interchange data; ``field`` names the offending key path."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v, field):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise FormatError(field, f"expected [re, im], got {v!r}")
    return complex(_real(v[0], field + "[0]"), _real(v[1], field + "[1]"))


def _real(v, field):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise FormatError(field, f"expected a finite number, got {v!r}")
    return float(v)


def _triple(v, field):
    if not isinstance(v, (list, tuple)) or len(v) != 3:
        raise FormatError(field, f"expected 3 numbers, got {v!r}")
    return tuple(_real(a, f"{field}[{i}]") for i, a in enumerate(v))


def channel_to_json(c):
    if isinstance(c, PauliChannel):
        return {"kind": "pauli", "x": list(c.x), "t": [0.0, 0.0, 0.0]}
    if isinstance(c, AffineChannel):
        return {"kind": "affine", "x": list(c.x), "t": list(c.t)}
    if isinstance(c, GeneralUnitalChoi):
        return {
            "kind": "general_unital",
            "params": {"a": c.a, **{k: complex_to_json(getattr(c, k)) for k in ("x", "y", "z", "w")}},
        }
    raise TypeError(f"cannot serialize {type(c).__name__}")


def channel_from_json(d):
    if not isinstance(d, dict):
        raise FormatError("$", "expected a JSON object")
    kind = d.get("kind")
    if kind == "pauli":
        return PauliChannel(_triple(d.get("x"), "x"))
    if kind == "affine":
        return AffineChannel(_triple(d.get("x"), "x"), _triple(d.get("t", [0, 0, 0]), "t"))
    if kind == "general_unital":
        p = d.get("params")
        if not isinstance(p, dict):
            raise FormatError("params", "expected an object with keys a, x, y, z, w")
        return GeneralUnitalChoi(
            _real(p.get("a"), "params.a"),
            *(complex_from_json(p.get(k, [0, 0]), f"params.{k}") for k in ("x", "y", "z", "w")),
        )
    raise FormatError("kind", f"expected 'pauli', 'affine' or 'general_unital', got {kind!r}")


def state_to_json(s):
    return None if s is None else list(s.bloch)


def class_to_json(c: ChannelClass):
    return {
        "label": c.label.value,
        "min_choi_eigenvalue": c.min_choi_eigenvalue,
        "witness": state_to_json(c.witness),
    }


def euler_to_json(p):
    return {"alpha": list(p.alpha), "theta": list(p.theta)}


def euler_from_json(d):
    if not isinstance(d, dict):
        raise FormatError("$", "expected a JSON object")
    alpha, theta = d.get("alpha"), d.get("theta")
    if not isinstance(alpha, list) or len(alpha) != 12:
        raise FormatError("alpha", "expected 12 numbers")
    if not isinstance(theta, list) or len(theta) != 3:
        raise FormatError("theta", "expected 3 numbers")
    return EulerParameters(
        tuple(_real(a, f"alpha[{i}]") for i, a in enumerate(alpha)),
        tuple(_real(t, f"theta[{i}]") for i, t in enumerate(theta)),
    )


def matrix_to_json(m):
    m = np.asarray(m, dtype=np.complex128)
    return [[[z.real, z.imag] for z in row] for row in m.tolist()]


def matrix_from_json(v):
    return np.array([[complex(re, im) for re, im in row] for row in v], dtype=np.complex128)


def sample_rows(points, tol):
    """Records ``(x1, x2, x3, class, lambda1..lambda4)`` for sampled Pauli channels."""
    points = np.asarray(points, dtype=np.float64)
    codes = kernels.classify_codes(points, tol)
    lam = kernels.pauli_spectrum(points)
    for x, code, l in zip(points.tolist(), codes.tolist(), lam.tolist()):
        yield (*x, _LABEL_BY_CODE[code].value, *l)


def write_sample_csv(points, fh, tol):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SAMPLE_CSV_HEADER)
    for row in sample_rows(points, tol):
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def read_sample_csv(fh):
    reader = csv.DictReader(fh)
    return [
        {k: (row[k] if k == "class" else float(row[k])) for k in SAMPLE_CSV_HEADER}
        for row in reader
    ]


def state_from_json(v):
    return QubitState(_triple(v, "bloch"))
