"""Command-line interface.

Every run prints one JSON envelope::

    {"schema": ..., "version": ..., "command": ..., "config": {...},
     "result": {...}, "wall_time_ms": ...}

Exit status: 0 on success, 1 when a verification or agreement check fails,
2 on usage errors. ``PAULIVOL_SEED`` supplies a default seed; without it
a fresh seed is drawn and echoed in ``config``.
"""
import argparse
import dataclasses
import hashlib
import json
import math
import os
import secrets
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__, channels, linalg, serialize, su4, verify, volume
from ._backend import BACKEND, kernels
from .channels import DEFAULT_TOL, AffineChannel, GeneralUnitalChoi, Label, PauliChannel

SCHEMA = "paulivol.envelope/1"
SEED_ENV = "PAULIVOL_SEED"
COMMANDS = ("classify", "sample", "volume", "verify", "su4", "blowup")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    samples: int = 1
    seed: int = 0
    tolerance: float = DEFAULT_TOL
    output_format: str = "json"
    output_path: Optional[str] = None
    workers: int = 1
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.samples < 1:
            raise UsageError("samples must be >= 1")
        if not self.tolerance > 0:
            raise UsageError("tolerance must be > 0")
        if self.output_format not in ("json", "csv"):
            raise UsageError("output format must be json or csv")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")


# --- commands -------------------------------------------------------------------


def _classify(cfg):
    opts = cfg.options
    if opts.get("input"):
        try:
            with open(opts["input"]) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{opts['input']}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        except OSError as exc:
            raise UsageError(f"cannot read {opts['input']}: {exc.strerror}") from exc
        try:
            c = serialize.channel_from_json(data)
        except serialize.FormatError as exc:
            raise UsageError(f"{opts['input']}: {exc}") from exc
    elif opts.get("x") is not None:
        x = opts["x"]
        t = opts.get("t")
        c = PauliChannel(x) if t is None or not any(t) else AffineChannel(x, t)
    else:
        raise UsageError("classify needs --x or --input")

    tol = cfg.tolerance
    cls = channels.classify(c, tol, opts.get("mesh_order", channels.DEFAULT_MESH_ORDER))
    result = {"channel": serialize.channel_to_json(c), "class": serialize.class_to_json(cls)}
    if isinstance(c, PauliChannel):
        spectrum = channels.pauli_choi_eigenvalues(c)
        result["spectrum_source"] = "closed_form"
        result["det_T"] = channels.det_T(c)
        result["cp_inequalities"] = channels.cp_inequalities_hold(c, tol)
    else:
        spectrum = linalg.hermitian_eigenvalues(channels.choi_matrix(c))
        result["spectrum_source"] = "eigensolver"
        t_mat = (
            channels.affine_T_from_general_unital(c)
            if isinstance(c, GeneralUnitalChoi)
            else np.diag(c.x)
        )
        result["det_T"] = float(np.linalg.det(t_mat))
    result["spectrum"] = [float(v) for v in spectrum]
    max_abs = float(np.max(np.abs(spectrum)))
    result["bound_check"] = {"max_abs_eigenvalue": max_abs, "within_two": max_abs <= 2.0 + tol}
    if isinstance(c, PauliChannel) and cls.label is Label.CPTP:
        s = channels.kraus_stratum(c, tol)
        result["kraus_stratum"] = {"rank": s.rank, "stratum": s.stratum.value}
    else:
        result["kraus_stratum"] = None
    return result, EXIT_OK


def _volume(cfg):
    region = volume.REGIONS[cfg.options["region"]]
    if cfg.samples < volume.MIN_MC_SAMPLES:
        raise UsageError(f"volume needs --samples >= {volume.MIN_MC_SAMPLES}")
    est = volume.mc_measure(region, cfg.samples, cfg.seed, workers=cfg.workers, tol=cfg.tolerance)
    exact = volume.exact_measure(region)
    dev = abs(est.measure - float(exact))
    agree = dev <= 4 * est.std_error
    result = {
        "estimate": est.to_json(),
        "exact": {"measure": str(exact), "value": float(exact)},
        "deviation": dev,
        "within_4_sigma": agree,
    }
    if region is volume.CP_TETRAHEDRON:
        vol, _ = volume.exact_cp_measure()
        result["exact"]["cartesian_volume"] = str(vol)
    return result, EXIT_OK if agree else EXIT_FAIL


def _points_digest(points):
    return hashlib.sha256(np.ascontiguousarray(points, dtype="<f8").tobytes()).hexdigest()


def _open_data(path):
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from exc


def _sample(cfg):
    region = volume.REGIONS[cfg.options["region"]]
    count = cfg.samples
    try:
        pts = volume.sample_points(region, cfg.seed, count, workers=cfg.workers, tol=cfg.tolerance)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    codes = kernels.classify_codes(pts, cfg.tolerance)
    counts = {lab.value: int(np.count_nonzero(codes == code)) for code, lab in channels._LABEL_BY_CODE.items()}
    frac = counts[Label.CPTP.value] / count
    std = math.sqrt(frac * (1 - frac) / count)
    result = {
        "region": region.key,
        "count": count,
        "class_counts": counts,
        "cptp_fraction": frac,
        "cptp_fraction_std_error": std,
        "sha256": _points_digest(pts),
    }
    status = EXIT_OK
    if region is volume.PTP_CUBE:
        agree = abs(frac - 1 / 3) <= 4 * std
        result["cptp_fraction_within_4_sigma_of_one_third"] = agree
        status = EXIT_OK if agree else EXIT_FAIL
    data = cfg.options.get("data")
    if data:
        with _open_data(data) as fh:
            if cfg.output_format == "csv":
                serialize.write_sample_csv(pts, fh, cfg.tolerance)
            else:
                keys = serialize.SAMPLE_CSV_HEADER
                for row in serialize.sample_rows(pts, cfg.tolerance):
                    fh.write(json.dumps(dict(zip(keys, row))) + "\n")
        result["data"] = data
    else:
        keys = serialize.SAMPLE_CSV_HEADER
        result["rows"] = [dict(zip(keys, row)) for row in serialize.sample_rows(pts, cfg.tolerance)]
    return result, status


def _verify(cfg):
    try:
        records = verify.run_suite(cfg.options.get("suite", "all"), cfg.samples, cfg.seed, cfg.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    passed = all(r["passed"] for r in records)
    result = {"suite": cfg.options.get("suite", "all"), "passed": passed, "properties": records}
    return result, EXIT_OK if passed else EXIT_FAIL


def _su4(cfg):
    count = cfg.samples
    alpha, theta = su4.sample_euler_batch(cfg.seed, count)
    if cfg.options.get("zero_alpha"):
        alpha = np.zeros_like(alpha)
    rho = su4.density_from_euler_batch(alpha, theta)
    w = linalg.hermitian_eigenvalues_batch(rho)
    core = su4.core_diagonal_entries(theta)
    trace_dev = np.abs(np.trace(rho, axis1=1, axis2=2) - 1)
    valid = (w[:, 0] >= -1e-10) & (trace_dev <= 1e-12)
    flags = [su4.choi_candidate_from_density(r)[1:] for r in rho]
    tp = np.array([f[0] for f in flags])
    un = np.array([f[1] for f in flags])
    result = {
        "count": count,
        "sampling": su4.SAMPLING_NOTE,
        "valid_fraction": float(np.mean(valid)),
        "min_eigenvalue": float(w.min()),
        "max_trace_deviation": float(trace_dev.max()),
        "max_spectrum_vs_core_deviation": float(np.max(np.abs(w - np.sort(core, axis=1)))),
        "max_deviation_from_core_diagonal": float(
            np.max(np.abs(rho - np.einsum("ni,ij->nij", core, np.eye(4))))
        ),
        "trace_preserving_fraction": float(np.mean(tp)),
        "unital_fraction": float(np.mean(un)),
    }
    data = cfg.options.get("data")
    if data:
        with _open_data(data) as fh:
            for a, t, r in zip(alpha, theta, rho):
                rec = {"alpha": a.tolist(), "theta": t.tolist(), "rho": serialize.matrix_to_json(r)}
                fh.write(json.dumps(rec) + "\n")
        result["data"] = data
    return result, EXIT_OK if bool(np.all(valid)) else EXIT_FAIL


def _blowup(cfg):
    opts = cfg.options
    scale = opts.get("scale", 1.0)
    if scale < 0:
        raise UsageError("scale must be >= 0")
    findings, stats = channels.blowup_scan(
        cfg.samples, cfg.seed, scale, pauli_embedded=opts.get("pauli_embedded", False), workers=cfg.workers
    )
    reported = []
    for f in findings:
        reported.append(
            {
                "channel": serialize.channel_to_json(f.params),
                "min_choi_eigenvalue": f.min_choi_eigenvalue,
                "max_abs_choi_eigenvalue": f.max_abs_choi_eigenvalue,
                "is_positive": f.is_positive,
                "reverified": channels.reverify_finding(f),
            }
        )
    all_ok = all(r["reverified"] for r in reported)
    result = {"stats": stats, "findings": reported, "empty": not reported, "all_reverified": all_ok}
    return result, EXIT_OK if all_ok else EXIT_FAIL


_RUNNERS = {
    "classify": _classify,
    "sample": _sample,
    "volume": _volume,
    "verify": _verify,
    "su4": _su4,
    "blowup": _blowup,
}


def run_config(cfg):
    """Execute a :class:`RunConfig` (or its dict form); returns ``(payload, exit_status)``."""
    if isinstance(cfg, dict):
        cfg = RunConfig(**cfg)
    return _RUNNERS[cfg.command](cfg)


def make_envelope(cfg, result, wall_ms):
    return {
        "schema": SCHEMA,
        "version": __version__,
        "backend": BACKEND,
        "command": cfg.command,
        "config": dataclasses.asdict(cfg),
        "result": result,
        "wall_time_ms": wall_ms,
    }


# --- argument parsing -------------------------------------------------------------


def _triple_arg(text):
    parts = text.split(",")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}") from None
    if len(vals) != 3 or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return vals


def _seed_arg(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be a non-negative integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed_arg, default=None, help=f"RNG seed (default: ${SEED_ENV} or random)")
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOL, help="zero-eigenvalue tolerance")
    common.add_argument("--output", default=None, help="write the envelope here instead of stdout")
    common.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo chunks")

    parser = argparse.ArgumentParser(prog="paulivol", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify one channel")
    p.add_argument("--x", type=_triple_arg, help="scaling factors x1,x2,x3")
    p.add_argument("--t", type=_triple_arg, help="translation t1,t2,t3 (affine maps)")
    p.add_argument("--input", help="channel JSON file")
    p.add_argument("--mesh-order", type=int, default=channels.DEFAULT_MESH_ORDER)

    for name, helptext in (("volume", "Monte Carlo measure of a region"), ("sample", "sample Pauli channels")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--region", choices=sorted(volume.REGIONS), required=True)
        if name == "volume":
            p.add_argument("--samples", type=int, default=1_000_000)
        else:
            p.add_argument("--count", type=int, default=1000)
            p.add_argument("--format", choices=("csv", "json"), default="csv", help="data stream format")
            p.add_argument("--data", help="write rows here; otherwise they are embedded in the envelope")

    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--suite", choices=("all",) + verify.SUITES, default="all")
    p.add_argument("--samples", type=int, default=100_000)

    p = sub.add_parser("su4", parents=[common], help="sample Euler-angle density matrices")
    p.add_argument("--count", type=int, default=10_000)
    p.add_argument("--zero-alpha", action="store_true", help="force all Euler angles alpha to 0")
    p.add_argument("--data", help="write sampled matrices here as JSON lines")

    p = sub.add_parser("blowup", parents=[common], help="search general unital maps for large Choi eigenvalues")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--pauli-embedded", action="store_true", help="sample only Pauli channels")
    return parser


def _resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            v = int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be a non-negative integer, got {env!r}") from None
        if v < 0:
            raise UsageError(f"{SEED_ENV} must be non-negative")
        return v
    return secrets.randbits(32)


def config_from_args(args):
    opts = {}
    samples = 1
    fmt = "json"
    if args.command == "classify":
        opts = {"x": args.x, "t": args.t, "input": args.input, "mesh_order": args.mesh_order}
        if args.mesh_order < 2:
            raise UsageError("--mesh-order must be >= 2")
    elif args.command == "volume":
        opts = {"region": args.region}
        samples = args.samples
    elif args.command == "sample":
        opts = {"region": args.region, "data": args.data}
        samples = args.count
        fmt = args.format
    elif args.command == "verify":
        opts = {"suite": args.suite}
        samples = args.samples
    elif args.command == "su4":
        opts = {"zero_alpha": args.zero_alpha, "data": args.data}
        samples = args.count
    elif args.command == "blowup":
        opts = {"scale": args.scale, "pauli_embedded": args.pauli_embedded}
        samples = args.trials
    return RunConfig(
        command=args.command,
        samples=samples,
        seed=_resolve_seed(args.seed),
        tolerance=args.tolerance,
        output_format=fmt,
        output_path=args.output,
        workers=args.workers,
        options=opts,
    )


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        start = time.perf_counter()
        result, status = run_config(cfg)
        wall = (time.perf_counter() - start) * 1000.0
        text = json.dumps(make_envelope(cfg, result, wall), indent=2)
        if cfg.output_path:
            try:
                with open(cfg.output_path, "w") as fh:
                    fh.write(text + "\n")
            except OSError as exc:
                raise UsageError(f"cannot write {cfg.output_path}: {exc.strerror}") from exc
        else:
            print(text)
    except UsageError as exc:
        print(f"paulivol {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return status


if __name__ == "__main__":
    sys.exit(main())
