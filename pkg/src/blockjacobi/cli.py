"""Command-line front end.

    blockjacobi spectrum OP.json [--samples N] [--gap-tol X] [--no-certify] [--format text|json|csv]
    blockjacobi bounds   OP.json ...
    blockjacobi bands    OP.json --out bands.csv
    blockjacobi verify   OP.json
    blockjacobi example  {sharpness,schrodinger,random} [--m M] [--p P] [--seed S] [--out PATH]

Exit codes: 0 ok/PASS, 2 parse, 3 validation, 4 numerical, 5 bound-check FAIL, 6 I/O.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from blockjacobi.hermitian import HermitianError, max_abs, nuclear_norm, psd_sqrt
from blockjacobi.operator import (
    OperatorError,
    PeriodicJacobiOperator,
    floquet_symbol,
    split_symbol,
    unroll,
    validate,
)
from blockjacobi.spectrum import (
    DEFAULT_SAMPLES,
    MIN_SAMPLES,
    BoundsReport,
    VerifyConfig,
    band_intervals,
    enclosure_bounds,
    interval_union_measure,
    make_discrete_schrodinger,
    make_sharpness_example,
    random_operator,
    sample_bands,
    verify_operator,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_NUMERIC = 4
EXIT_FAIL = 5
EXIT_IO = 6


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class ParseError(CliError):
    def __init__(self, message: str):
        super().__init__(message, EXIT_PARSE)


@dataclass
class RunConfig:
    num_samples: int = DEFAULT_SAMPLES
    gap_tol: float | None = None
    use_certified: bool = True
    fmt: str = "text"

    def verify_config(self) -> VerifyConfig:
        return VerifyConfig(num_samples=self.num_samples, gap_tol=self.gap_tol, use_certified=self.use_certified)

    def header(self) -> str:
        gap = "2*pad" if self.gap_tol is None else repr(self.gap_tol)
        return f"# samples={self.num_samples} gap_tol={gap} certified={str(self.use_certified).lower()}"


# -- operator files ---------------------------------------------------------


def _parse_entry(value, where: str) -> complex:
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value, 0.0)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise ParseError(f"{where}: expected a number or [re, im], got {value!r}")


def _parse_matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise ParseError(f"{where}: expected a non-empty list of rows")
    width = None
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or not row:
            raise ParseError(f"{where} row {i}: expected a non-empty list of entries")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"{where} row {i}: has {len(row)} entries, row 0 has {width}")
        out.append([_parse_entry(v, f"{where}[{i}][{j}]") for j, v in enumerate(row)])
    return np.array(out, dtype=np.complex128)


def parse_operator(text: str) -> PeriodicJacobiOperator:
    """Parse an operator file; raises :class:`ParseError` with line/field diagnostics."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError("top level must be an object with fields p, m, a, b")
    for key in ("p", "m", "a", "b"):
        if key not in data:
            raise ParseError(f"missing field {key!r}")
    for key in ("p", "m"):
        if not isinstance(data[key], int) or isinstance(data[key], bool):
            raise ParseError(f"field {key!r} must be an integer, got {data[key]!r}")
    blocks = {}
    for key in ("a", "b"):
        if not isinstance(data[key], list):
            raise ParseError(f"field {key!r} must be a list of matrices")
        blocks[key] = [_parse_matrix(mat, f"{key}[{k}]") for k, mat in enumerate(data[key])]
    return PeriodicJacobiOperator(data["p"], data["m"], blocks["a"], blocks["b"])


def _dump_entry(z: complex):
    z = complex(z)
    return z.real if z.imag == 0.0 else [z.real, z.imag]


def dump_operator(op: PeriodicJacobiOperator) -> str:
    """Canonical JSON text; floats are written round-trip exact."""
    data = {
        "p": op.p,
        "m": op.m,
        "a": [[[_dump_entry(z) for z in row] for row in blk] for blk in op.a],
        "b": [[[_dump_entry(z) for z in row] for row in blk] for blk in op.b],
    }
    return json.dumps(data, indent=1) + "\n"


def load_operator(path: str) -> PeriodicJacobiOperator:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from exc
    op = parse_operator(text)
    problems = validate(op)
    if problems:
        raise CliError("invalid operator:\n  " + "\n  ".join(problems), EXIT_INVALID)
    return op


# -- formatting ------------------------------------------------------------


def _f(x: float) -> str:
    return f"{x:.6f}"


def _interval_text(lo: float, hi: float) -> str:
    return f"[{_f(lo)}, {_f(hi)}]"


def _report_json(report: BoundsReport) -> dict:
    return {
        "theorem_bound": report.theorem_bound,
        "scalar_bound": report.scalar_bound,
        "enclosure_width_sum": report.enclosure_width_sum,
        "trace_identity_value": report.trace_identity_value,
        "measured_spectrum": {
            "intervals": [list(iv) for iv in report.measured_spectrum.intervals],
            "measure": report.measured_spectrum.measure,
        },
        "per_band_containment": report.per_band_containment,
        "bound_satisfied": report.bound_satisfied,
        "bands": [
            {
                "index": band.index + 1,
                "lo": band.lo,
                "hi": band.hi,
                "certified_lo": band.certified_lo,
                "certified_hi": band.certified_hi,
            }
            for band in report.bands
        ],
        "enclosure": {"minus": report.enclosure.minus.tolist(), "plus": report.enclosure.plus.tolist()},
        "pad": report.samples.pad,
        "lipschitz": report.samples.lipschitz,
        "config": {
            "num_samples": report.config.num_samples,
            "gap_tol": report.config.gap_tol,
            "use_certified": report.config.use_certified,
        },
        "checks": report.checks,
    }


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# -- commands --------------------------------------------------------------


def cmd_spectrum(path: str, cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    op = load_operator(path)
    report = verify_operator(op, cfg.verify_config())
    if cfg.fmt == "json":
        out.write(json.dumps(_report_json(report), indent=1) + "\n")
        return EXIT_OK
    if cfg.fmt == "csv":
        rows = [
            [band.index + 1, repr(band.lo), repr(band.hi), repr(band.certified_lo), repr(band.certified_hi)]
            for band in report.bands
        ]
        out.write(_csv_text(["band", "lo", "hi", "certified_lo", "certified_hi"], rows))
        return EXIT_OK
    union = report.measured_spectrum
    lines = [cfg.header(), f"operator: p={op.p} m={op.m} (fiber size {report.samples.operator.size})"]
    lines.append(f"pad: {report.samples.pad:.3e} (lipschitz {_f(report.samples.lipschitz)})")
    lines.append("bands (sampled -> certified):")
    for band in report.bands:
        lines.append(
            f"  {band.index + 1:3d}: {_interval_text(band.lo, band.hi)} -> "
            f"{_interval_text(band.certified_lo, band.certified_hi)}"
        )
    spans = " U ".join(_interval_text(lo, hi) for lo, hi in union.intervals)
    lines.append(f"spectrum: {spans}, measure {_f(union.measure)}")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_bounds(path: str, cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    op = load_operator(path)
    report = verify_operator(op, cfg.verify_config())
    passed = report.bound_satisfied
    code = EXIT_OK if passed else EXIT_FAIL
    if cfg.fmt == "json":
        out.write(json.dumps(_report_json(report), indent=1) + "\n")
        return code
    if cfg.fmt == "csv":
        rows = [[n + 1, repr(lo), repr(hi)] for n, (lo, hi) in enumerate(zip(report.enclosure.minus, report.enclosure.plus))]
        out.write(_csv_text(["n", "minus", "plus"], rows))
        return code
    lines = [cfg.header(), f"operator: p={op.p} m={op.m}"]
    lines.append(f"theorem bound 4 min_n Tr|a_n|: {_f(report.theorem_bound)}")
    if report.scalar_bound is None:
        lines.append("scalar bound 4 |a_1...a_p|^(1/p): n/a (m>1)")
    else:
        rel = "<=" if report.theorem_bound <= report.scalar_bound + 1e-12 else ">"
        lines.append(f"scalar bound 4 |a_1...a_p|^(1/p): {_f(report.scalar_bound)}")
        lines.append(
            f"  min |a_n| {_f(report.theorem_bound / 4)} {rel} geometric mean {_f(report.scalar_bound / 4)}"
        )
    lines.append("enclosure windows [minus, plus]:")
    for n, (lo, hi) in enumerate(zip(report.enclosure.minus, report.enclosure.plus)):
        lines.append(f"  {n + 1:3d}: {_interval_text(lo, hi)}")
    identity_ok = report.checks["window widths sum to 2 Tr|K1|"]
    lines.append(
        f"trace identity: sum widths {_f(report.enclosure_width_sum)} vs 4 Tr|a_corner| "
        f"{_f(report.trace_identity_value)} {'PASS' if identity_ok else 'FAIL'}"
    )
    lines.append(f"measure {_f(report.measured_spectrum.measure)} <= bound {_f(report.theorem_bound)}: "
                 f"{'PASS' if passed else 'FAIL'}")
    out.write("\n".join(lines) + "\n")
    return code


def cmd_bands(path: str, cfg: RunConfig, out_path: str | None, out=None) -> int:
    out = out or sys.stdout
    op = load_operator(path)
    samples = sample_bands(op, cfg.num_samples)
    header = ["x"] + [f"band_{n + 1}" for n in range(samples.curves.shape[0])]
    rows = ([repr(float(x))] + [repr(float(v)) for v in samples.curves[:, j]] for j, x in enumerate(samples.grid))
    text = _csv_text(header, rows)
    if out_path is None:
        out.write(text)
        return EXIT_OK
    try:
        Path(out_path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {out_path}: {exc.strerror or exc}", EXIT_IO) from exc
    return EXIT_OK


def invariant_checks(op: PeriodicJacobiOperator, report: BoundsReport) -> dict[str, bool]:
    """Per-input spot checks of the kernel, operator and band invariants."""
    norm = report.samples.operator
    samples = report.samples
    checks = {"operator validates": not validate(op)}

    xs = np.array([0.0, 0.7, math.pi, 4.0])
    fibers = floquet_symbol(norm, xs)
    checks["fibers exactly Hermitian"] = bool(np.all(fibers == np.conj(np.swapaxes(fibers, -1, -2))))
    shifted = floquet_symbol(norm, xs + 2.0 * math.pi)
    checks["symbol 2pi-periodic"] = bool(np.all(max_abs(fibers - shifted) <= 1e-12))
    diff = fibers[1] - fibers[2]
    m, n = norm.m, norm.size
    diff[:m, n - m:] = 0.0
    diff[n - m:, :m] = 0.0
    checks["only corner blocks depend on x"] = bool(np.all(diff == 0.0))

    split = split_symbol(norm)
    k1 = fibers[1] - split.k0
    generic = psd_sqrt(k1 @ k1.conj().T)
    scale = 1.0 + float(max_abs(split.abs_k1))
    checks["|K1| matches generic square root"] = float(max_abs(generic - split.abs_k1)) <= 1e-10 * scale
    checks["Tr|K1| = 2 Tr|a_corner|"] = abs(
        np.trace(split.abs_k1).real - 2.0 * nuclear_norm(norm.corner)
    ) <= 1e-10 * scale

    curves = samples.curves
    checks["band columns ascending"] = bool(np.all(np.diff(curves, axis=0) >= 0.0))
    step = abs(np.exp(1j * samples.spacing) - 1.0)
    drift = np.abs(np.diff(np.concatenate([curves, curves[:, :1]], axis=1), axis=1))
    checks["neighbouring samples within Lipschitz bound"] = bool(np.all(drift <= samples.lipschitz * step + 1e-8))
    checks["certified bands enclose samples"] = all(
        b.certified_lo <= b.lo <= b.hi <= b.certified_hi for b in report.bands
    )

    cfg = report.config
    doubled = unroll(op, 2)
    samples2 = sample_bands(doubled, cfg.num_samples)
    union2 = interval_union_measure(
        band_intervals(samples2, enclosure_bounds(doubled) if cfg.use_certified else None),
        cfg.gap_tol,
        cfg.use_certified,
    )
    checks["unroll invariance"] = report.measured_spectrum.hausdorff(union2) <= samples.pad + samples2.pad + 1e-12

    if any(not np.any(a) for a in op.a):
        checks["zero coupling gives flat bands"] = report.theorem_bound == 0.0 and all(
            b.width <= 1e-9 for b in report.bands
        )
    return checks


def cmd_verify(path: str, cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    op = load_operator(path)
    report = verify_operator(op, cfg.verify_config())
    checks = dict(report.checks)
    checks.update(invariant_checks(op, report))
    if cfg.fmt == "json":
        out.write(json.dumps({"checks": checks, "passed": all(checks.values())}, indent=1) + "\n")
    else:
        lines = [cfg.header()]
        lines += [f"{'PASS' if ok else 'FAIL'}  {name}" for name, ok in checks.items()]
        lines.append(f"{'PASS' if all(checks.values()) else 'FAIL'}  all checks ({len(checks)})")
        out.write("\n".join(lines) + "\n")
    return EXIT_OK if all(checks.values()) else EXIT_FAIL


def cmd_example(kind: str, m: int, p: int, seed: int, scale: float, out_path: str | None, out=None) -> int:
    out = out or sys.stdout
    if m < 1 or p < 1 or scale <= 0:
        raise ParseError(f"bad parameters: need m >= 1, p >= 1, scale > 0 (got m={m}, p={p}, scale={scale})")
    if kind == "sharpness":
        op = make_sharpness_example(m, p)
    elif kind == "schrodinger":
        op = make_discrete_schrodinger(p)
    else:
        op = random_operator(seed, p, m, scale)
    text = dump_operator(op)
    if out_path is None:
        out.write(text)
        return EXIT_OK
    try:
        Path(out_path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {out_path}: {exc.strerror or exc}", EXIT_IO) from exc
    return EXIT_OK


# -- entry point -----------------------------------------------------------


def _samples(text: str) -> int:
    n = int(text)
    if n < MIN_SAMPLES:
        raise argparse.ArgumentTypeError(f"must be >= {MIN_SAMPLES}")
    return n


def _gap_tol(text: str) -> float:
    x = float(text)
    if not x >= 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockjacobi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="operator JSON file")
    common.add_argument("--samples", type=_samples, default=DEFAULT_SAMPLES, help="x-grid size (default %(default)s)")
    common.add_argument("--gap-tol", type=_gap_tol, default=None, help="merge gaps up to this width (default 2*pad)")
    common.add_argument("--no-certify", action="store_true", help="use sampled instead of certified band ends")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")

    sub.add_parser("spectrum", parents=[common], help="bands, merged spectrum and its measure")
    sub.add_parser("bounds", parents=[common], help="theorem bound, enclosures, PASS/FAIL")
    bands = sub.add_parser("bands", parents=[common], help="CSV of band curves over the x-grid")
    bands.add_argument("--out", default=None, help="CSV path (default stdout)")
    sub.add_parser("verify", parents=[common], help="run every check on one operator")

    ex = sub.add_parser("example", help="write an example operator file")
    ex.add_argument("kind", choices=("sharpness", "schrodinger", "random"))
    ex.add_argument("--m", type=int, default=2)
    ex.add_argument("--p", type=int, default=1)
    ex.add_argument("--seed", type=int, default=0)
    ex.add_argument("--scale", type=float, default=1.0)
    ex.add_argument("--out", default=None, help="output path (default stdout)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "example":
            m = 1 if args.kind == "schrodinger" else args.m
            return cmd_example(args.kind, m, args.p, args.seed, args.scale, args.out)
        cfg = RunConfig(args.samples, args.gap_tol, not args.no_certify, args.format)
        if args.command == "spectrum":
            return cmd_spectrum(args.file, cfg)
        if args.command == "bounds":
            return cmd_bounds(args.file, cfg)
        if args.command == "bands":
            return cmd_bands(args.file, cfg, args.out)
        return cmd_verify(args.file, cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (HermitianError, OperatorError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
