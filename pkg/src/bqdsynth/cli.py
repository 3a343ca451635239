"""Command line front end: ``bqd synth | count | table | random``.

Exit codes: 0 success, 1 synthesis or verification failure, 2 malformed
input, 3 non-unitary input, 4 argument out of range, 5 unsupported method,
6 I/O error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from dataclasses import dataclass

from . import cost, lamat
from .circuit import export_qasm
from .errors import (
    DimensionError,
    ParseError,
    RangeError,
    SynthesisError,
    UnsupportedError,
    ValidationError,
)
from .matfile import format_matrix, read_matrix
from .synthesis import MethodKind, SynthMethod, synthesize

EXIT_FAIL, EXIT_PARSE, EXIT_VALIDATION, EXIT_RANGE, EXIT_UNSUPPORTED, EXIT_IO = 1, 2, 3, 4, 5, 6
VERIFY_MAX_QUBITS = 8
TOLERANCE_ENV = "BQD_TOLERANCE"


@dataclass
class RunConfig:
    method: MethodKind
    level: int | None
    tolerance: float
    seed: int | None
    input_path: str
    output_path: str | None
    verify: bool | None
    format: str = "qasm"
    report_path: str | None = None


def default_tolerance() -> float:
    raw = os.environ.get(TOLERANCE_ENV)
    if raw is None:
        return lamat.BOUNDARY_TOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise RangeError(f"{TOLERANCE_ENV}={raw!r} is not a number") from exc
    if not tol > 0:
        raise RangeError(f"{TOLERANCE_ENV} must be positive")
    return tol


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".bqd-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_synth(cfg: RunConfig, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    if cfg.level is not None and cfg.method is not MethodKind.BQD:
        raise RangeError("--level only applies to --method bqd")
    tol = cfg.tolerance * math.sqrt(_dim_hint(cfg.input_path))
    u = read_matrix(cfg.input_path, tol=tol)
    n = lamat.num_qubits(u)
    verify = cfg.verify if cfg.verify is not None else n <= VERIFY_MAX_QUBITS
    circ, report = synthesize(u, SynthMethod(cfg.method, cfg.level), verify=verify, tol=tol)
    bound = cfg.tolerance * math.sqrt(u.shape[0])
    report_lines = report.lines()
    if cfg.format == "csv":
        body = "n,l,cnot,one_qubit,total\n" + (
            f"{n},{report.level if report.level is not None else cfg.method.value},"
            f"{report.counts.cnot},{report.counts.one_qubit},{report.counts.total}\n"
        )
    elif cfg.format == "counts":
        body = "\n".join(report_lines) + "\n"
    else:
        body = export_qasm(circ)
    if report.error is not None and report.error > bound:
        err.write("\n".join(report_lines) + "\n")
        err.write(f"verification failed: error {report.error:.3e} > {bound:.3e}\n")
        return EXIT_FAIL
    report_text = "\n".join(report_lines) + "\n"
    if cfg.report_path:
        write_atomic(cfg.report_path, report_text)
    if cfg.output_path:
        write_atomic(cfg.output_path, body)
        out.write(report_text)
    else:
        out.write(body)
        if cfg.format == "qasm":
            err.write(report_text)
    return 0


def _dim_hint(path: str) -> int:
    # Header dimension, used only to scale the boundary tolerance.
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                s = line.strip()
                if s and not s.startswith("#"):
                    parts = s.split()
                    return max(1, int(parts[1])) if len(parts) == 2 else 1
    except (ValueError, IndexError):
        return 1
    return 1


_METHOD_ALIASES = {
    "bqd": cost.CostMethod.BQD,
    "csd": cost.CostMethod.CSD_IMPROVED,
    "csd-improved": cost.CostMethod.CSD_IMPROVED,
    "csd-original": cost.CostMethod.CSD_ORIGINAL,
    "qsd": cost.CostMethod.QSD_CITED,
    "qsd-cited": cost.CostMethod.QSD_CITED,
    "qsd-constructed": cost.CostMethod.QSD_CONSTRUCTED,
    "lower-bound": cost.CostMethod.LOWER_BOUND,
}


def cmd_count(method: str, n: int, level: int | None, all_levels: bool, out=None) -> int:
    out = out or sys.stdout
    if method in cost.ASYMPTOTIC_ONLY:
        cost.asymptotic_only(method)
    if method not in _METHOD_ALIASES:
        raise UnsupportedError(f"unknown method {method!r}")
    kind = _METHOD_ALIASES[method]
    if n < 2:
        raise RangeError(f"n must be >= 2, got {n}")
    if kind is cost.CostMethod.BQD:
        if all_levels:
            levels = list(range(2, n + 1))
        else:
            levels = [level if level is not None else -(-2 * n // 3)]
            levels[0] = min(n, max(2, levels[0]))
        for l in levels:
            c, o = cost.cnot_count_bqd(n, l), cost.onequbit_count_bqd(n, l)
            out.write(f"n={n} l={l} cnot={c} one_qubit={o} total={c + o}\n")
        return 0
    if level is not None or all_levels:
        raise RangeError("levels only apply to --method bqd")
    q = cost.CostQuery(n, kind)
    c = cost.comparison_counts(q)
    try:
        o = cost.comparison_onequbit_counts(q)
    except UnsupportedError:
        out.write(f"n={n} cnot={c}\n")
    else:
        out.write(f"n={n} cnot={c} one_qubit={o} total={c + o}\n")
    return 0


def cmd_table(which: str, out=None) -> int:
    out = out or sys.stdout
    if which == "lnn":
        out.write(cost.lnn_table())
    elif which == "best":
        out.write("n,l,cnot,one_qubit,total\n")
        for n in range(cost.TABLE_MIN_N, cost.TABLE_MAX_N + 1):
            l = cost.best_level(n)
            c, o = cost.cnot_count_bqd(n, l), cost.onequbit_count_bqd(n, l)
            out.write(f"{n},{l},{c},{o},{c + o}\n")
    else:
        out.write(cost.generate_tables()[int(which)])
    return 0


def cmd_random(n: int, seed: int, path: str | None, out=None) -> int:
    out = out or sys.stdout
    u = lamat.haar_random_unitary(n, seed)
    text = format_matrix(u, (f"Haar-random unitary, n={n}, seed={seed}",))
    if path:
        write_atomic(path, text)
    else:
        out.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bqd", description="Unitary-to-circuit synthesis and gate-count tables.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a circuit from a matrix file")
    s.add_argument("--method", choices=[m.value for m in MethodKind], default="bqd")
    s.add_argument("--level", "-l", type=int)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", dest="output")
    s.add_argument("--report")
    s.add_argument("--format", choices=["qasm", "counts", "csv"], default="qasm")
    s.add_argument("--tolerance", type=float)
    s.add_argument("--seed", type=int)
    v = s.add_mutually_exclusive_group()
    v.add_argument("--verify", dest="verify", action="store_true", default=None)
    v.add_argument("--no-verify", dest="verify", action="store_false")

    c = sub.add_parser("count", help="print formula gate counts")
    c.add_argument("--method", default="bqd")
    c.add_argument("-n", type=int, required=True)
    c.add_argument("--level", "-l", type=int)
    c.add_argument("--all-levels", action="store_true")

    t = sub.add_parser("table", help="print a cost table as CSV")
    t.add_argument("which", choices=["1", "2", "3", "lnn", "best"])

    r = sub.add_parser("random", help="write a Haar-random unitary")
    r.add_argument("-n", type=int, required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "synth":
            tol = args.tolerance if args.tolerance is not None else default_tolerance()
            if not tol > 0:
                raise RangeError("tolerance must be positive")
            cfg = RunConfig(
                method=MethodKind(args.method),
                level=args.level,
                tolerance=tol,
                seed=args.seed,
                input_path=args.input,
                output_path=args.output,
                verify=args.verify,
                format=args.format,
                report_path=args.report,
            )
            return cmd_synth(cfg)
        if args.command == "count":
            return cmd_count(args.method, args.n, args.level, args.all_levels)
        if args.command == "table":
            return cmd_table(args.which)
        return cmd_random(args.n, args.seed, args.out)
    except ParseError as exc:
        return _fail(exc, EXIT_PARSE)
    except DimensionError as exc:
        return _fail(exc, EXIT_PARSE)
    except ValidationError as exc:
        return _fail(exc, EXIT_VALIDATION)
    except RangeError as exc:
        return _fail(exc, EXIT_RANGE)
    except UnsupportedError as exc:
        return _fail(exc, EXIT_UNSUPPORTED)
    except OSError as exc:
        return _fail(exc, EXIT_IO)
    except SynthesisError as exc:
        return _fail(exc, EXIT_FAIL)


def _fail(exc: Exception, code: int) -> int:
    sys.stderr.write(f"bqd: error: {exc}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
