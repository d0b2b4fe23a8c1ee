"""Command-line front end: ``cantor-quant <command> [options]``."""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from . import oracle, quantizer
from .formatting import decimal_str, exact_pair, parse_rational, rational_str
from .measure import moments

CAPS_ENV = "CANTOR_QUANT_CAPS"


class UsageError(Exception):
    pass


@dataclass
class Caps:
    depth: int = quantizer.DEFAULT_DEPTH_CAP
    enumeration: int = quantizer.DEFAULT_ENUMERATION_CAP


def caps_from_env(environ=os.environ) -> Caps:
    raw = environ.get(CAPS_ENV)
    if not raw:
        return Caps()
    try:
        depth, enum = (int(part) for part in raw.split(":"))
    except ValueError:
        raise UsageError(f"{CAPS_ENV} must look like 'L:E', got {raw!r}") from None
    if depth < 1 or enum < 1:
        raise UsageError(f"{CAPS_ENV} caps must be positive")
    return Caps(depth, enum)


def parse_subset(text: str) -> List[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"malformed subset {text!r}; expected e.g. 0,3") from None


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cantor-quant",
        description="Optimal n-means and exact quantization errors of the "
                    "infinite-similitude Cantor measure.")
    parser.add_argument("--format", choices=("text", "json", "csv"), default="text")
    parser.add_argument("--depth-cap", type=_positive_int, default=None)
    parser.add_argument("--enum-cap", type=_positive_int, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("moments", help="mean, variance and second moment")

    p = sub.add_parser("error", help="exact n-th quantization error")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--upto", action="store_true", help="table for 2..N")

    p = sub.add_parser("optimal", help="optimal sets of n-means")
    p.add_argument("--n", type=_positive_int, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--subset", default=None,
                       help="zero-based indices into the sorted level set")
    group.add_argument("--all", action="store_true", help="every optimal set")

    p = sub.add_parser("split", help="successors of an optimal set of n-means")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--subset", default=None)

    p = sub.add_parser("verify", help="compare with the discretised DP oracle")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--epsilon", type=_rational_arg, default=oracle.DEFAULT_EPSILON)

    p = sub.add_parser("export-plot", help="points, boundaries and cell errors")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--subset", default=None)
    return parser


def _default_subset(n: int) -> List[int]:
    if n < 2:
        return []
    return list(range(n - 2 ** quantizer.level_index(n)))


def _optimal_set(n: int, subset_text: Optional[str], caps: Caps) -> quantizer.QuantizerSet:
    subset = parse_subset(subset_text) if subset_text is not None else _default_subset(n)
    try:
        return quantizer.build_optimal_set(n, subset, depth_cap=caps.depth)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _csv_text(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _set_text(qs: quantizer.QuantizerSet) -> str:
    lines = []
    for pt in qs:
        lines.append(f"  {pt.label:<16} {rational_str(pt.position):>14}  "
                     f"{decimal_str(pt.position)}")
    d = quantizer.set_distortion(qs)
    lines.append(f"  distortion = {rational_str(d)} ≈ {decimal_str(d)}")
    return "\n".join(lines)


def _cmd_moments(args, caps):
    m = moments()
    values = [("mean", m.mean), ("variance", m.variance),
              ("second_raw_moment", m.second_raw_moment)]
    if args.format == "json":
        return 0, {name: exact_pair(v) for name, v in values}
    if args.format == "csv":
        return 0, _csv_text([["quantity", "exact", "decimal"]]
                            + [[k, rational_str(v), decimal_str(v)] for k, v in values])
    return 0, "\n".join(f"{k} = {rational_str(v)} ≈ {decimal_str(v)}" for k, v in values)


def _cmd_error(args, caps):
    ns = range(2, args.n + 1) if args.upto and args.n >= 2 else [args.n]
    values = [(n, quantizer.quantization_error(n)) for n in ns]
    if args.format == "json":
        return 0, [{"n": n, "V_n": exact_pair(v)} for n, v in values]
    if args.format == "csv":
        return 0, _csv_text([["n", "exact", "decimal"]]
                            + [[n, rational_str(v), decimal_str(v)] for n, v in values])
    return 0, "\n".join(f"V_{n} = {rational_str(v)} ≈ {decimal_str(v)}" for n, v in values)


def _cmd_optimal(args, caps):
    if args.all:
        try:
            sets = quantizer.enumerate_optimal_sets(args.n, cap=caps.enumeration,
                                                    depth_cap=caps.depth)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        sets = [_optimal_set(args.n, args.subset, caps)]
    return 0, _render_sets(args, sets)


def _cmd_split(args, caps):
    base = _optimal_set(args.n, args.subset, caps)
    successors = quantizer.split_step(base)
    if args.format == "json":
        return 0, {"from": quantizer.set_record(base),
                   "successors": [quantizer.set_record(s) for s in successors]}
    if args.format == "text":
        head = f"optimal set of {args.n}-means:\n{_set_text(base)}\n"
        return 0, head + _render_sets(args, successors, title="successor")
    return 0, _render_sets(args, successors)


def _render_sets(args, sets, title="set"):
    if args.format == "json":
        return [quantizer.set_record(s) for s in sets]
    if args.format == "csv":
        rows = [["set", "position", "position_decimal", "kind", "word"]]
        for k, s in enumerate(sets):
            rows.extend([k] + r for r in quantizer.set_csv_rows(s)[1:])
        return _csv_text(rows)
    blocks = [f"{title} {k} ({len(s)} points):\n{_set_text(s)}" for k, s in enumerate(sets)]
    return "\n".join(blocks)


def _cmd_verify(args, caps):
    try:
        report = oracle.compare(args.n, args.epsilon)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    code = 0 if report.passed else 1
    record = oracle.report_record(report)
    if args.format == "json":
        return code, record
    if args.format == "csv":
        flat = [[k, json.dumps(v) if isinstance(v, (dict, list)) else v]
                for k, v in record.items()]
        return code, _csv_text([["field", "value"]] + flat)
    lines = [
        f"{'PASS' if report.passed else 'FAIL'}: n={report.n} epsilon={rational_str(report.epsilon)}",
        f"  exact V_n          = {rational_str(report.exact_error)} ≈ {decimal_str(report.exact_error)}",
        f"  atoms              = {report.atoms}",
        f"  collapse bound     = {rational_str(report.collapse_bound)} ≈ {decimal_str(report.collapse_bound)}",
    ]
    if report.dp_exact_distortion is not None:
        lines.append(f"  DP distortion      ≈ {decimal_str(report.dp_exact_distortion)}")
        lines.append(f"  |DP - V_n|         ≈ "
                     f"{decimal_str(abs(report.dp_exact_distortion - report.exact_error))}")
        lines.append("  DP centres         = "
                     + ", ".join(f"{p:.12g}" for p in report.dp_points))
    lines.append(f"  within bound       = {report.within_bound}")
    lines.append(f"  separates V_n±1    = {report.separates_neighbours}")
    lines.append(f"  matches alpha_n(I) = {report.matches_optimal_set}")
    lines.extend(f"  note: {note}" for note in report.notes)
    return code, "\n".join(lines)


def plot_rows(qs: quantizer.QuantizerSet) -> List[List]:
    rows = [["record", "index", "label", "position", "position_decimal",
             "piece_lo", "piece_hi", "error", "error_decimal"]]
    for i, pt in enumerate(qs):
        piece = pt.piece
        rows.append(["point", i, pt.label, rational_str(pt.position),
                     decimal_str(pt.position), rational_str(piece.lo),
                     rational_str(piece.hi), rational_str(pt.error), decimal_str(pt.error)])
    if len(qs) > 1:
        for i, b in enumerate(quantizer.voronoi_boundaries(qs)):
            rows.append(["boundary", i, "", rational_str(b), decimal_str(b), "", "", "", ""])
    return rows


def _cmd_export_plot(args, caps):
    qs = _optimal_set(args.n, args.subset, caps)
    rows = plot_rows(qs)
    if args.format == "json":
        header = rows[0]
        return 0, [dict(zip(header, r)) for r in rows[1:]]
    return 0, _csv_text(rows)


COMMANDS = {
    "moments": _cmd_moments,
    "error": _cmd_error,
    "optimal": _cmd_optimal,
    "split": _cmd_split,
    "verify": _cmd_verify,
    "export-plot": _cmd_export_plot,
}


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        caps = caps_from_env()
        if args.depth_cap is not None:
            caps.depth = args.depth_cap
        if args.enum_cap is not None:
            caps.enumeration = args.enum_cap
        code, payload = COMMANDS[args.command](args, caps)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(f"cantor-quant: error: {exc}", file=stderr)
        return 2
    if args.format == "json":
        inputs = {k: (rational_str(v) if isinstance(v, Fraction) else v)
                  for k, v in vars(args).items() if k not in ("command", "format")}
        payload = json.dumps({"command": args.command, "inputs": inputs,
                              "results": payload}, indent=2)
    stdout.write(payload if payload.endswith("\n") else payload + "\n")
    if code == 1:
        print("cantor-quant: verification failed", file=stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
