"""qdf command line.

Exit codes:
  0 = success, no error-level findings
  1 = findings (validation errors, decode mismatches, fmt rewrote the input)
  2 = operational failure (unreadable or unparsable input, bad usage)

Every PATH may be ``-`` for standard input.
"""
from __future__ import annotations

import argparse
import functools
import json
import sys
from typing import BinaryIO, TextIO

from . import __version__
from .analysis import Consistency, check_transcriptions, convert_units, export_csv, stats
from .codec import serialize
from .diagnostics import QdfError
from .dtd import UNITS
from .parser import ParseResult, parse, parse_file
from .render import render_svg, render_text
from .validator import Strictness, validate

EXIT_OK, EXIT_FINDINGS, EXIT_FAILURE = 0, 1, 2
_MARKS = {Consistency.MATCH: "\u2713", Consistency.MISMATCH: "\u2717", Consistency.UNCHECKED: "-"}


class _Io:
    def __init__(self, stdin: BinaryIO | None, stdout: TextIO | None, stderr: TextIO | None):
        self.stdin = stdin if stdin is not None else sys.stdin.buffer
        self.stdout = stdout if stdout is not None else sys.stdout
        self.stderr = stderr if stderr is not None else sys.stderr

    def read(self, path: str) -> tuple[bytes | None, ParseResult]:
        if path == "-":
            data = self.stdin.read()
            return data, parse(data, filename="<stdin>")
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except OSError:
            return None, parse_file(path)
        return data, parse(data, filename=path)

    def fail(self, result: ParseResult) -> int:
        for d in result.diagnostics:
            if d.is_error:
                print(d, file=self.stderr)
        return EXIT_FAILURE

    def emit(self, text: str, out: str | None) -> None:
        if out is None or out == "-":
            self.stdout.write(text)
        else:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)


def _cmd_validate(args, io: _Io) -> int:
    _, result = io.read(args.path)
    name = "<stdin>" if args.path == "-" else args.path
    strictness = Strictness.STRICT if args.strict else Strictness.LENIENT
    if result.document is None:
        if args.format == "json":
            payload = {"file": name, "strictness": strictness.value, "fatal": True,
                       "diagnostics": [d.to_dict() for d in result.diagnostics]}
            io.stdout.write(json.dumps(payload, indent=2) + "\n")
            return EXIT_FAILURE
        return io.fail(result)
    report = validate(result.document, strictness)
    if args.format == "json":
        payload = {"file": name, "strictness": strictness.value, "fatal": False}
        payload.update(report.to_dict())
        io.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        for d in report.diagnostics:
            io.stdout.write(f"{d}\n")
        io.stdout.write(f"{name}: {report.summary()}\n")
    return EXIT_OK if report.ok else EXIT_FINDINGS


def _cmd_decode(args, io: _Io) -> int:
    _, result = io.read(args.path)
    if result.document is None:
        return io.fail(result)
    reports = check_transcriptions(result.document)
    marks = _MARKS
    try:
        "".join(marks.values()).encode(getattr(io.stdout, "encoding", None) or "utf-8")
    except (UnicodeEncodeError, LookupError):
        marks = {c: "" for c in Consistency}
    io.stdout.write(f"{'cord':<12} {'decoded':>8} {'transcription':>13}  status\n")
    for r in reports:
        decoded = "?" if r.decoded is None else str(r.decoded)
        written = "-" if r.transcription is None else str(r.transcription)
        io.stdout.write(f"{r.cord_index or '?':<12} {decoded:>8} {written:>13}  "
                        f"{marks[r.consistent]} {r.consistent.value}".lstrip() + "\n")
    mismatches = sum(1 for r in reports if r.consistent is Consistency.MISMATCH)
    io.stdout.write(f"{len(reports)} cords, {mismatches} mismatches\n")
    return EXIT_FINDINGS if mismatches else EXIT_OK


def _cmd_stats(args, io: _Io) -> int:
    _, result = io.read(args.path)
    if result.document is None:
        return io.fail(result)
    s = stats(result.document)
    if args.format == "json":
        io.stdout.write(json.dumps(s.as_dict(), indent=2) + "\n")
        return EXIT_OK
    by_type = ", ".join(f"{k} {v}" for k, v in s.cords_by_type.items())
    by_kind = ", ".join(f"{k} {v}" for k, v in s.knots_by_kind.items())
    d = s.as_dict()
    io.stdout.write(
        f"maincords: {s.maincord_count}\n"
        f"cords: {s.cord_count} ({by_type}); knots: {s.knot_count} ({by_kind})\n"
        f"materials: {s.material_count}\n"
        f"total cord lenght: {d['total_cord_lenght']}{(' ' + s.unit) if s.unit else ''}\n"
    )
    return EXIT_OK


def _cmd_convert(args, io: _Io) -> int:
    _, result = io.read(args.path)
    if result.document is None:
        return io.fail(result)
    try:
        text = serialize(convert_units(result.document, args.to))
    except (QdfError, ValueError) as exc:
        print(f"qdf convert: {exc}", file=io.stderr)
        return EXIT_FAILURE
    io.emit(text, args.out)
    return EXIT_OK


def _cmd_export(args, io: _Io) -> int:
    _, result = io.read(args.path)
    if result.document is None:
        return io.fail(result)
    io.emit(export_csv(result.document), args.out)
    return EXIT_OK


def _cmd_render(args, io: _Io) -> int:
    _, result = io.read(args.path)
    if result.document is None:
        return io.fail(result)
    try:
        text = render_svg(result.document) if args.format == "svg" else render_text(result.document)
    except QdfError as exc:
        print(f"qdf render: {exc}", file=io.stderr)
        return EXIT_FAILURE
    io.emit(text, args.out)
    return EXIT_OK


def _cmd_fmt(args, io: _Io) -> int:
    data, result = io.read(args.path)
    if result.document is None:
        return io.fail(result)
    try:
        text = serialize(result.document)
    except QdfError as exc:
        print(f"qdf fmt: {exc}", file=io.stderr)
        return EXIT_FAILURE
    changed = text.encode("utf-8") != data
    if args.write and args.path != "-":
        if changed:
            with open(args.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    else:
        io.stdout.write(text)
    return EXIT_FINDINGS if changed else EXIT_OK


@functools.lru_cache(maxsize=None)
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdf", description="Tools for Quipu Description Format (QDF 0.2) files.",
        epilog="exit status: 0 ok, 1 findings, 2 failure",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a file against the QDF rules")
    p.add_argument("path")
    p.add_argument("--strict", action="store_true",
                   help="report prolog, segment-length, position and forward-attach warnings as errors")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("decode", help="compare knot sums with transcriptions")
    p.add_argument("path")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("stats", help="count cords, knots and materials")
    p.add_argument("path")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("convert", help="rescale lengths to another metric unit")
    p.add_argument("path")
    p.add_argument("--to", required=True, choices=UNITS)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("export", help="write one CSV row per cord")
    p.add_argument("path")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("render", help="draw the cord structure as text or SVG")
    p.add_argument("path")
    p.add_argument("--format", choices=("text", "svg"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("fmt", help="print or rewrite the canonical form")
    p.add_argument("path")
    p.add_argument("--write", action="store_true", help="rewrite the file in place")
    p.set_defaults(func=_cmd_fmt)
    return parser


def main(argv: list[str] | None = None, *, stdin: BinaryIO | None = None,
         stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    io = _Io(stdin, stdout, stderr)
    try:
        return args.func(args, io)
    except OSError as exc:
        print(f"qdf {args.command}: {exc}", file=io.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
