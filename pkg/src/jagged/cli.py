"""Command-line interface: ``jagged convert|type|slice|tojson|bench``.

Exit codes: 0 success, 1 parse or slicing error, 2 I/O or container format
error, 3 slice expression syntax error.  Results go to stdout, diagnostics
to stderr.
"""

from __future__ import annotations

import argparse
import json
import re
import statistics
import sys
import time
from pathlib import Path

from .datashape import typestr
from .errors import (
    BuilderError,
    ContainerIOError,
    FieldNotFoundError,
    FormatError,
    JaggedError,
    NoRecordError,
    ParseError,
    SelectorError,
    SliceError,
    StructureError,
)
from .jsonio import from_json, from_json_numbers, to_json
from .layout import Layout
from .slicing import At, Element, Field, Range, getitem, to_selector
from . import storage

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_IO = 2
EXIT_SYNTAX = 3


class ExpressionSyntaxError(ValueError):
    def __init__(self, position, message):
        self.position = position
        super().__init__(f"{message} at column {position}")


_INT = re.compile(r"[+-]?\d+")
_RANGE = re.compile(r"\s*([+-]?\d+)?\s*:\s*([+-]?\d+)?\s*(?::\s*([+-]?\d+)?\s*)?")


def _split_terms(expr: str):
    """Split at top-level commas; yields ``(column, term)``."""
    depth = 0
    quote = None
    start = 0
    i = 0
    while i < len(expr):
        c = expr[i]
        if quote:
            if c == "\\":
                i += 1
            elif c == quote:
                quote = None
        elif c in "\"'":
            quote = c
        elif c == "[":
            depth += 1
        elif c == "]":
            depth -= 1
            if depth < 0:
                raise ExpressionSyntaxError(i, "unbalanced ']'")
        elif c == "," and depth == 0:
            yield start, expr[start:i]
            start = i + 1
        i += 1
    if quote:
        raise ExpressionSyntaxError(len(expr), "unterminated string")
    if depth:
        raise ExpressionSyntaxError(len(expr), "unbalanced '['")
    yield start, expr[start:]


def _parse_term(column: int, term: str):
    text = term.strip()
    column += len(term) - len(term.lstrip())
    if not text:
        raise ExpressionSyntaxError(column, "empty selector")
    if text[0] in "\"'":
        if len(text) < 2 or text[-1] != text[0]:
            raise ExpressionSyntaxError(column, "malformed field name")
        if text[0] == '"':
            try:
                return Field(json.loads(text))
            except json.JSONDecodeError:
                raise ExpressionSyntaxError(column, "malformed field name") from None
        return Field(text[1:-1])
    if _INT.fullmatch(text):
        return At(int(text))
    if ":" in text and "[" not in text:
        m = _RANGE.fullmatch(text)
        if not m:
            raise ExpressionSyntaxError(column, f"malformed range {text!r}")
        start, stop, step = (None if g is None else int(g) for g in m.groups())
        if step == 0:
            raise ExpressionSyntaxError(column, "range step cannot be zero")
        return Range(start, stop, step)
    if text[0] == "[":
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            raise ExpressionSyntaxError(column, f"malformed array selector {text!r}") from None
        try:
            return to_selector(value)
        except (SelectorError, BuilderError) as err:
            raise ExpressionSyntaxError(column, str(err)) from None
    raise ExpressionSyntaxError(column, f"unrecognized selector {text!r}")


def parse_expression(expr: str) -> tuple:
    """Parse a slice expression such as ``"y", [0, 2], :, 1:`` into selectors.

    An empty (or all-whitespace) expression is the empty selection.

    >>> parse_expression('"y", 1, ::2')
    (Field(name='y'), At(index=1), Range(start=None, stop=None, step=2))
    """
    if not expr.strip():
        return ()
    return tuple(_parse_term(column, term) for column, term in _split_terms(expr))


class _Failure(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


def _load(path: str, ndjson: bool) -> Layout:
    """A container directory or a JSON file; any failure is an input error (exit 2)."""
    p = Path(path)
    try:
        if p.is_dir():
            return storage.read(p)
        with open(p, "rb") as f:
            return from_json(f, ndjson=ndjson)
    except (OSError, FormatError, StructureError) as err:
        raise _Failure(EXIT_IO, f"cannot read {path}: {err}") from None
    except (ParseError, BuilderError) as err:
        raise _Failure(EXIT_IO, f"invalid input {path}: {err}") from None


def _convert(path: str, ndjson: bool, numbers_depth: int | None) -> tuple[Layout, int]:
    """Parse a JSON file; parse errors exit 1, unreadable input exits 2."""
    try:
        with open(path, "rb") as f:
            if numbers_depth is not None:
                data = f.read()
                return from_json_numbers(data, numbers_depth), len(data)
            layout = from_json(f, ndjson=ndjson)
            return layout, f.tell()
    except OSError as err:
        raise _Failure(EXIT_IO, f"cannot read {path}: {err}") from None
    except (ParseError, BuilderError) as err:
        message = str(err)
        if err.offset is not None and "offset" not in message:
            message += f" at offset {err.offset}"
        raise _Failure(EXIT_PARSE, f"parse error in {path}: {message}") from None


def cmd_convert(args) -> int:
    layout, _ = _convert(args.input, args.ndjson, args.numbers_depth)
    try:
        storage.write(layout, args.output)
    except (OSError, FormatError) as err:
        raise _Failure(EXIT_IO, f"cannot write {args.output}: {err}") from None
    print(typestr(layout))
    return EXIT_OK


def cmd_type(args) -> int:
    print(typestr(_load(args.input, args.ndjson)))
    return EXIT_OK


def _format_scalar(value, as_json: bool) -> str:
    if as_json or not isinstance(value, (str, bool, int, float)) or value is None:
        return json.dumps(value, separators=(",", ":"), ensure_ascii=False)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value) if isinstance(value, str) else repr(value)


def cmd_slice(args) -> int:
    try:
        selectors = parse_expression(args.expression)
    except ExpressionSyntaxError as err:
        raise _Failure(EXIT_SYNTAX, f"slice expression: {err}") from None
    layout = _load(args.input, args.ndjson)
    try:
        result = getitem(layout, selectors)
    except (SliceError, FieldNotFoundError, NoRecordError) as err:
        raise _Failure(EXIT_PARSE, f"slicing error: {err}") from None
    if isinstance(result, Element):
        print(_format_scalar(result.to_value(), args.json))
    else:
        print(to_json(result))
    return EXIT_OK


def cmd_tojson(args) -> int:
    print(to_json(_load(args.input, args.ndjson)))
    return EXIT_OK


def cmd_bench(args) -> int:
    # untimed warm-up run: validates the input and compiles kernels
    _, nbytes = _convert(args.input, args.ndjson, args.numbers_depth)
    rates = []
    for i in range(args.repeat):
        t0 = time.perf_counter()
        _convert(args.input, args.ndjson, args.numbers_depth)
        elapsed = time.perf_counter() - t0
        rate = nbytes / 1e6 / elapsed
        rates.append(rate)
        print(f"run={i + 1} seconds={elapsed:.6f} mbps={rate:.3f}")
    print(f"median_mbps={statistics.median(rates):.3f}")
    return EXIT_OK


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jagged", description="Convert, inspect and slice jagged arrays.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="JSON file -> container directory; prints the type")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--ndjson", action="store_true", help="one JSON value per line")
    p.add_argument("--numbers-depth", type=_positive, metavar="N",
                   help="use the numbers-only fast path for N levels of nested lists")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("type", help="print the type of a container or JSON file")
    p.add_argument("input")
    p.add_argument("--ndjson", action="store_true")
    p.set_defaults(func=cmd_type)

    p = sub.add_parser("slice", help="apply a slice expression and print the result as JSON")
    p.add_argument("input")
    p.add_argument("expression", help="for example '\"y\", [0, 2], :, 1:'")
    p.add_argument("--json", action="store_true", help="print a single scalar result as JSON too")
    p.add_argument("--ndjson", action="store_true")
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("tojson", help="print a container or JSON file as compact JSON")
    p.add_argument("input")
    p.add_argument("--ndjson", action="store_true")
    p.set_defaults(func=cmd_tojson)

    p = sub.add_parser("bench", help="measure conversion throughput")
    p.add_argument("input")
    p.add_argument("--repeat", type=_positive, default=5, metavar="N")
    p.add_argument("--numbers-depth", type=_positive, metavar="N")
    p.add_argument("--ndjson", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Failure as err:
        print(f"jagged {args.command}: {err}", file=sys.stderr)
        return err.code
    except ContainerIOError as err:
        print(f"jagged {args.command}: {err}", file=sys.stderr)
        return EXIT_IO
    except JaggedError as err:
        # for example invalid UTF-8 in a string while printing
        print(f"jagged {args.command}: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
