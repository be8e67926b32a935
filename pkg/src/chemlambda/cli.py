"""Command-line interface.

Exit codes: 0 success, 1 domain error (bad mol file, not a lambda term,
bad weights), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import analysis, export
from .lambdacalc import (
    LambdaSyntaxError, NotLambda, compile, decompile, format_term, parse_lambda,
)
from .molgraph import MolError, parse_document, parse_mol, serialize_mol, validate
from .rewrites import catalog_text
from .scheduler import AlgorithmConfig, load_weights, reduce, trace_json, trace_text

WEIGHTS_ENV = "CHEMLAMBDA_WEIGHTS"


class DomainError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DomainError(f"{path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load_mol(path: str):
    try:
        return parse_mol(_read(path))
    except MolError as exc:
        raise DomainError("\n".join(
            f"{path}:{ln}: {msg} [{code}]" if ln is not None else f"{path}: {msg} [{code}]"
            for ln, code, msg in exc.errors)) from None


def _render(m, fmt: str) -> str:
    if fmt == "dot":
        return export.to_dot(m)
    if fmt == "json":
        return export.to_json(m)
    return serialize_mol(m)


def cmd_check(args) -> int:
    text = _read(args.file)
    report = validate(parse_document(text))
    for ln, msg in report.warnings:
        print(f"{args.file}:{ln}: warning: {msg}", file=sys.stderr)
    if not report.ok:
        for ln, code, msg in report.errors:
            print(f"{args.file}:{ln}: {msg} [{code}]", file=sys.stderr)
        return 1
    print(f"ok {len(parse_mol(text))} nodes")
    return 0


def cmd_reduce(args) -> int:
    m = _load_mol(args.file)
    weights_path = args.weights or os.environ.get(WEIGHTS_ENV)
    weights = {}
    if weights_path:
        try:
            weights = load_weights(_read(weights_path))
        except ValueError as exc:
            raise DomainError(f"{weights_path}: {exc}") from None
    try:
        cfg = AlgorithmConfig(
            variant="deterministic" if args.algo == "det" else "random",
            weights=weights, seed=args.seed, max_cycles=args.max_cycles,
            snapshot_every=args.snapshot_every, l_t_literal=args.l_t_literal)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    trace = reduce(m, cfg)
    _write(args.output, _render(trace.final, args.format))
    if args.trace:
        text = trace_json(trace) if args.trace.endswith(".json") else trace_text(trace)
        _write(args.trace, text)
    print(f"termination {trace.termination} cycles {trace.cycles} "
          f"moves {trace.moves_applied()}", file=sys.stderr)
    return 0


def cmd_compile(args) -> int:
    try:
        term = parse_lambda(args.term)
    except LambdaSyntaxError as exc:
        raise DomainError(f"syntax error: {exc}") from None
    _write(args.output, _render(compile(term), args.format))
    return 0


def cmd_decompile(args) -> int:
    m = _load_mol(args.file)
    try:
        term = decompile(m)
    except NotLambda as exc:
        raise DomainError(f"not a lambda term: {exc}") from None
    print(format_term(term))
    return 0


def cmd_quine(args) -> int:
    m = _load_mol(args.file)
    report = analysis.detect_quine(m, AlgorithmConfig(), args.max_period)
    if report.is_quine:
        print(f"quine period {report.period}")
    else:
        print(f"not a quine (checked {report.period} steps)")
    return 0


def cmd_moves(args) -> int:
    sys.stdout.write(catalog_text(args.l_t_literal))
    return 0


def cmd_stats(args) -> int:
    print(json.dumps(analysis.stats(_load_mol(args.file)), indent=1))
    return 0


def cmd_canon(args) -> int:
    sys.stdout.write(analysis.canonical_form(_load_mol(args.file)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chemlambda",
                                     description="chemlambda graph-rewriting engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a mol file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", help="reduce a molecule")
    p.add_argument("file")
    p.add_argument("--algo", choices=["det", "random"], default="det")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights", help=f"KIND value file (default: ${WEIGHTS_ENV})")
    p.add_argument("--max-cycles", type=int, default=10000)
    p.add_argument("--snapshot-every", type=int, default=0)
    p.add_argument("--trace", help="write the trace here (.json for JSON)")
    p.add_argument("--format", choices=["mol", "dot", "json"], default="mol")
    p.add_argument("-o", "--output")
    p.add_argument("--l-t-literal", action="store_true",
                   help="use the L-T move exactly as printed")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("compile", help="compile a lambda term to mol")
    p.add_argument("term")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=["mol", "dot", "json"], default="mol")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("decompile", help="read a lambda term back from a molecule")
    p.add_argument("file")
    p.set_defaults(func=cmd_decompile)

    p = sub.add_parser("quine", help="test for a deterministic quine")
    p.add_argument("file")
    p.add_argument("--max-period", type=int, default=1)
    p.set_defaults(func=cmd_quine)

    p = sub.add_parser("moves", help="print the move catalog")
    p.add_argument("--list", action="store_true", required=True)
    p.add_argument("--l-t-literal", action="store_true")
    p.set_defaults(func=cmd_moves)

    p = sub.add_parser("stats", help="node census and bond counts")
    p.add_argument("file")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("canon", help="print the canonical form")
    p.add_argument("file")
    p.set_defaults(func=cmd_canon)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
