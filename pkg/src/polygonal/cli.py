"""Command-line interface: ``polygonal {analyze,search,verify,oracle,reduce}``.

Exit codes: 0 success / found / polygonal, 2 input error, 3 negative or
exhausted result.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .freegroup import Word, WordError, are_independent, cyclic_reduce, parse_word, primitive_root
from .graphprops import graph_summary, manning_obstruction
from .polygon import SearchBounds, default_jobs, search
from .reduce import is_diskbusting, minimize
from .surface import (
    ForbiddenFold,
    LabelMismatch,
    SidePairingError,
    oracle_enumerate,
    polygons_for,
    verify_side_pairing,
)
from .whitehead import Polynomial, whitehead_graph

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NEGATIVE = 3


class InputError(Exception):
    pass


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _words(texts: Sequence[str], rank: int | None) -> list[Word]:
    try:
        words = [parse_word(t, rank) for t in texts]
    except WordError as exc:
        raise InputError(str(exc)) from None
    top = max(w.rank for w in words)
    return [w.with_rank(top) for w in words]


def _bounds(args) -> SearchBounds:
    try:
        return SearchBounds(args.max_exp, args.max_coeff, args.max_edges, args.time_budget)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_analyze(args, out) -> int:
    words = _words(args.words, args.rank)
    reduced = [cyclic_reduce(w) for w in words]
    if any(not w.letters for w in reduced):
        raise InputError("empty word after reduction")
    report: dict = {
        "input": [str(w) for w in words],
        "rank": words[0].rank,
        "cyclically_reduced": {"op": "cyclic_reduce", "value": [str(w) for w in reduced]},
        "roots": {
            "op": "primitive_root",
            "value": [{"root": str(r), "exponent": k} for r, k in map(primitive_root, reduced)],
        },
        "independent": {"op": "are_independent", "value": are_independent(reduced)},
    }
    if report["independent"]["value"]:
        verdict = is_diskbusting(reduced)
        trace = verdict.trace
        report["minimization"] = {
            "op": "minimize",
            "initial_length": trace.initial_length,
            "final_length": trace.final_length,
            "steps": len(trace.steps),
            "final": [str(w) for w in trace.final],
        }
        report["diskbusting"] = verdict.to_json()
    else:
        report["minimization"] = None
        report["diskbusting"] = None
    g = whitehead_graph(reduced)
    report["whitehead_graph"] = graph_summary(g)
    report["manning"] = [dict(word=str(w), **manning_obstruction(w).to_json()) for w in reduced]
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(g.to_dot())
        report["dot"] = args.dot
    if args.certify:
        if not report["independent"]["value"]:
            raise InputError("word set is not independent")
        result = search(reduced, _bounds(args), args.jobs)
        report["certificate"] = result.to_json()
    _emit(report, out)
    return EXIT_OK


def cmd_search(args, out) -> int:
    words = _words(args.words, args.rank)
    try:
        result = search(words, _bounds(args), args.jobs, find_all=args.all)
    except WordError as exc:
        raise InputError(str(exc)) from None
    payload = {"input": [str(w) for w in words], **result.to_json()}
    _emit(payload, out)
    return EXIT_OK if result.status == "found" else EXIT_NEGATIVE


def parse_pairs(text: str) -> list[tuple[int, int]]:
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip().strip("{}")
        parts = chunk.split("-")
        if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
            raise InputError(f"malformed pair {chunk!r}; expected i-j")
        pairs.append((int(parts[0]), int(parts[1])))
    return pairs


def cmd_verify(args, out) -> int:
    (w,) = _words([args.word], args.rank)
    if not w.letters or not w.is_cyclically_reduced():
        raise InputError(f"{w} must be nonempty and cyclically reduced")
    if args.power < 1:
        raise InputError("--power must be positive")
    pairs = parse_pairs(args.pairs)
    polygons = polygons_for([w], Polynomial.monomial(args.power))
    zero_based = [((0, a - 1), (0, b - 1)) for a, b in pairs]
    try:
        report = verify_side_pairing(polygons, zero_based)
    except (LabelMismatch, ForbiddenFold) as exc:
        (_, a), (_, b) = exc.pair
        if isinstance(exc, LabelMismatch):
            why = f"edges {a + 1} and {b + 1} are labelled {exc.labels[0]} and {exc.labels[1]}"
        else:
            why = f"edges {a + 1} and {b + 1} fold about their common vertex"
        _emit({"op": "verify_side_pairing", "error": why, "pair": [a + 1, b + 1]}, out)
        return EXIT_NEGATIVE
    except SidePairingError as exc:
        raise InputError(str(exc)) from None
    payload = {"op": "verify_side_pairing", "word": str(w), "power": args.power, **report.to_json()}
    _emit(payload, out)
    return EXIT_OK if report.polygonal else EXIT_NEGATIVE


def cmd_oracle(args, out) -> int:
    (w,) = _words([args.word], args.rank)
    try:
        reports = oracle_enumerate(w, args.power, args.copies)
    except (WordError, ValueError) as exc:
        raise InputError(str(exc)) from None
    good = [r for r in reports if r.polygonal]
    payload = {
        "op": "oracle_enumerate",
        "word": str(w),
        "power": args.power,
        "copies": args.copies,
        "pairings": len(reports),
        "polygonal": len(good),
        "outcomes": sorted({(r.euler, r.m, r.immersed) for r in reports}),
        "first_polygonal": good[0].to_json() if good else None,
    }
    payload["outcomes"] = [{"euler": e, "m": m, "immersed": i} for e, m, i in payload["outcomes"]]
    _emit(payload, out)
    return EXIT_OK if good else EXIT_NEGATIVE


def cmd_reduce(args, out) -> int:
    words = _words(args.words, args.rank)
    trace = minimize([cyclic_reduce(w) for w in words])
    _emit(trace.to_json(), out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polygonal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_rank(p):
        p.add_argument("--rank", type=int, default=None, help="free group rank (default: highest generator used)")

    def add_bounds(p):
        p.add_argument("--max-exp", type=int, default=2)
        p.add_argument("--max-coeff", type=int, default=2)
        p.add_argument("--max-edges", type=int, default=64)
        p.add_argument("--time-budget", type=float, default=None, help="seconds")
        p.add_argument("--jobs", type=int, default=default_jobs())

    p = sub.add_parser("analyze", help="roots, reduction, diskbusting, Whitehead graph and Manning verdicts")
    p.add_argument("words", nargs="+")
    add_rank(p)
    p.add_argument("--dot", help="write the Whitehead graph in DOT format")
    p.add_argument("--certify", action="store_true", help="also search for a polygonality certificate")
    add_bounds(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("search", help="search for a polygonality certificate")
    p.add_argument("words", nargs="+")
    add_rank(p)
    add_bounds(p)
    p.add_argument("--all", action="store_true", help="list every accepted decomposition within bounds")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", help="glue one polygon reading word^power along the given pairs")
    p.add_argument("word")
    add_rank(p)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--pairs", required=True, help="1-based edge pairs, e.g. 1-2,3-7")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="enumerate every side-pairing of copies of word^power")
    p.add_argument("word")
    add_rank(p)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--copies", type=int, default=1)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("reduce", help="Whitehead minimization trace")
    p.add_argument("words", nargs="+")
    add_rank(p)
    p.set_defaults(func=cmd_reduce)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"polygonal: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
