"""Command-line front end.

Rationals are given as ``num/den`` text; floats are rejected.  An optional
``--config`` file of ``key = value`` lines supplies defaults that explicit
flags override.  Exit codes: 0 success, 1 computation failure, 2 usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .analysis import (
    AlphaBoundViolation,
    free_point_search,
    freeness_report,
    gns_witness,
    schreier_ball,
)
from .chain import (
    DEFAULT_STATE_CAP,
    OrbitCapExceeded,
    build_chain,
    choose_primes,
    compute_orbit,
    coset_tree_stats,
    write_fixr_csv,
)
from .freegroup import Alphabet, enumerate_a_class_reps
from .labeled_graph import LabeledGraph, to_dot, trace_word

DEFAULTS = {
    "d": 2,
    "alpha": "1/2",
    "levels": 2,
    "count": 10,
    "cap": DEFAULT_STATE_CAP,
    "max_len": 6,
    "faith_len": 3,
    "radius": 2,
    "word": "a",
}


class CliError(Exception):
    pass


def parse_rational(text: str) -> Fraction:
    text = str(text).strip()
    num, sep, den = text.partition("/")
    try:
        value = Fraction(int(num), int(den)) if sep else Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise CliError(f"expected a rational 'num/den', got {text!r}") from None
    return value


def read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CliError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _common(p: argparse.ArgumentParser, *names: str) -> None:
    if "d" in names:
        p.add_argument("--d", type=int, help="rank of the free group (default 2)")
    if "alpha" in names:
        p.add_argument("--alpha", help="target bound as num/den (default 1/2)")
    if "cap" in names:
        p.add_argument("--cap", type=int, help=f"orbit state cap (default {DEFAULT_STATE_CAP})")
    p.add_argument("--config", help="file of 'key = value' defaults")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freechain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classes", help="list a-starting conjugacy class reps")
    _common(p, "d")
    p.add_argument("--count", type=int)

    p = sub.add_parser("primes", help="choose primes and show partial products")
    _common(p, "d", "alpha")
    p.add_argument("--count", type=int)

    p = sub.add_parser("build", help="build the chain and write a summary")
    _common(p, "d", "alpha", "cap")
    p.add_argument("--levels", type=int)
    p.add_argument("--out", help="summary JSON path (default stdout)")

    p = sub.add_parser("fixr", help="fixed-point ratios of a word as CSV")
    _common(p, "d", "alpha", "cap")
    p.add_argument("--word")
    p.add_argument("--levels", type=int)
    p.add_argument("--out", help="CSV path (default stdout)")

    p = sub.add_parser("verify", help="run all certificates; exit 0 iff all hold")
    _common(p, "d", "alpha", "cap")
    p.add_argument("--levels", type=int)
    p.add_argument("--max-len", type=int, help="word length bound for the intersection scan")
    p.add_argument("--faith-len", type=int, help="word length bound for the faithfulness scan")
    p.add_argument("--extra-word", action="append", default=[], help="additional word to profile")
    p.add_argument("--out", help="JSON report path (default stdout)")

    p = sub.add_parser("schreier", help="export a Schreier graph or ball as DOT")
    _common(p, "d", "alpha", "cap")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--dot", required=True)
    p.add_argument("--center", help="orbit index or comma-separated vertex names")
    p.add_argument("--radius", type=int, dest="ball_radius", help="export only the ball of this radius")

    p = sub.add_parser("trace", help="trace a word along the edges of one component graph")
    _common(p, "d", "alpha")
    p.add_argument("--component", type=int, required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--word")

    p = sub.add_parser("freepoint", help="states with no short stabilizer word")
    _common(p, "d", "alpha", "cap")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--max-len", type=int)

    p = sub.add_parser("gns", help="looped vs tree-like Schreier balls")
    _common(p, "d", "alpha", "cap")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--radius", type=int)
    p.add_argument("--dot-prefix", help="write <prefix>-cycle.dot and <prefix>-tree.dot")
    return parser


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    config = read_config(args.config) if args.config else {}
    for key, default in DEFAULTS.items():
        if getattr(args, key, "absent") is None:
            raw = config.get(key, default)
            setattr(args, key, int(raw) if isinstance(default, int) else raw)
    return args


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _ctx(args, levels: int):
    cap = getattr(args, "cap", DEFAULT_STATE_CAP)
    return build_chain(Alphabet(args.d), parse_rational(args.alpha), levels, cap=cap)


def _parse_state(ctx, orbit, text: str) -> int:
    text = text.strip()
    if text.isdigit():
        i = int(text)
        if i >= orbit.size:
            raise CliError(f"orbit index {i} out of range (size {orbit.size})")
        return i
    names = [t for t in text.split(",") if t.strip()]
    if len(names) != orbit.level:
        raise CliError(f"state {text!r} needs {orbit.level} coordinates")
    state = tuple(ctx.gadget(i + 1).parse_vertex(nm) for i, nm in enumerate(names))
    return orbit.index(state)


def _state_name(ctx, state) -> str:
    return ",".join(ctx.gadget(i + 1).vertex_name(v) for i, v in enumerate(state))


def cmd_classes(args) -> int:
    classes = enumerate_a_class_reps(Alphabet(args.d), args.count)
    for i, (w, k) in enumerate(zip(classes.reps, classes.lengths), start=1):
        print(f"{i}\t{k}\t{w}")
    return 0


def cmd_primes(args) -> int:
    classes = enumerate_a_class_reps(Alphabet(args.d), args.count)
    plan = choose_primes(parse_rational(args.alpha), classes.lengths)
    print("i\tk\tp\tfactor\tpartial_product")
    for i, (k, p, f, prod) in enumerate(
        zip(plan.lengths, plan.primes, plan.factors(), plan.partial_products()), start=1
    ):
        print(f"{i}\t{k}\t{p}\t{_fmt(f)}\t{_fmt(prod)}")
    return 0


def cmd_build(args) -> int:
    ctx = _ctx(args, args.levels)
    stats = coset_tree_stats(ctx, args.levels)
    summary = {
        "alpha": [ctx.alpha.numerator, ctx.alpha.denominator],
        "d": args.d,
        "levels": [
            {
                "level": n,
                "rep": str(ctx.gadget(n).word),
                "length": ctx.gadget(n).length,
                "prime": ctx.gadget(n).prime,
                "vertices": ctx.gadget(n).vertex_count,
                "index": stats[n].orbit_size,
                "children": stats[n].children_count,
            }
            for n in range(1, args.levels + 1)
        ],
    }
    _emit(json.dumps(summary, indent=2) + "\n", args.out)
    return 0


def cmd_fixr(args) -> int:
    ctx = _ctx(args, args.levels)
    w = ctx.alphabet.parse(args.word)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_fixr_csv(ctx, w, args.levels, fh)
    else:
        write_fixr_csv(ctx, w, args.levels, sys.stdout)
    return 0


def cmd_verify(args) -> int:
    ctx = _ctx(args, args.levels)
    words = [ctx.alphabet.parse(t) for t in args.extra_word]
    report = freeness_report(ctx, words=words, faithful_length=args.faith_len, max_word_length=args.max_len)
    _emit(report.to_json(), args.out)
    return 0 if report.ok else 1


def cmd_schreier(args) -> int:
    ctx = _ctx(args, args.level)
    orbit = compute_orbit(ctx, args.level)
    center = _parse_state(ctx, orbit, args.center) if args.center else orbit.base_index
    if args.ball_radius is not None:
        ball = schreier_ball(ctx, args.level, center, args.ball_radius)
        Path(args.dot).write_text(ball.to_dot(ctx, name="ball"))
        print(json.dumps({"vertices": len(ball.vertices), "edges": len(ball.edges),
                          "is_tree": ball.is_tree, "shortest_cycle": ball.shortest_cycle}))
        return 0
    d = ctx.alphabet.d
    edges = tuple((i, int(orbit.edges[i, x]), x) for i in range(orbit.size) for x in range(d))
    names = tuple(_state_name(ctx, orbit.state(i)) for i in range(orbit.size))
    graph = LabeledGraph(orbit.size, edges, names)
    Path(args.dot).write_text(to_dot(graph, ctx.alphabet, "schreier", attrs={center: {"center": "true"}}))
    print(json.dumps({"vertices": orbit.size, "edges": len(edges)}))
    return 0


def cmd_trace(args) -> int:
    ctx = _ctx(args, args.component)
    gadget = ctx.gadget(args.component)
    w = ctx.alphabet.parse(args.word)
    start = gadget.parse_vertex(args.start)
    end = trace_word(gadget.graph, start, w)
    print(f"trace: {'undefined' if end is None else gadget.vertex_name(end)}")
    print(f"action: {gadget.vertex_name(gadget.act(start, w))}")
    return 0


def cmd_freepoint(args) -> int:
    ctx = _ctx(args, args.level)
    orbit = compute_orbit(ctx, args.level)
    found = free_point_search(ctx, args.level, args.max_len)
    print(json.dumps({
        "level": args.level,
        "max_len": args.max_len,
        "orbit_size": orbit.size,
        "count": len(found),
        "states": [_state_name(ctx, orbit.state(i)) for i in found],
    }, indent=2))
    return 0


def cmd_gns(args) -> int:
    ctx = _ctx(args, args.level)
    wit = gns_witness(ctx, args.level, args.radius)
    if args.dot_prefix:
        Path(f"{args.dot_prefix}-cycle.dot").write_text(wit.cycle_ball.to_dot(ctx, "cycle_ball"))
        Path(f"{args.dot_prefix}-tree.dot").write_text(wit.tree_ball.to_dot(ctx, "tree_ball"))
    summary = {
        "level": wit.level,
        "radius": wit.radius,
        "looped_fraction": [wit.looped_fraction.numerator, wit.looped_fraction.denominator],
        "acyclic_states": wit.acyclic_count,
        "distinguished": wit.distinguished,
    }
    for tag, ball in (("cycle_ball", wit.cycle_ball), ("tree_ball", wit.tree_ball)):
        summary[tag] = {
            "center": _state_name(ctx, ball.center),
            "vertices": len(ball.vertices),
            "edges": len(ball.edges),
            "is_tree": ball.is_tree,
            "shortest_cycle": ball.shortest_cycle,
        }
    print(json.dumps(summary, indent=2))
    return 0


COMMANDS = {
    "classes": cmd_classes,
    "primes": cmd_primes,
    "build": cmd_build,
    "fixr": cmd_fixr,
    "verify": cmd_verify,
    "schreier": cmd_schreier,
    "trace": cmd_trace,
    "freepoint": cmd_freepoint,
    "gns": cmd_gns,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        args = _resolve(args)
        return COMMANDS[args.command](args)
    except (CliError, ValueError, LookupError, OrbitCapExceeded, AlphaBoundViolation, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
