"""Command-line front end.

Exit codes: 0 success, 1 negative or failed verification, 2 usage, parse or
precondition error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
from pathlib import Path
from typing import List, Optional

from .core import (
    ColouringError,
    Graph,
    GraphFormatError,
    InvariantViolation,
    PreconditionError,
    format_colouring,
    format_graph,
    parse_colouring,
    parse_graph,
    regular_degree,
    triangle_witness,
    validate_colouring,
)
from .engine import CASES, regularize, run_transform
from .fan import fan_sequence
from .kempe import MoveError, TraceError, format_trace, parse_trace, verify_trace
from .oracle import DEFAULT_CAP, CapExceeded, random_colouring, reconfiguration_components, reconfiguration_edges

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _graph(path: str) -> Graph:
    return parse_graph(_read(path))


def _colouring(g: Graph, path: str, palette: Optional[int] = None):
    return parse_colouring(g, _read(path), palette)


def _emit(lines: List[str]) -> None:
    sys.stdout.write("".join(f"{ln}\n" for ln in lines))


def _checkpoint_writer(out_dir: Path, host: Graph):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "host.graph").write_text(format_graph(host))
    counter = [0]

    def write(level, colouring):
        counter[0] += 1
        (out_dir / f"checkpoint_{counter[0]:05d}_level{level}.col").write_text(format_colouring(host, colouring))

    return write


def cmd_transform(args) -> int:
    g = _graph(args.graph)
    start = _colouring(g, args.start, args.start_palette)
    target = _colouring(g, args.target, args.target_palette)
    witness = triangle_witness(g)
    if witness is not None:
        labels = " ".join(str(g.label(x)) for x in witness)
        raise UsageError(f"graph is not triangle-free: triangle {labels}")
    if start.palette != target.palette + 1:
        raise UsageError(
            f"start palette {start.palette} must exceed target palette {target.palette} by one"
        )
    for name, col in (("start", start), ("target", target)):
        if not validate_colouring(g, col).proper:
            raise UsageError(f"{name} colouring is not proper")

    hook = None
    if args.emit_intermediate:
        hook = _checkpoint_writer(Path(args.emit_intermediate), regularize(g, target)[0].host)
    report = run_transform(g, start, target, hook)
    verdict = verify_trace(g, start, report.trace, target)
    if not verdict.accepted:
        raise InvariantViolation(f"self-verification failed: {verdict.reason}")
    Path(args.out).write_text(format_trace(g, report.trace))
    lines = [
        f"moves: {len(report.trace)}",
        f"checkpoints: {report.checkpoints}",
        f"host_vertices: {report.embedding.host.n}",
        f"host_edges: {len(report.embedding.host.edges)}",
        f"host_moves: {len(report.host_trace)}",
        f"doubling_steps: {report.embedding.layers}",
    ]
    cases = report.cases
    lines += [f"case.{name}: {cases.get(name, 0)}" for name in CASES]
    lines.append("verified: yes")
    _emit(lines)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _graph(args.graph)
    start = _colouring(g, args.start, args.palette)
    trace = parse_trace(g, _read(args.trace))
    if args.palette is None and trace.palette >= start.palette:
        start = start.with_palette(trace.palette)
    expected = _colouring(g, args.expect, start.palette) if args.expect else None
    try:
        verdict = verify_trace(g, start, trace, expected)
    except TraceError as exc:
        _emit([f"rejected: {exc}"])
        return EXIT_NEGATIVE
    if verdict.accepted:
        _emit([f"accepted: {len(trace)} moves"])
        return EXIT_OK
    if verdict.index is None:
        _emit([f"rejected: {verdict.reason}"])
    else:
        _emit([f"rejected at move {verdict.index}: {verdict.reason}"])
    return EXIT_NEGATIVE


def cmd_equivalence(args) -> int:
    g = _graph(args.graph)
    try:
        comp = reconfiguration_components(g, args.k, args.cap)
    except CapExceeded as exc:
        raise UsageError(f"state cap exceeded: {exc}") from None
    classes = comp.classes
    lines = [
        f"colourings: {comp.total}",
        f"classes: {len(classes)}",
        ("sizes: " + " ".join(str(s) for s in comp.sizes)).rstrip(),
    ]
    if args.diameter:
        lines.append("diameters: " + " ".join(str(d) for d in sorted(comp.diameters())))
    _emit(lines)
    if args.dot:
        out = ["graph reconfiguration {"]
        out += [f"  s{s} [label=\"{s}\", group={lab}];" for s, lab in enumerate(comp.label)]
        out += [f"  s{a} -- s{b};" for a, b in reconfiguration_edges(comp)]
        out.append("}")
        Path(args.dot).write_text("\n".join(out) + "\n")
    expected = 1 if args.expect_classes is None else args.expect_classes
    return EXIT_OK if len(classes) == expected else EXIT_NEGATIVE


def cmd_regularize(args) -> int:
    g = _graph(args.graph)
    target = _colouring(g, args.colouring, args.palette)
    emb, h_col = regularize(g, target)
    h = emb.host
    Path(args.out_graph).write_text(format_graph(h))
    Path(args.out_map).write_text("".join(f"{g.label(x)} {h.label(y)}\n" for x, y in emb.vertex_map.items()))
    Path(args.out_colouring).write_text(format_colouring(h, h_col))
    _emit([
        f"vertices: {h.n}",
        f"edges: {len(h.edges)}",
        f"degree: {regular_degree(h)}",
        f"doubling_steps: {emb.layers}",
        f"triangle_free: {'yes' if triangle_witness(h) is None else 'no'}",
    ])
    return EXIT_OK


def cmd_fan(args) -> int:
    g = _graph(args.graph)
    c = _colouring(g, args.colouring, args.palette)
    ids = {lab: i for i, lab in enumerate(g.labels, 1)}
    try:
        u, v = ids[args.u], ids[args.v]
    except KeyError as exc:
        raise UsageError(f"unknown vertex {exc.args[0]}") from None
    s = fan_sequence(g, c, u, v)
    target = "none" if s.comet_target is None else str(g.label(s.nodes[s.comet_target]))
    saturated = "n/a" if s.saturated is None else str(s.saturated).lower()
    _emit([
        f"centre: {g.label(s.centre)}",
        "nodes: " + " ".join(str(g.label(x)) for x in s.nodes),
        f"shape: {s.shape}",
        f"comet_target: {target}",
        f"saturated: {saturated}",
    ])
    return EXIT_OK


def cmd_random_colouring(args) -> int:
    g = _graph(args.graph)
    c = random_colouring(g, args.k, random.Random(args.seed))
    if c is None:
        print(f"no proper {args.k}-edge-colouring exists", file=sys.stderr)
        return EXIT_NEGATIVE
    text = format_colouring(g, c)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_stats(args) -> int:
    g = _graph(args.graph)
    degrees = [g.degree(u) for u in g.vertices]
    witness = triangle_witness(g)
    reg = regular_degree(g)
    lines = [
        f"vertices: {g.n}",
        f"edges: {len(g.edges)}",
        f"max_degree: {max(degrees)}",
        f"min_degree: {min(degrees)}",
        f"regular: {reg if reg is not None else 'no'}",
        "triangle: " + ("none" if witness is None else " ".join(str(g.label(x)) for x in witness)),
    ]
    if args.colouring:
        c = _colouring(g, args.colouring, args.palette)
        rep = validate_colouring(g, c)
        lines += [
            f"palette: {c.palette}",
            f"proper: {'yes' if rep.proper else 'no'}",
            f"violations: {len(rep.violations)}",
            "colours_used: " + " ".join(str(x) for x in sorted(rep.colours_used)),
        ]
    _emit(lines)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kempeswap", description="Kempe-change reconfiguration of edge colourings")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="state cap for exhaustive commands")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit-intermediate", metavar="DIR", help="write checkpoint colourings of transform to DIR")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="compute a Kempe trace from START to TARGET")
    t.add_argument("graph")
    t.add_argument("start", metavar="from")
    t.add_argument("target", metavar="to")
    t.add_argument("-o", "--out", required=True)
    t.add_argument("--start-palette", type=int)
    t.add_argument("--target-palette", type=int)
    t.set_defaults(func=cmd_transform)

    v = sub.add_parser("verify", help="replay and check a trace")
    v.add_argument("graph")
    v.add_argument("start", metavar="from")
    v.add_argument("trace")
    v.add_argument("--expect")
    v.add_argument("--palette", type=int)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("equivalence", help="Kempe classes of all k-edge-colourings")
    e.add_argument("graph")
    e.add_argument("-k", type=int, required=True)
    e.add_argument("--expect-classes", type=int)
    e.add_argument("--diameter", action="store_true")
    e.add_argument("--dot", metavar="FILE")
    e.set_defaults(func=cmd_equivalence)

    r = sub.add_parser("regularize", help="embed into a regular supergraph")
    r.add_argument("graph")
    r.add_argument("colouring")
    r.add_argument("--palette", type=int)
    r.add_argument("--out-graph", required=True)
    r.add_argument("--out-map", required=True)
    r.add_argument("--out-colouring", required=True)
    r.set_defaults(func=cmd_regularize)

    f = sub.add_parser("fan", help="report the fan sequence X_u(v)")
    f.add_argument("graph")
    f.add_argument("colouring")
    f.add_argument("u", type=int)
    f.add_argument("v", type=int)
    f.add_argument("--palette", type=int)
    f.set_defaults(func=cmd_fan)

    rc = sub.add_parser("random-colouring", help="seeded proper k-edge-colouring")
    rc.add_argument("graph")
    rc.add_argument("-k", type=int, required=True)
    rc.add_argument("-o", "--out")
    rc.set_defaults(func=cmd_random_colouring)

    s = sub.add_parser("stats", help="graph and colouring summary")
    s.add_argument("graph")
    s.add_argument("colouring", nargs="?")
    s.add_argument("--palette", type=int)
    s.set_defaults(func=cmd_stats)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (UsageError, GraphFormatError, ColouringError, PreconditionError, MoveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
