"""Kempe chains, Kempe changes and replayable move traces."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .core import (
    Colouring,
    ColouringError,
    Edge,
    Graph,
    GraphFormatError,
    PreconditionError,
    format_colouring,
    format_graph,
    validate_colouring,
    edge,
)

Anchor = Union[int, Edge]


class MoveError(ValueError):
    """A Kempe move does not apply to the colouring at hand."""


class TraceError(ValueError):
    """A trace header does not match the graph or start colouring."""


FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def graph_digest(g: Graph) -> str:
    return f"{fnv1a64(format_graph(g).encode()):016x}"


def colouring_digest(g: Graph, c: Colouring) -> str:
    return f"{fnv1a64(format_colouring(g, c).encode()):016x}"


@dataclass(frozen=True)
class Chain:
    colours: Tuple[int, int]
    edges: Tuple[Edge, ...]
    shape: str  # "path" or "cycle"
    endpoints: Tuple[int, ...]

    @property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted({x for e in self.edges for x in e}))

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class KempeMove:
    c1: int
    c2: int
    anchor: Edge


@dataclass(frozen=True)
class Trace:
    graph: str
    start: str
    palette: int
    moves: Tuple[KempeMove, ...] = ()

    @classmethod
    def begin(cls, g: Graph, start: Colouring, moves: Iterable[KempeMove] = ()) -> "Trace":
        return cls(graph_digest(g), colouring_digest(g, start), start.palette, tuple(moves))

    def extended(self, moves: Iterable[KempeMove]) -> "Trace":
        return Trace(self.graph, self.start, self.palette, self.moves + tuple(moves))

    def __len__(self) -> int:
        return len(self.moves)


class EdgeState:
    """Mutable proper edge colouring with constant-time colour lookups per vertex.

    This is the working representation behind every recolouring procedure;
    convert back with :meth:`snapshot`.
    """

    def __init__(self, g: Graph, c: Colouring):
        self.graph = g
        self.palette = c.palette
        self.colour: Dict[Edge, int] = {}
        self.at: List[Dict[int, int]] = [dict() for _ in range(g.n + 1)]
        self.csum = [0] * (g.n + 1)
        self.by_colour: Dict[int, Set[Edge]] = defaultdict(set)
        self._total = self.palette * (self.palette + 1) // 2
        for e in g.edges:
            try:
                col = c.assignment[e]
            except KeyError:
                raise ColouringError(f"edge {e} is unassigned") from None
            u, v = e
            if col in self.at[u] or col in self.at[v]:
                raise ColouringError(f"colouring is not proper at edge {e}")
            self._attach(e, col)

    def _attach(self, e: Edge, col: int) -> None:
        u, v = e
        self.colour[e] = col
        self.at[u][col] = v
        self.at[v][col] = u
        self.csum[u] += col
        self.csum[v] += col
        self.by_colour[col].add(e)

    def _detach(self, e: Edge) -> int:
        u, v = e
        col = self.colour.pop(e)
        del self.at[u][col]
        del self.at[v][col]
        self.csum[u] -= col
        self.csum[v] -= col
        self.by_colour[col].discard(e)
        return col

    def __getitem__(self, e: Edge) -> int:
        return self.colour[edge(*e)]

    def missing(self, u: int) -> int:
        """Missing colour at ``u``; requires exactly one spare colour there."""
        if len(self.at[u]) != self.palette - 1:
            raise PreconditionError(
                f"vertex {u} has degree {len(self.at[u])}, expected palette - 1 = {self.palette - 1}"
            )
        return self._total - self.csum[u]

    def missing_set(self, u: int) -> Set[int]:
        return set(range(1, self.palette + 1)) - self.at[u].keys()

    def chain(self, c1: int, c2: int, anchor: Anchor) -> Chain:
        if c1 == c2:
            raise MoveError("a Kempe chain needs two distinct colours")
        if isinstance(anchor, tuple):
            e = edge(*anchor)
            if e not in self.colour:
                raise MoveError(f"anchor {anchor} is not an edge")
            if self.colour[e] not in (c1, c2):
                raise MoveError(f"anchor {anchor} has colour {self.colour[e]}, not {c1} or {c2}")
            start = e[0]
        else:
            start = anchor
        at = self.at
        seen = {start}
        stack = [start]
        edges = set()
        while stack:
            x = stack.pop()
            for col in (c1, c2):
                y = at[x].get(col)
                if y is not None:
                    edges.add(edge(x, y))
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
        if not edges:
            return Chain((c1, c2), (), "path", ())
        ends = tuple(sorted(x for x in seen if (c1 in at[x]) != (c2 in at[x])))
        return Chain((c1, c2), tuple(sorted(edges)), "cycle" if not ends else "path", ends)

    def swap_edges(self, c1: int, c2: int, edges: Sequence[Edge]) -> None:
        """Exchange ``c1``/``c2`` on ``edges``; the caller guarantees they form a chain."""
        cols = [self._detach(e) for e in edges]
        for e, col in zip(edges, cols):
            u, v = e
            new = c2 if col == c1 else c1
            if new in self.at[u] or new in self.at[v]:
                raise ColouringError(f"swap breaks properness at edge {e}")
            self._attach(e, new)

    def apply(self, move: KempeMove) -> Chain:
        ch = self.chain(move.c1, move.c2, move.anchor)
        self.swap_edges(move.c1, move.c2, ch.edges)
        return ch

    def snapshot(self) -> Colouring:
        return Colouring(self.palette, dict(self.colour))


def as_move(state: EdgeState, c1: int, c2: int, anchor: Anchor) -> KempeMove:
    """Canonical move for the chain of ``(c1, c2)`` at ``anchor``: anchored at its smallest edge."""
    ch = state.chain(c1, c2, anchor)
    if not ch.edges:
        raise MoveError(f"no {c1}/{c2} chain at {anchor}")
    return KempeMove(c1, c2, ch.edges[0])


def chain_at(g: Graph, c: Colouring, c1: int, c2: int, anchor: Anchor) -> Chain:
    return EdgeState(g, c).chain(c1, c2, anchor)


def apply_move(g: Graph, c: Colouring, move: KempeMove) -> Colouring:
    state = EdgeState(g, c)
    state.apply(move)
    return state.snapshot()


def apply_moves(g: Graph, c: Colouring, moves: Iterable[KempeMove]) -> Colouring:
    state = EdgeState(g, c)
    for m in moves:
        state.apply(m)
    return state.snapshot()


def swap_classes(g: Graph, c: Colouring, c1: int, c2: int) -> Tuple[Colouring, List[KempeMove]]:
    """Exchange two whole colour classes, one Kempe change per component."""
    if c1 == c2:
        raise MoveError("colours must differ")
    state = EdgeState(g, c)
    moves = []
    done: Set[Edge] = set()
    for e in sorted(state.by_colour[c1] | state.by_colour[c2]):
        if e in done:
            continue
        ch = state.chain(c1, c2, e)
        done.update(ch.edges)
        moves.append(KempeMove(c1, c2, ch.edges[0]))
    for m in moves:
        state.apply(m)
    return state.snapshot(), moves


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    index: Optional[int] = None  # 1-based index of the first failing move
    reason: str = ""
    final: Optional[Colouring] = None

    def __bool__(self) -> bool:
        return self.accepted


def _proper_at(state: EdgeState, vertices: Iterable[int]) -> bool:
    g = state.graph
    for u in vertices:
        cols = [state.colour[edge(u, w)] for w in g.adjacency[u]]
        if len(set(cols)) != len(cols):
            return False
    return True


def verify_trace(
    g: Graph, start: Colouring, trace: Trace, expected: Optional[Colouring] = None
) -> Verdict:
    """Replay ``trace`` from ``start`` checking every move and intermediate colouring."""
    if trace.graph != graph_digest(g):
        raise TraceError("graph digest mismatch")
    if trace.start != colouring_digest(g, start):
        raise TraceError("start colouring digest mismatch")
    if trace.palette != start.palette:
        raise TraceError(f"trace palette {trace.palette} differs from start palette {start.palette}")
    report = validate_colouring(g, start)
    if not report.proper:
        return Verdict(False, 0, "start colouring is not proper")
    state = EdgeState(g, start)
    k = start.palette
    for i, m in enumerate(trace.moves, 1):
        if m.c1 == m.c2 or not (1 <= m.c1 <= k and 1 <= m.c2 <= k):
            return Verdict(False, i, f"malformed colour pair ({m.c1}, {m.c2})")
        if not g.has_edge(*m.anchor):
            return Verdict(False, i, f"anchor {m.anchor} is not an edge")
        col = state[m.anchor]
        if col not in (m.c1, m.c2):
            return Verdict(False, i, f"anchor colour {col} not in ({m.c1}, {m.c2})")
        try:
            ch = state.apply(m)
        except ColouringError as exc:
            return Verdict(False, i, str(exc))
        if not _proper_at(state, ch.vertices):
            return Verdict(False, i, "colouring became improper")
    final = state.snapshot()
    if expected is not None and final.assignment != expected.assignment:
        return Verdict(False, None, "final mismatch", final)
    return Verdict(True, None, "accepted", final)


# --- trace files --------------------------------------------------------------


def format_trace(g: Graph, trace: Trace) -> str:
    lines = [json.dumps({"graph": trace.graph, "start": trace.start, "palette": trace.palette})]
    for m in trace.moves:
        u, v = m.anchor
        lines.append(json.dumps({"c1": m.c1, "c2": m.c2, "anchor": [g.label(u), g.label(v)]}))
    return "\n".join(lines) + "\n"


def parse_trace(g: Graph, text: str) -> Trace:
    """Parse a JSON Lines trace; anchor labels unknown to ``g`` map to vertex 0."""
    ids = {lab: i for i, lab in enumerate(g.labels, 1)}
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphFormatError("empty trace")
    try:
        head = json.loads(lines[0])
        header = (str(head["graph"]), str(head["start"]), int(head["palette"]))
        moves = []
        for lineno, ln in enumerate(lines[1:], 2):
            obj = json.loads(ln)
            a, b = obj["anchor"]
            u, v = ids.get(int(a), 0), ids.get(int(b), 0)
            moves.append(KempeMove(int(obj["c1"]), int(obj["c2"]), edge(u, v)))
    except (ValueError, KeyError, TypeError) as exc:
        raise GraphFormatError(f"malformed trace: {exc}") from None
    return Trace(*header, tuple(moves))
