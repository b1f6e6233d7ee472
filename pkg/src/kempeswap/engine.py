"""Reaching a target optimal edge colouring from a colouring with one extra colour.

The pipeline embeds the input graph into a regular supergraph, then for each
target colour class (highest colour first) drives the working colouring to a
state where that class is exactly the edges of its colour, removes it and
continues on the remainder. The trace found on the supergraph is finally
projected back onto the input graph.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .core import (
    Colouring,
    ColouringError,
    Edge,
    Graph,
    Matching,
    PreconditionError,
    TriangleError,
    check,
    edge,
    is_matching,
    validate_colouring,
    triangle_witness,
)
from .fan import COMET, CYCLE, PATH, _comet_moves, _nonsaturated_moves, _path_moves, _saturated_moves, _sequence
from .kempe import EdgeState, KempeMove, Trace

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EdgeStatus:
    good: frozenset
    bad: frozenset
    ugly: frozenset

    @property
    def measure(self) -> Tuple[int, int]:
        return (len(self.bad), len(self.ugly))


def _status(by_colour: frozenset, m: frozenset) -> EdgeStatus:
    return EdgeStatus(m & by_colour, m - by_colour, by_colour - m)


def classify_edges(g: Graph, c: Colouring, m: Matching, colour: int) -> EdgeStatus:
    m = frozenset(edge(*e) for e in m)
    if not is_matching(m):
        raise PreconditionError("not a matching")
    coloured = frozenset(e for e in g.edges if c.assignment[e] == colour)
    return _status(coloured, m)


# --- one descent step -------------------------------------------------------------

CASE_FREE_BAD = "free-bad-edge"
CASE_UGLY_PATH = "ugly-path"
CASE_UGLY_COMET = "ugly-comet"
CASE_CYCLE_NONSAT = "cycles-nonsaturated"
CASE_CYCLE_SAT = "cycles-saturated"
CASES = (CASE_FREE_BAD, CASE_UGLY_PATH, CASE_UGLY_COMET, CASE_CYCLE_NONSAT, CASE_CYCLE_SAT)


def _free_vertex_via_ugly(state: EdgeState, partner: Dict[int, int], ugly: Sequence[Edge]):
    d_col = state[ugly[0]]
    for a, b in ugly:
        for x, y in ((a, b), (b, a)):
            s = _sequence(state, x, y, saturation=False)
            if s.shape != CYCLE:
                continue
            u = s.nodes[-1]
            check(state.missing(u) == d_col, "the last node of an ugly cycle must be free")
            v = partner[u]
            w = state.at[v].get(d_col)
            check(w is not None, "partner of a free vertex must carry the designated colour")
            return u, v, w
    return None


def find_free_vertex_via_ugly(
    g: Graph, c: Colouring, m: Matching, colour: int
) -> Optional[Tuple[int, int, int]]:
    """``(u, v, w)`` with ``u`` free, ``uv`` in ``m`` and ``vw`` ugly, read off the first ugly cycle sequence."""
    _require_engine_input(g, c, m, colour)
    state = EdgeState(g, c)
    m = frozenset(edge(*e) for e in m)
    partner = {}
    for a, b in m:
        partner[a], partner[b] = b, a
    st = _status(frozenset(state.by_colour[colour]), m)
    if not st.ugly:
        return None
    if not st.bad:
        raise PreconditionError("no bad edge")
    if any(state.missing(a) == colour == state.missing(b) for a, b in st.bad):
        raise PreconditionError("a bad edge with both ends free is still available")
    ugly = sorted(st.ugly)
    for a, b in ugly:
        for x, y in ((a, b), (b, a)):
            if _sequence(state, x, y, saturation=False).shape != CYCLE:
                raise PreconditionError(f"ugly edge {a} {b} has a non-cycle sequence at {x}")
    return _free_vertex_via_ugly(state, partner, ugly)


def _step(state: EdgeState, m: frozenset, partner: Dict[int, int], d_col: int) -> Tuple[List[KempeMove], str]:
    st = _status(frozenset(state.by_colour[d_col]), m)
    bad = sorted(st.bad)
    check(bool(bad), "reduce step called without bad edges")
    for e in bad:
        x, y = e
        if state.missing(x) == d_col and state.missing(y) == d_col:
            mv = KempeMove(d_col, state[e], e)
            state.apply(mv)
            return [mv], CASE_FREE_BAD

    ugly = sorted(st.ugly)
    check(bool(ugly), "a bad edge without free ends must touch an ugly edge")
    for a, b in ugly:
        for x, y in ((a, b), (b, a)):
            s = _sequence(state, x, y, saturation=False)
            if s.shape == PATH:
                return _path_moves(state, x, s.nodes), CASE_UGLY_PATH
            if s.shape == COMET:
                moves, _ = _comet_moves(state, x, s.nodes, s.comet_target)
                return moves, CASE_UGLY_COMET

    found = _free_vertex_via_ugly(state, partner, ugly)
    check(found is not None, "no free vertex with a bad partner edge")
    u, v, w = found
    check(not state.graph.has_edge(u, w), "u and w adjacent: triangle")
    yw = _sequence(state, w, v)
    xv = _sequence(state, v, w, saturation=False)
    check(yw.shape == CYCLE and xv.shape == CYCLE, "both sequences at the ugly edge must be cycles")
    if not yw.saturated:
        moves = _nonsaturated_moves(state, w, yw.rotated(yw.witnesses[0]).nodes)
        case = CASE_CYCLE_NONSAT
    else:
        moves, _ = _saturated_moves(state, w, yw.nodes, xv.nodes)
        case = CASE_CYCLE_SAT
    check(state.missing(u) == d_col and state.missing(v) == d_col, "u and v must both be free now")
    e = edge(u, v)
    mv = KempeMove(d_col, state[e], e)
    state.apply(mv)
    return moves + [mv], case


@dataclass
class LevelReport:
    colour: int
    checkpoints: int = 0
    moves: int = 0
    cases: Counter = field(default_factory=Counter)
    measures: List[Tuple[int, int]] = field(default_factory=list)


def _monochromatic(
    state: EdgeState,
    m: frozenset,
    d_col: int,
    on_checkpoint: Optional[Callable[[EdgeState], None]] = None,
) -> Tuple[List[KempeMove], LevelReport]:
    partner = {}
    for a, b in m:
        partner[a], partner[b] = b, a
    check(len(partner) == state.graph.n, "class must be a perfect matching")
    report = LevelReport(d_col)
    moves: List[KempeMove] = []
    measure = _status(frozenset(state.by_colour[d_col]), m).measure
    report.measures.append(measure)
    while measure[0]:
        step, case = _step(state, m, partner, d_col)
        moves += step
        new = _status(frozenset(state.by_colour[d_col]), m).measure
        check(new < measure, f"measure did not decrease: {measure} -> {new} ({case})")
        measure = new
        report.checkpoints += 1
        report.cases[case] += 1
        report.measures.append(measure)
        if on_checkpoint:
            on_checkpoint(state)
    check(measure == (0, 0), "ugly edges survive although the class is complete")
    report.moves = len(moves)
    return moves, report


def reduce_step(g: Graph, c: Colouring, m: Matching, colour: int) -> Tuple[Colouring, Trace, str]:
    """Apply the first applicable reduction; ``(|bad|, |ugly|)`` strictly decreases."""
    _require_engine_input(g, c, m, colour)
    state = EdgeState(g, c)
    m = frozenset(edge(*e) for e in m)
    partner = {}
    for a, b in m:
        partner[a], partner[b] = b, a
    if not (m - state.by_colour[colour]):
        raise PreconditionError("no bad edge")
    moves, case = _step(state, m, partner, colour)
    return state.snapshot(), Trace.begin(g, c, moves), case


def make_class_monochromatic(g: Graph, c: Colouring, m: Matching, colour: int) -> Tuple[Colouring, Trace]:
    _require_engine_input(g, c, m, colour)
    state = EdgeState(g, c)
    moves, _ = _monochromatic(state, frozenset(edge(*e) for e in m), colour)
    return state.snapshot(), Trace.begin(g, c, moves)


def _require_engine_input(g: Graph, c: Colouring, m: Matching, colour: int) -> None:
    d = g.max_degree()
    if any(g.degree(u) != d for u in g.vertices) or c.palette != d + 1:
        raise PreconditionError("engine steps need a d-regular graph with d + 1 colours")
    if triangle_witness(g) is not None:
        raise TriangleError(triangle_witness(g))
    msorted = [edge(*e) for e in m]
    if not is_matching(msorted) or 2 * len(msorted) != g.n or not all(g.has_edge(*e) for e in msorted):
        raise PreconditionError("class must be a perfect matching of the graph")
    if not 1 <= colour <= c.palette:
        raise PreconditionError(f"colour {colour} outside the palette")


# --- regularization -----------------------------------------------------------------


@dataclass(frozen=True)
class Embedding:
    """``base`` sits inside ``host`` as the induced subgraph on vertices ``1..base.n``.

    ``bridged[i]`` lists the vertices that received a cross edge in doubling
    step ``i``; the copy of vertex ``x`` in that step is ``x + n_i`` where
    ``n_i`` is the vertex count before the step.
    """

    base: Graph
    host: Graph
    bridged: Tuple[Tuple[int, ...], ...]

    @property
    def layers(self) -> int:
        return len(self.bridged)

    @property
    def vertex_map(self) -> Dict[int, int]:
        return {x: x for x in self.base.vertices}

    def g_edges(self) -> Tuple[Edge, ...]:
        return self.base.edges


def _double(edges: List[Edge], colours: Dict[Edge, int], n: int, palette: int, bridged: Sequence[int]):
    new_edges = edges + [(a + n, b + n) for a, b in edges]
    new_col = dict(colours)
    new_col.update({(a + n, b + n): col for (a, b), col in colours.items()})
    present: Dict[int, set] = {}
    for (a, b), col in colours.items():
        present.setdefault(a, set()).add(col)
        present.setdefault(b, set()).add(col)
    for x in bridged:
        free = [col for col in range(1, palette + 1) if col not in present.get(x, ())]
        check(bool(free), f"no colour available for the cross edge at {x}")
        new_edges.append((x, x + n))
        new_col[(x, x + n)] = free[0]
    return new_edges, new_col


def regularize(g: Graph, target: Colouring) -> Tuple[Embedding, Colouring]:
    """Embed ``g`` in a ``target.palette``-regular graph by repeated doubling."""
    x = target.palette
    if x < g.max_degree():
        raise PreconditionError(f"palette {x} is below the maximum degree {g.max_degree()}")
    if not validate_colouring(g, target).proper:
        raise ColouringError("target colouring is not proper")
    n = g.n
    edges = list(g.edges)
    colours = dict(target.assignment)
    degree = [g.degree(u) for u in range(n + 1)]
    bridged = []
    while True:
        low = min(degree[1:])
        if low >= x:
            break
        step = tuple(u for u in range(1, n + 1) if degree[u] == low)
        edges, colours = _double(edges, colours, n, x, step)
        degree = degree + degree[1:]
        for u in step:
            degree[u] += 1
            degree[u + n] += 1
        bridged.append(step)
        n *= 2
    labels = g.labels + tuple(range(max(g.labels) + 1, max(g.labels) + 1 + n - g.n))
    host = Graph(n, tuple(edges), labels)
    return Embedding(g, host, tuple(bridged)), Colouring(x, colours)


def extend_start(emb: Embedding, start: Colouring) -> Colouring:
    """Extend a colouring of the base graph to the host along the same doublings."""
    n = emb.base.n
    edges = list(emb.base.edges)
    colours = {e: start.assignment[e] for e in edges}
    for step in emb.bridged:
        edges, colours = _double(edges, colours, n, start.palette, step)
        n *= 2
    return Colouring(start.palette, colours)


def project_trace(emb: Embedding, h_trace: Trace, g_start: Colouring) -> Trace:
    """Transpose a host trace to the base graph: one move per base chain inside each host chain."""
    h_start = extend_start(emb, g_start)
    h_state = EdgeState(emb.host, h_start)
    g_state = EdgeState(emb.base, g_start)
    base = set(emb.base.edges)
    moves = []
    for i, mv in enumerate(h_trace.moves, 1):
        try:
            ch = h_state.apply(mv)
        except (ValueError, KeyError) as exc:
            raise PreconditionError(f"host move {i} is invalid: {exc}") from None
        inside = sorted(e for e in ch.edges if e in base)
        pending = set(inside)
        for e in inside:
            if e not in pending:
                continue
            sub = g_state.chain(mv.c1, mv.c2, e)
            check(pending.issuperset(sub.edges), f"base chain at {e} leaves the host chain")
            pending.difference_update(sub.edges)
            moves.append(KempeMove(mv.c1, mv.c2, sub.edges[0]))
            g_state.swap_edges(mv.c1, mv.c2, sub.edges)
    return Trace.begin(emb.base, g_start, moves)


# --- top level ----------------------------------------------------------------------------


@dataclass
class TransformReport:
    trace: Trace
    host_trace: Trace
    embedding: Embedding
    levels: List[LevelReport]

    @property
    def checkpoints(self) -> int:
        return sum(lv.checkpoints for lv in self.levels)

    @property
    def cases(self) -> Counter:
        total: Counter = Counter()
        for lv in self.levels:
            total.update(lv.cases)
        return total


def run_transform(
    g: Graph,
    start: Colouring,
    target: Colouring,
    on_checkpoint: Optional[Callable[[int, Colouring], None]] = None,
) -> TransformReport:
    """Compute a Kempe-change sequence from ``start`` to ``target`` with its statistics.

    ``on_checkpoint`` receives the level colour and the current host colouring
    after every descent step.
    """
    witness = triangle_witness(g)
    if witness is not None:
        raise TriangleError(witness)
    x = target.palette
    if start.palette != x + 1:
        raise PreconditionError(f"start palette {start.palette} must be target palette {x} + 1")
    for name, col in (("start", start), ("target", target)):
        if not validate_colouring(g, col).proper:
            raise ColouringError(f"{name} colouring is not proper")

    emb, h_target = regularize(g, target)
    h = emb.host
    h_start = extend_start(emb, start)
    slack = x + 1
    current = dict(h_start.assignment)
    remaining = list(h.edges)
    host_moves: List[KempeMove] = []
    levels = []
    for i in range(x, 0, -1):
        # at level i the colours are 1..i plus the slack colour, renamed i + 1
        level_graph = Graph(h.n, tuple(remaining), h.labels)
        to_level = {c: c for c in range(1, i + 1)}
        to_level[slack] = i + 1
        back = {v: k for k, v in to_level.items()}
        level_col = Colouring(i + 1, {e: to_level[current[e]] for e in remaining})
        state = EdgeState(level_graph, level_col)
        m = frozenset(e for e in remaining if h_target.assignment[e] == i)

        hook = None
        if on_checkpoint is not None:
            def hook(st, i=i, back=back):
                snap = dict(current)
                snap.update({e: back[c] for e, c in st.colour.items()})
                on_checkpoint(i, Colouring(slack, snap))

        moves, report = _monochromatic(state, m, i, hook)
        levels.append(report)
        host_moves += [KempeMove(back[mv.c1], back[mv.c2], mv.anchor) for mv in moves]
        current.update({e: back[c] for e, c in state.colour.items()})
        remaining = [e for e in remaining if e not in m]
        log.debug("level %d: %d checkpoints, %d moves", i, report.checkpoints, report.moves)

    check(all(current[e] == h_target.assignment[e] for e in h.edges), "host colouring differs from target")
    host_trace = Trace.begin(h, h_start, host_moves)
    trace = project_trace(emb, host_trace, start)
    return TransformReport(trace, host_trace, emb, levels)


def transform(g: Graph, start: Colouring, target: Colouring) -> Trace:
    return run_transform(g, start, target).trace
