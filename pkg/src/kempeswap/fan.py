"""Fan digraphs around a vertex and the recolourings that invert their sequences.

All procedures here assume a ``d``-regular graph coloured with ``d + 1``
colours, so that every vertex misses exactly one colour. Each realization
turns an inversion into explicit Kempe changes and checks, as it goes, the
intermediate facts it relies on; a failed check raises
:class:`~kempeswap.core.InvariantViolation` instead of producing a trace.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .core import (
    Colouring,
    Edge,
    Graph,
    PreconditionError,
    check,
    edge,
    regular_degree,
    triangle_witness,
)
from .kempe import EdgeState, KempeMove, Trace

PATH, CYCLE, COMET = "path", "cycle", "comet"


@dataclass(frozen=True)
class FanSequence:
    """Vertices ``x_0..x_p`` such that ``u x_0, ..., u x_p`` is the walk of out-edges in the fan digraph at ``u``."""

    centre: int
    nodes: Tuple[int, ...]
    shape: str
    comet_target: Optional[int] = None
    saturated: Optional[bool] = None
    witnesses: Tuple[int, ...] = ()  # indices at which a cycle fails to be saturated

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(edge(self.centre, x) for x in self.nodes)

    @property
    def p(self) -> int:
        return len(self.nodes) - 1

    def rotated(self, r: int) -> "FanSequence":
        if self.shape != CYCLE:
            raise PreconditionError("only cycles can be rotated")
        n = len(self.nodes)
        nodes = self.nodes[r:] + self.nodes[:r]
        return replace(self, nodes=nodes, witnesses=tuple(sorted((i - r) % n for i in self.witnesses)))


@dataclass(frozen=True)
class FanDigraph:
    centre: int
    nodes: Tuple[Edge, ...]
    out_edge: Dict[Edge, Edge]


def _require_level(g: Graph, c: Colouring) -> None:
    d = regular_degree(g)
    if d is None:
        raise PreconditionError("fan machinery needs a regular graph")
    if c.palette != d + 1:
        raise PreconditionError(f"fan machinery needs palette {d + 1}, got {c.palette}")


def _out(state: EdgeState, u: int, w: int) -> Optional[int]:
    return state.at[u].get(state.missing(w))


def _sequence(state: EdgeState, u: int, v: int, saturation: bool = True) -> FanSequence:
    nodes = [v]
    pos = {v: 0}
    while True:
        x = _out(state, u, nodes[-1])
        if x is None:
            return FanSequence(u, tuple(nodes), PATH)
        if x in pos:
            q = pos[x]
            if q:
                return FanSequence(u, tuple(nodes), COMET, comet_target=q)
            if not saturation:
                return FanSequence(u, tuple(nodes), CYCLE)
            wit = _witnesses(state, u, nodes)
            return FanSequence(u, tuple(nodes), CYCLE, saturated=not wit, witnesses=wit)
        pos[x] = len(nodes)
        nodes.append(x)


def _witnesses(state: EdgeState, u: int, nodes: Sequence[int]) -> Tuple[int, ...]:
    """Indices ``i`` where the chain of ``(colour(u x_i), m(u))`` at ``u`` misses ``x_{i-1}``."""
    mu = state.missing(u)
    out = []
    for i, x in enumerate(nodes):
        ch = state.chain(state[(u, x)], mu, u)
        if nodes[i - 1] not in ch.vertices:
            out.append(i)
    return tuple(out)


def fan_digraph(g: Graph, c: Colouring, u: int) -> FanDigraph:
    _require_level(g, c)
    state = EdgeState(g, c)
    out = {}
    for w in g.neighbours(u):
        x = _out(state, u, w)
        if x is not None:
            out[edge(u, w)] = edge(u, x)
    return FanDigraph(u, tuple(edge(u, w) for w in g.neighbours(u)), out)


def fan_sequence(g: Graph, c: Colouring, u: int, v: int) -> FanSequence:
    if not g.has_edge(u, v):
        raise PreconditionError(f"{u} {v} is not an edge")
    _require_level(g, c)
    return _sequence(EdgeState(g, c), u, v)


def all_sequences(g: Graph, c: Colouring) -> Dict[Tuple[int, int], FanSequence]:
    """``fan_sequence(g, c, u, v)`` for every ordered edge ``(u, v)``, sharing one working state."""
    _require_level(g, c)
    state = EdgeState(g, c)
    return {(u, v): _sequence(state, u, v) for a, b in g.edges for u, v in ((a, b), (b, a))}


def invert_sequence(g: Graph, c: Colouring, s: FanSequence) -> Colouring:
    """Recolour every ``u x_i`` of a path or cycle with the colour missing at ``x_i``."""
    if s.shape == COMET:
        raise PreconditionError("comets cannot be inverted")
    _require_level(g, c)
    state = EdgeState(g, c)
    return c.recoloured({edge(s.centre, x): state.missing(x) for x in s.nodes})


def _consistent(state: EdgeState, s: FanSequence) -> None:
    fresh = _sequence(state, s.centre, s.nodes[0], saturation=False)
    if fresh.nodes != s.nodes or fresh.shape != s.shape:
        raise PreconditionError("sequence does not match the colouring")


# --- realizations on a working state ------------------------------------------


def _path_moves(state: EdgeState, u: int, nodes: Sequence[int]) -> List[KempeMove]:
    """Invert a path sequence by single-edge swaps from its last node back to its first."""
    check(state.missing(nodes[-1]) == state.missing(u), "path sequence must end at a vertex missing m(u)")
    moves = []
    for x in reversed(nodes):
        e = edge(u, x)
        a, mu = state[e], state.missing(u)
        ch = state.chain(a, mu, e)
        check(ch.edges == (e,), f"chain of ({a}, {mu}) at {e} is not a single edge")
        state.swap_edges(a, mu, ch.edges)
        moves.append(KempeMove(a, mu, e))
    return moves


def _nonsaturated_moves(state: EdgeState, u: int, nodes: Sequence[int]) -> List[KempeMove]:
    """Invert a cycle whose index 0 witnesses non-saturation."""
    x0, xp = nodes[0], nodes[-1]
    a0, mu = state[(u, x0)], state.missing(u)
    check(state.missing(xp) == a0, "cycle must close: m(x_p) = colour(u x_0)")
    c = state.chain(a0, mu, xp)
    check(u not in c.vertices, "index 0 does not witness non-saturation")
    moves = [KempeMove(a0, mu, c.edges[0])]
    state.swap_edges(a0, mu, c.edges)
    check(state.missing(xp) == mu, "after the first swap x_p must miss m(u)")
    moves += _path_moves(state, u, nodes)
    c2 = state.chain(a0, mu, xp)
    check(set(c2.edges) == set(c.edges) | {edge(u, xp)}, "closing chain must be C plus u x_p")
    moves.append(KempeMove(a0, mu, c2.edges[0]))
    state.swap_edges(a0, mu, c2.edges)
    return moves


def _comet_moves(state: EdgeState, u: int, nodes: Sequence[int], q: int) -> Tuple[List[KempeMove], Tuple[int, ...]]:
    check(0 < q < len(nodes) - 1, "comet target must be interior")
    mu, aq = state.missing(u), state[(u, nodes[q])]
    c = state.chain(mu, aq, (u, nodes[q]))
    check(c.shape == PATH, "comet chain must be a path")
    moves = [KempeMove(mu, aq, c.edges[0])]
    state.swap_edges(mu, aq, c.edges)
    after = _sequence(state, u, nodes[0], saturation=False)
    check(after.shape == PATH, "comet did not become a path")
    check(after.nodes in (tuple(nodes[:q]), tuple(nodes)), "comet path has unexpected nodes")
    moves += _path_moves(state, u, after.nodes)
    return moves, after.nodes


def _smallest_witness(state: EdgeState, u: int, nodes: Sequence[int]) -> Tuple[int, ...]:
    wit = _witnesses(state, u, nodes)
    check(bool(wit), "cycle is saturated")
    r = wit[0]
    return tuple(nodes[r:]) + tuple(nodes[:r])


def _incident(u: int, v: int, xs: Sequence[int], ys: Sequence[int]) -> set:
    return {u, v, *xs, *ys}


def _saturated_moves(
    state: EdgeState,
    u: int,
    xs: Sequence[int],
    ys: Sequence[int],
    stages: Optional[List[Tuple[str, Colouring]]] = None,
) -> Tuple[List[KempeMove], str]:
    """Invert the saturated cycle ``xs`` at ``u`` (``xs[0] = v``) using the cycle ``ys`` at ``v`` (``ys[0] = u``).

    Returns the moves and which branch ran: ``"resaturated"`` when swapping
    the outside chain breaks saturation, ``"double"`` otherwise.
    """
    v = xs[0]
    check(ys[0] == u, "opposite sequence must start at u v")
    xp, yq, q = xs[-1], ys[-1], len(ys) - 1
    a, mu, mv = state[(u, v)], state.missing(u), state.missing(v)
    check(mu != mv, "m(u) = m(v) cannot give cycles")
    check(state.missing(xp) == a and state.missing(yq) == a, "both cycles must close on colour(uv)")
    check(xp != yq, "x_p = y_q would form a triangle")
    check(q >= 2, "q >= 2 in the saturated case")
    fan_edges = {edge(u, x) for x in xs} | {edge(v, y) for y in ys}
    near = _incident(u, v, xs, ys[:-1])

    def outside(ch, label):
        check(not fan_edges & set(ch.edges), f"{label} meets the fans")
        check(not near & set(ch.endpoints), f"{label} ends next to the fans")

    def record(label):
        if stages is not None:
            stages.append((label, state.snapshot()))

    target = {edge(u, x): state.missing(x) for x in xs}
    c = state.chain(a, mu, yq)
    outside(c, "C")
    moves = [KempeMove(a, mu, c.edges[0])]
    state.swap_edges(a, mu, c.edges)
    record("alpha1")
    again = _sequence(state, u, v)
    check(again.shape == CYCLE and again.nodes == tuple(xs), "X_u must stay a cycle after swapping C")

    if not again.saturated:
        moves += _nonsaturated_moves(state, u, again.rotated(again.witnesses[0]).nodes)
        back = state.chain(a, mu, c.edges[0])
        check(back.edges == c.edges, "C must survive the inversion unchanged")
        moves.append(KempeMove(a, mu, c.edges[0]))
        state.swap_edges(a, mu, c.edges)
        branch = "resaturated"
    else:
        check(state.missing(yq) == mu, "y_q must miss m(u) after swapping C")
        c1 = state.chain(mu, mv, yq)
        check(u not in c1.vertices and v not in c1.vertices, "C' must avoid u and v")
        outside(c1, "C'")
        moves.append(KempeMove(mu, mv, c1.edges[0]))
        state.swap_edges(mu, mv, c1.edges)
        record("alpha2")
        ypath = _sequence(state, v, u, saturation=False)
        check(ypath.shape == PATH and ypath.nodes == tuple(ys), "Y_v must become a path")
        moves += _path_moves(state, v, ys)
        record("alpha3")
        xpath = _sequence(state, u, xs[1], saturation=False)
        check(xpath.shape == PATH and xpath.nodes == tuple(xs[1:]), "X_u minus uv must be a path")
        moves += _path_moves(state, u, xs[1:])
        record("alpha4")
        check(state.missing(v) == a and state.missing(u) == mv and state[(u, v)] == mu, "unexpected colours at uv")
        d = state.chain(mu, mv, (u, v))
        check(set(d.edges) == set(c1.edges) | {edge(u, v), edge(v, yq)}, "chain at uv must be C' + uv + vy_q")
        moves.append(KempeMove(mu, mv, d.edges[0]))
        state.swap_edges(mu, mv, d.edges)
        record("alpha5")
        e5 = state.chain(a, mu, c.edges[0])
        check(set(e5.edges) == set(c.edges) | {edge(v, yq)}, "chain through C must be C + vy_q")
        z = _sequence(state, v, ys[1])
        want = (ys[1],) + tuple(reversed(ys[2:]))
        check(z.shape == CYCLE and z.nodes == want, "reversed Y cycle expected at v")
        check(not z.saturated, "reversed Y cycle must be non-saturated")
        moves += _nonsaturated_moves(state, v, z.rotated(z.witnesses[0]).nodes)
        record("alpha6")
        last = state.chain(a, mu, c.edges[0])
        check(last.edges == c.edges, "C must be a chain again at the end")
        moves.append(KempeMove(a, mu, c.edges[0]))
        state.swap_edges(a, mu, c.edges)
        branch = "double"

    for e, col in target.items():
        check(state[e] == col, f"edge {e} did not receive its inverted colour")
    return moves, branch


# --- public realizations -------------------------------------------------------


def realize_path(g: Graph, c: Colouring, s: FanSequence) -> Trace:
    if s.shape != PATH:
        raise PreconditionError(f"expected a path, got a {s.shape}")
    _require_level(g, c)
    state = EdgeState(g, c)
    _consistent(state, s)
    return Trace.begin(g, c, _path_moves(state, s.centre, s.nodes))


def realize_comet(g: Graph, c: Colouring, s: FanSequence) -> Tuple[Colouring, Trace]:
    """Swap one chain outside the comet, then invert the path that remains.

    The result misses ``colour(u x_0)`` at ``u`` and has fewer edges of that colour.
    """
    if s.shape != COMET:
        raise PreconditionError(f"expected a comet, got a {s.shape}")
    _require_level(g, c)
    state = EdgeState(g, c)
    _consistent(state, s)
    moves, _ = _comet_moves(state, s.centre, s.nodes, s.comet_target)
    return state.snapshot(), Trace.begin(g, c, moves)


def realize_nonsaturated_cycle(g: Graph, c: Colouring, s: FanSequence, rotation: Optional[int] = None) -> Trace:
    if s.shape != CYCLE:
        raise PreconditionError(f"expected a cycle, got a {s.shape}")
    _require_level(g, c)
    state = EdgeState(g, c)
    _consistent(state, s)
    wit = _witnesses(state, s.centre, s.nodes)
    if not wit:
        raise PreconditionError("cycle is saturated")
    r = wit[0] if rotation is None else rotation
    if r not in wit:
        raise PreconditionError(f"index {r} does not witness non-saturation")
    nodes = s.nodes[r:] + s.nodes[:r]
    return Trace.begin(g, c, _nonsaturated_moves(state, s.centre, nodes))


def realize_saturated_cycle(
    g: Graph,
    c: Colouring,
    su: FanSequence,
    sv: FanSequence,
    stages: Optional[List[Tuple[str, Colouring]]] = None,
) -> Trace:
    """Invert the saturated cycle ``su`` at ``u`` with help of the cycle ``sv`` at ``v``.

    ``stages``, if given, collects the labelled intermediate colourings.
    """
    _require_level(g, c)
    if triangle_witness(g) is not None:
        raise PreconditionError("saturated cycles can only be inverted in triangle-free graphs")
    if su.shape != CYCLE or sv.shape != CYCLE:
        raise PreconditionError("both sequences must be cycles")
    u, v = su.centre, sv.centre
    if su.nodes[0] != v or sv.nodes[0] != u:
        raise PreconditionError("both sequences must start at the edge uv")
    state = EdgeState(g, c)
    _consistent(state, su)
    _consistent(state, sv)
    if _witnesses(state, u, su.nodes):
        raise PreconditionError("cycle at u is not saturated")
    moves, _ = _saturated_moves(state, u, su.nodes, sv.nodes, stages)
    return Trace.begin(g, c, moves)
