"""Graphs, edge colourings, their text formats and structural queries."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

Edge = Tuple[int, int]


class GraphFormatError(ValueError):
    """Raised when a graph or colouring document cannot be parsed."""


class ColouringError(ValueError):
    """Raised when a colouring does not fit its graph or palette."""


class PreconditionError(ValueError):
    """Raised when an operation is called outside its domain."""


class InvariantViolation(RuntimeError):
    """An intermediate claim of a recolouring procedure failed at run time."""


def check(condition: bool, message: str) -> None:
    if not condition:
        raise InvariantViolation(message)


class TriangleError(PreconditionError):
    def __init__(self, witness: Tuple[int, int, int], message: Optional[str] = None):
        self.witness = witness
        super().__init__(message or f"graph contains the triangle {witness}")


def edge(u: int, v: int) -> Edge:
    """Normalize an unordered vertex pair, lower id first."""
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``1..n``.

    ``labels[i - 1]`` is the label vertex ``i`` carries in files. Graphs built
    in code get the identity labelling.
    """

    n: int
    edges: Tuple[Edge, ...]
    labels: Tuple[int, ...] = ()
    adjacency: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _index: Dict[Edge, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        normalized = sorted({edge(u, v) for u, v in self.edges})
        if len(normalized) != len(self.edges):
            raise ValueError("duplicate edge")
        adj: List[List[int]] = [[] for _ in range(self.n + 1)]
        for u, v in normalized:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge {u} {v} outside 1..{self.n}")
            adj[u].append(v)
            adj[v].append(u)
        labels = self.labels or tuple(range(1, self.n + 1))
        if len(labels) != self.n:
            raise ValueError("label count does not match vertex count")
        object.__setattr__(self, "edges", tuple(normalized))
        object.__setattr__(self, "labels", tuple(labels))
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(normalized)})

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence[int]], n: Optional[int] = None) -> "Graph":
        edges = [tuple(e) for e in edges]
        if n is None:
            n = max((max(e) for e in edges), default=1)
        return cls(n, tuple(edges))  # type: ignore[arg-type]

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def neighbours(self, u: int) -> Tuple[int, ...]:
        return self.adjacency[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def has_edge(self, u: int, v: int) -> bool:
        return edge(u, v) in self._index

    def edge_index(self, e: Edge) -> int:
        return self._index[e]

    def max_degree(self) -> int:
        return max(len(self.adjacency[u]) for u in self.vertices)

    def min_degree(self) -> int:
        return min(len(self.adjacency[u]) for u in self.vertices)

    def label(self, u: int) -> int:
        return self.labels[u - 1]

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Colouring:
    """Total map from edges to colours ``1..palette``.

    Properness is not enforced on construction; see :func:`validate_colouring`.
    """

    palette: int
    assignment: Mapping[Edge, int]

    def __post_init__(self) -> None:
        if self.palette < 1:
            raise ColouringError("palette size must be positive")
        clean = {}
        for (u, v), c in self.assignment.items():
            if not 1 <= c <= self.palette:
                raise ColouringError(f"colour {c} on edge {u} {v} outside 1..{self.palette}")
            clean[edge(u, v)] = c
        object.__setattr__(self, "assignment", clean)

    @classmethod
    def from_sequence(cls, g: Graph, colours: Iterable[int], palette: Optional[int] = None) -> "Colouring":
        """Build a colouring from colours listed in ``g.edges`` order."""
        colours = list(colours)
        if len(colours) != len(g.edges):
            raise ColouringError("one colour per edge expected")
        return cls(palette or max(colours, default=1), dict(zip(g.edges, colours)))

    def __getitem__(self, e: Edge) -> int:
        return self.assignment[edge(*e)]

    def as_tuple(self, g: Graph) -> Tuple[int, ...]:
        return tuple(self.assignment[e] for e in g.edges)

    def colours_used(self) -> FrozenSet[int]:
        return frozenset(self.assignment.values())

    def with_palette(self, palette: int) -> "Colouring":
        return Colouring(palette, self.assignment)

    def recoloured(self, changes: Mapping[Edge, int]) -> "Colouring":
        new = dict(self.assignment)
        new.update({edge(*e): c for e, c in changes.items()})
        return Colouring(self.palette, new)


Matching = FrozenSet[Edge]


@dataclass(frozen=True)
class Violation:
    vertex: int
    colour: int
    edges: Tuple[Edge, Edge]


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...]
    colours_used: FrozenSet[int]

    @property
    def proper(self) -> bool:
        return not self.violations


# --- text formats -----------------------------------------------------------


def _data_lines(text: str) -> Iterable[Tuple[int, List[int]]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            yield lineno, [int(tok) for tok in line.split()]
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer token in {raw!r}") from None


def parse_graph(text: str) -> Graph:
    """Parse an edge list; labels are compacted to ``1..n`` in ascending order."""
    pairs = []
    seen = set()
    for lineno, nums in _data_lines(text):
        if len(nums) != 2:
            raise GraphFormatError(f"line {lineno}: expected two vertex labels")
        a, b = nums
        if a < 1 or b < 1:
            raise GraphFormatError(f"line {lineno}: labels must be positive")
        if a == b:
            raise GraphFormatError(f"line {lineno}: loop at vertex {a}")
        key = edge(a, b)
        if key in seen:
            raise GraphFormatError(f"line {lineno}: duplicate edge {a} {b}")
        seen.add(key)
        pairs.append(key)
    if not pairs:
        raise GraphFormatError("empty edge set")
    labels = sorted({x for p in pairs for x in p})
    ids = {lab: i for i, lab in enumerate(labels, 1)}
    return Graph(len(labels), tuple((ids[a], ids[b]) for a, b in pairs), tuple(labels))


def format_graph(g: Graph) -> str:
    return "".join(f"{g.label(u)} {g.label(v)}\n" for u, v in g.edges)


def parse_colouring(g: Graph, text: str, palette: Optional[int] = None) -> Colouring:
    """Parse ``u v c`` lines against ``g``.

    Without an explicit ``palette`` the largest colour used is taken.
    """
    ids = {lab: i for i, lab in enumerate(g.labels, 1)}
    assignment: Dict[Edge, int] = {}
    for lineno, nums in _data_lines(text):
        if len(nums) != 3:
            raise GraphFormatError(f"line {lineno}: expected 'u v colour'")
        a, b, c = nums
        if a not in ids or b not in ids or not g.has_edge(ids[a], ids[b]):
            raise ColouringError(f"line {lineno}: {a} {b} is not an edge of the graph")
        e = edge(ids[a], ids[b])
        if e in assignment:
            raise ColouringError(f"line {lineno}: edge {a} {b} coloured twice")
        if c < 1:
            raise ColouringError(f"line {lineno}: colours start at 1")
        assignment[e] = c
    missing = [e for e in g.edges if e not in assignment]
    if missing:
        u, v = missing[0]
        raise ColouringError(f"edge {g.label(u)} {g.label(v)} has no colour")
    top = max(assignment.values())
    if palette is not None and top > palette:
        raise ColouringError(f"colour {top} exceeds palette {palette}")
    return Colouring(palette or top, assignment)


def format_colouring(g: Graph, c: Colouring) -> str:
    return "".join(f"{g.label(u)} {g.label(v)} {c.assignment[(u, v)]}\n" for u, v in g.edges)


# --- structural queries -----------------------------------------------------


def triangle_witness(g: Graph) -> Optional[Tuple[int, int, int]]:
    """Return the lexicographically first triangle of ``g``, if any."""
    nbrs = [set(a) for a in g.adjacency]
    for u, v in g.edges:
        common = [w for w in g.adjacency[v] if w > v and w in nbrs[u]]
        if common:
            return (u, v, common[0])
    return None


def regular_degree(g: Graph) -> Optional[int]:
    d = g.degree(1)
    return d if all(g.degree(u) == d for u in g.vertices) else None


def _check_domain(g: Graph, c: Colouring) -> None:
    extra = set(c.assignment) - set(g._index)
    if extra:
        raise ColouringError(f"colouring assigns non-edge {min(extra)}")
    missing = [e for e in g.edges if e not in c.assignment]
    if missing:
        raise ColouringError(f"edge {missing[0]} is unassigned")


def validate_colouring(g: Graph, c: Colouring) -> ValidationReport:
    """List every pair of same-coloured edges meeting at a vertex."""
    _check_domain(g, c)
    violations = []
    for u in g.vertices:
        first: Dict[int, Edge] = {}
        for w in g.adjacency[u]:
            e = edge(u, w)
            col = c.assignment[e]
            if col in first:
                violations.append(Violation(u, col, (first[col], e)))
            else:
                first[col] = e
    return ValidationReport(tuple(violations), c.colours_used())


def is_proper(g: Graph, c: Colouring) -> bool:
    return validate_colouring(g, c).proper


def missing_colours(g: Graph, c: Colouring, u: int) -> FrozenSet[int]:
    present = {c.assignment[edge(u, w)] for w in g.adjacency[u]}
    return frozenset(range(1, c.palette + 1)) - present


def missing_colour(g: Graph, c: Colouring, u: int) -> int:
    """The unique colour absent at ``u`` when ``g`` is regular and ``c`` has one spare colour."""
    d = regular_degree(g)
    if d is None:
        raise PreconditionError("missing colour is only defined on regular graphs; regularize first")
    if c.palette != d + 1:
        raise PreconditionError(f"palette {c.palette} is not degree + 1 = {d + 1}")
    free = missing_colours(g, c, u)
    if len(free) != 1:
        raise PreconditionError(f"colouring is not proper at vertex {u}")
    return next(iter(free))


def colour_class(c: Colouring, colour: int) -> Matching:
    if not 1 <= colour <= c.palette:
        raise ColouringError(f"colour {colour} outside 1..{c.palette}")
    return frozenset(e for e, col in c.assignment.items() if col == colour)


def is_matching(edges: Iterable[Edge]) -> bool:
    seen: Set[int] = set()
    for u, v in edges:
        if u in seen or v in seen:
            return False
        seen.update((u, v))
    return True


def is_perfect_matching(g: Graph, m: Iterable[Edge]) -> bool:
    m = list(m)
    return is_matching(m) and 2 * len(m) == g.n and all(g.has_edge(*e) for e in m)


def remove_matching(g: Graph, m: Iterable[Edge]) -> Graph:
    """Delete the edges of ``m``; vertices and labels are retained."""
    m = [edge(*e) for e in m]
    if not is_matching(m):
        raise PreconditionError("edge set is not a matching")
    for e in m:
        if not g.has_edge(*e):
            raise PreconditionError(f"edge {e} is not in the graph")
    gone = set(m)
    return Graph(g.n, tuple(e for e in g.edges if e not in gone), g.labels)


def restrict(c: Colouring, g: Graph, palette: Optional[int] = None) -> Colouring:
    return Colouring(palette or c.palette, {e: c.assignment[e] for e in g.edges})
