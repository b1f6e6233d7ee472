"""Brute-force ground truth: all proper k-edge-colourings and the Kempe reconfiguration graph.

Colourings are handled as tuples aligned with ``g.edges`` and stored under
their mixed-radix index ``sum((t[i] - 1) * k**i)``.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .core import Colouring, Graph
from .kempe import KempeMove, Trace

DEFAULT_CAP = 10**7


class CapExceeded(RuntimeError):
    pass


def colouring_index(t: Sequence[int], k: int) -> int:
    idx = 0
    for c in reversed(t):
        idx = idx * k + (c - 1)
    return idx


def decode_index(idx: int, k: int, m: int) -> Tuple[int, ...]:
    out = []
    for _ in range(m):
        idx, r = divmod(idx, k)
        out.append(r + 1)
    return tuple(out)


def _earlier_neighbours(g: Graph) -> List[List[int]]:
    """For each edge index, the indices of smaller edges sharing a vertex."""
    inc: Dict[int, List[int]] = {u: [] for u in g.vertices}
    out = []
    for i, (u, v) in enumerate(g.edges):
        out.append(inc[u] + inc[v])
        inc[u].append(i)
        inc[v].append(i)
    return out


def estimate_states(g: Graph, k: int) -> int:
    """Upper bound on the number of proper k-edge-colourings (greedy product bound)."""
    seen = {u: 0 for u in g.vertices}
    bound = 1
    for u, v in g.edges:
        bound *= max(k - max(seen[u], seen[v]), 0)
        seen[u] += 1
        seen[v] += 1
    return bound


def _backtrack(g: Graph, k: int, order: Optional[random.Random] = None) -> Iterator[Tuple[int, ...]]:
    m = len(g.edges)
    before = _earlier_neighbours(g)
    t = [0] * m
    palette = list(range(1, k + 1))

    def rec(i):
        if i == m:
            yield tuple(t)
            return
        used = {t[j] for j in before[i]}
        cols = palette if order is None else order.sample(palette, k)
        for c in cols:
            if c not in used:
                t[i] = c
                yield from rec(i + 1)
        t[i] = 0

    yield from rec(0)


def enumerate_colourings(g: Graph, k: int, cap: int = DEFAULT_CAP) -> Iterator[Colouring]:
    """Every proper k-edge-colouring once, in lexicographic order of ``g.edges`` colours."""
    for t in enumerate_tuples(g, k, cap):
        yield Colouring(k, dict(zip(g.edges, t)))


def enumerate_tuples(g: Graph, k: int, cap: int = DEFAULT_CAP) -> Iterator[Tuple[int, ...]]:
    if k < 1:
        raise ValueError("k must be positive")
    count = 0
    for t in _backtrack(g, k):
        count += 1
        if count > cap:
            raise CapExceeded(f"more than {cap} colourings")
        yield t


def count_colourings(g: Graph, k: int, cap: int = DEFAULT_CAP) -> int:
    return sum(1 for _ in enumerate_tuples(g, k, cap))


def random_colouring(g: Graph, k: int, rng: random.Random) -> Optional[Colouring]:
    """First proper colouring found by backtracking with shuffled colour order (not uniform)."""
    for t in _backtrack(g, k, rng):
        return Colouring(k, dict(zip(g.edges, t)))
    return None


def chromatic_index(g: Graph) -> int:
    d = g.max_degree()
    return d if next(_backtrack(g, d), None) is not None else d + 1


class _Space:
    """Move generation on index-encoded colourings of one graph."""

    def __init__(self, g: Graph, k: int):
        self.g, self.k = g, k
        self.m = len(g.edges)
        self.ends = g.edges
        self.weight = [k**i for i in range(self.m)]

    def neighbours(self, idx: int) -> Iterator[Tuple[KempeMove, int]]:
        k, ends = self.k, self.ends
        t = decode_index(idx, k, self.m)
        at: List[Dict[int, int]] = [dict() for _ in range(self.g.n + 1)]
        for i, c in enumerate(t):
            u, v = ends[i]
            at[u][c] = i
            at[v][c] = i
        present = set(t)
        for c1 in range(1, k + 1):
            for c2 in range(c1 + 1, k + 1):
                if c1 not in present and c2 not in present:
                    continue
                seen = set()
                for i, c in enumerate(t):
                    if (c != c1 and c != c2) or i in seen:
                        continue
                    comp = [i]
                    seen.add(i)
                    j = 0
                    while j < len(comp):
                        for x in ends[comp[j]]:
                            for col in (c1, c2):
                                e = at[x].get(col)
                                if e is not None and e not in seen:
                                    seen.add(e)
                                    comp.append(e)
                        j += 1
                    delta = 0
                    for e in comp:
                        delta += (c2 - c1 if t[e] == c1 else c1 - c2) * self.weight[e]
                    yield KempeMove(c1, c2, ends[min(comp)]), idx + delta


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass
class Components:
    graph: Graph
    k: int
    indices: List[int]  # colouring index of each state, canonical order
    label: List[int]  # class number per state, classes numbered by first member

    @property
    def total(self) -> int:
        return len(self.indices)

    @property
    def classes(self) -> List[List[int]]:
        groups: Dict[int, List[int]] = {}
        for s, lab in enumerate(self.label):
            groups.setdefault(lab, []).append(s)
        return [groups[key] for key in sorted(groups)]

    @property
    def sizes(self) -> List[int]:
        return sorted(len(c) for c in self.classes)

    def class_of(self, c: Colouring) -> int:
        idx = colouring_index(c.as_tuple(self.graph), self.k)
        pos = {x: s for s, x in enumerate(self.indices)}
        return self.label[pos[idx]]

    def colouring(self, s: int) -> Colouring:
        return Colouring(self.k, dict(zip(self.graph.edges, decode_index(self.indices[s], self.k, len(self.graph.edges)))))

    def diameters(self) -> List[int]:
        space = _Space(self.graph, self.k)
        out = []
        for members in self.classes:
            best = 0
            for s in members:
                dist = _bfs(space, self.indices[s], None, len(self.indices))[0]
                best = max(best, max(dist.values()))
            out.append(best)
        return out


def reconfiguration_components(g: Graph, k: int, cap: int = DEFAULT_CAP) -> Components:
    """Partition all proper k-edge-colourings into Kempe equivalence classes."""
    indices = [colouring_index(t, k) for t in enumerate_tuples(g, k, cap)]
    pos = {x: s for s, x in enumerate(indices)}
    uf = _UnionFind(len(indices))
    space = _Space(g, k)
    for s, idx in enumerate(indices):
        for _, nxt in space.neighbours(idx):
            uf.union(s, pos[nxt])
    roots = [uf.find(s) for s in range(len(indices))]
    number: Dict[int, int] = {}
    label = [number.setdefault(r, len(number)) for r in roots]
    return Components(g, k, indices, label)


def reconfiguration_edges(comp: Components) -> Iterator[Tuple[int, int]]:
    space = _Space(comp.graph, comp.k)
    pos = {x: s for s, x in enumerate(comp.indices)}
    for s, idx in enumerate(comp.indices):
        for _, nxt in space.neighbours(idx):
            t = pos[nxt]
            if s < t:
                yield s, t


def _bfs(space: _Space, src: int, dst: Optional[int], cap: int):
    dist = {src: 0}
    parent: Dict[int, Tuple[int, KempeMove]] = {}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            break
        for mv, y in space.neighbours(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                parent[y] = (x, mv)
                if len(dist) > cap:
                    raise CapExceeded(f"more than {cap} colourings visited")
                queue.append(y)
    return dist, parent


def are_equivalent(
    g: Graph, a: Colouring, b: Colouring, k: int, cap: int = DEFAULT_CAP
) -> Tuple[bool, Optional[Trace]]:
    """Breadth-first search from ``a``; a shortest trace to ``b`` when reachable."""
    space = _Space(g, k)
    src = colouring_index(a.as_tuple(g), k)
    dst = colouring_index(b.as_tuple(g), k)
    dist, parent = _bfs(space, src, dst, cap)
    if dst not in dist:
        return False, None
    moves = []
    x = dst
    while x != src:
        x, mv = parent[x]
        moves.append(mv)
    return True, Trace.begin(g, a.with_palette(k), reversed(moves))


def kempe_distances(g: Graph, a: Colouring, k: int, cap: int = DEFAULT_CAP) -> Dict[int, int]:
    """Kempe distance from ``a`` to every colouring in its class, keyed by colouring index."""
    return _bfs(_Space(g, k), colouring_index(a.as_tuple(g), k), None, cap)[0]
