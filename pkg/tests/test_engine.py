import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kempeswap.core import (
    Colouring,
    ColouringError,
    Graph,
    PreconditionError,
    TriangleError,
    edge,
    is_proper,
    regular_degree,
    restrict,
    triangle_witness,
)
from kempeswap.engine import (
    CASE_FREE_BAD,
    CASE_UGLY_COMET,
    CASE_UGLY_PATH,
    CASES,
    classify_edges,
    extend_start,
    find_free_vertex_via_ugly,
    make_class_monochromatic,
    project_trace,
    reduce_step,
    regularize,
    run_transform,
    transform,
)
from kempeswap.kempe import EdgeState, KempeMove, Trace, apply_move, chain_at, verify_trace
from kempeswap.oracle import chromatic_index, enumerate_tuples, random_colouring

from graphs import (
    C4_EDGES,
    TEN_EDGES,
    c4_fixture,
    coloured,
    complete,
    complete_bipartite,
    cubic_triangle_free,
    cycle,
    r1,
    small_triangle_free,
)

M_C4 = [(1, 2), (3, 4)]


def test_classify_c4_with_unused_designated_colour():
    g, start, _ = c4_fixture()
    st_ = classify_edges(g, start, M_C4, 1)
    assert st_.bad == {(1, 2), (3, 4)}
    assert not st_.good and not st_.ugly
    assert st_.measure == (2, 0)


def test_classify_after_class_is_aligned():
    g, start, _ = c4_fixture()
    done, _ = make_class_monochromatic(g, start, M_C4, 1)
    st_ = classify_edges(g, done, M_C4, 1)
    assert st_.good == {(1, 2), (3, 4)} and not st_.bad and not st_.ugly


def test_classify_empty_matching_marks_whole_class_ugly():
    g, c = r1()
    st_ = classify_edges(g, c, [], 1)
    assert st_.ugly == {(1, 2), (3, 4)} and not st_.good and not st_.bad


def test_classify_rejects_non_matching():
    g, c = r1()
    with pytest.raises(PreconditionError):
        classify_edges(g, c, [(1, 2), (2, 3)], 1)


def test_reduce_step_on_c4_frees_edge_12_first():
    g, start, _ = c4_fixture()
    after, trace, case = reduce_step(g, start, M_C4, 1)
    assert case == CASE_FREE_BAD
    assert trace.moves == (KempeMove(1, 2, (1, 2)),)
    assert after[(1, 2)] == 1


def test_reduce_step_needs_a_bad_edge():
    g, start, _ = c4_fixture()
    done, _ = make_class_monochromatic(g, start, M_C4, 1)
    with pytest.raises(PreconditionError):
        reduce_step(g, done, M_C4, 1)


def test_make_class_monochromatic_on_c4():
    g, start, _ = c4_fixture()
    done, trace = make_class_monochromatic(g, start, M_C4, 1)
    assert len(trace) == 2
    assert done.assignment == {(1, 2): 1, (3, 4): 1, (2, 3): 3, (1, 4): 3}
    assert verify_trace(g, start, trace, done).accepted


def test_make_class_monochromatic_already_done_is_empty():
    g, start, _ = c4_fixture()
    _, trace = make_class_monochromatic(g, start, M_C4, 2)
    assert len(trace) == 0


def test_r1_class_is_good_but_odd_cycle_has_no_perfect_matching():
    g, c = r1()
    st_ = classify_edges(g, c, [(1, 2), (3, 4)], 1)
    assert st_.good == {(1, 2), (3, 4)} and not st_.bad and not st_.ugly
    with pytest.raises(PreconditionError, match="perfect matching"):
        make_class_monochromatic(g, c, [(1, 2), (3, 4)], 1)


def test_descent_input_preconditions():
    g, start, _ = c4_fixture()
    with pytest.raises(PreconditionError):
        reduce_step(g, start.with_palette(4), M_C4, 1)
    with pytest.raises(PreconditionError):
        reduce_step(g, start, [(1, 2)], 1)
    k4 = complete(4)
    with pytest.raises(TriangleError):
        reduce_step(k4, random_colouring(k4, 4, random.Random(0)), [(1, 2), (3, 4)], 1)


def _regular_instances():
    """Random (colouring, perfect matching, colour) triples on small regular triangle-free graphs."""
    graphs = list(cubic_triangle_free(6)) + list(cubic_triangle_free(8)) + [Graph.from_edges(TEN_EDGES)]
    graphs.append(Graph.from_edges([(i, (i + j - 1) % 10 + 1) for i in range(1, 11) for j in (1, 3)]))
    rng = random.Random(0)
    for g in graphs:
        d = g.max_degree()
        targets = []
        for t in enumerate_tuples(g, d):
            targets.append(t)
            if len(targets) > 200:
                break
        for _ in range(300):
            t = rng.choice(targets)
            m = frozenset(e for e, col in zip(g.edges, t) if col == 1)
            c = random_colouring(g, d + 1, random.Random(rng.random()))
            yield g, c, m, rng.randint(1, d + 1)


def test_every_case_fires_and_reduces_the_measure_as_claimed():
    seen = Counter()
    for g, c, m, col in _regular_instances():
        st_ = classify_edges(g, c, m, col)
        while st_.bad:
            before = st_.measure
            nxt, trace, case = reduce_step(g, c, m, col)
            assert verify_trace(g, c, trace, nxt).accepted
            st_ = classify_edges(g, nxt, m, col)
            after = st_.measure
            assert after < before
            if case == CASE_FREE_BAD:
                assert after == (before[0] - 1, before[1]) and len(trace) == 1
            elif case in (CASE_UGLY_PATH, CASE_UGLY_COMET):
                assert after == (before[0], before[1] - 1)
            else:
                assert after[0] < before[0]
                found = find_free_vertex_via_ugly(g, c, m, col)
                assert found is not None
                u, v, w = found
                state = EdgeState(g, c)
                assert state.missing(u) == col
                assert edge(u, v) in m and c[edge(u, v)] != col
                assert c[edge(v, w)] == col and edge(v, w) not in m
                assert not g.has_edge(u, w)
            seen[case] += 1
            c = nxt
        assert classify_edges(g, c, m, col).measure == (0, 0)
    assert set(seen) == set(CASES), seen


def test_find_free_vertex_without_ugly_edges_is_none():
    g, start, _ = c4_fixture()
    assert find_free_vertex_via_ugly(g, start, M_C4, 1) is None


def test_find_free_vertex_outside_cycle_context_is_rejected():
    g, start, _ = c4_fixture()
    c = Colouring(3, {(1, 2): 2, (2, 3): 1, (3, 4): 2, (1, 4): 3})
    with pytest.raises(PreconditionError):
        find_free_vertex_via_ugly(g, c, M_C4, 1)


# --- regularization and projection -------------------------------------------------


def test_regularize_star_k13():
    g, target = coloured([(1, 2), (1, 3), (1, 4)], [1, 2, 3], 3)
    emb, h_col = regularize(g, target)
    h = emb.host
    assert (h.n, len(h.edges), emb.layers) == (16, 24, 2)
    assert regular_degree(h) == 3
    assert triangle_witness(h) is None
    assert is_proper(h, h_col)
    base = {e for e in h.edges if e[0] <= g.n and e[1] <= g.n}
    assert base == set(g.edges)
    assert restrict(h_col, g) == target


def test_regularize_regular_graph_is_identity():
    g, c = coloured(C4_EDGES, [1, 2, 1, 2], 2)
    emb, h_col = regularize(g, c)
    assert emb.host.edges == g.edges and emb.layers == 0
    assert emb.vertex_map == {1: 1, 2: 2, 3: 3, 4: 4}
    assert h_col == c


def test_regularize_c5_gives_pentagonal_prism():
    g, c = r1()
    emb, h_col = regularize(g, c)
    h = emb.host
    assert (h.n, len(h.edges), emb.layers) == (10, 15, 1)
    assert regular_degree(h) == 3 and triangle_witness(h) is None
    assert [h_col[(x, x + 5)] for x in range(1, 6)] == [2, 3, 3, 3, 1]


def test_regularize_preconditions():
    g, c = coloured([(1, 2), (1, 3), (1, 4)], [1, 2, 3], 3)
    with pytest.raises(PreconditionError):
        regularize(g, Colouring(2, {(1, 2): 1, (1, 3): 2, (1, 4): 1}))
    with pytest.raises(ColouringError):
        regularize(g, Colouring(3, {(1, 2): 1, (1, 3): 1, (1, 4): 2}))


def test_extend_start():
    g, c = r1()
    emb, _ = regularize(g, c)
    start = c.with_palette(4)
    h_start = extend_start(emb, start)
    assert is_proper(emb.host, h_start) and h_start.palette == 4
    assert restrict(h_start, g) == start

    g4, t4 = coloured(C4_EDGES, [1, 2, 1, 2], 2)
    emb4, _ = regularize(g4, t4)
    s4 = Colouring(3, {(1, 2): 3, (2, 3): 1, (3, 4): 2, (1, 4): 2})
    assert extend_start(emb4, s4) == s4

    star, tstar = coloured([(1, 2), (1, 3), (1, 4)], [1, 2, 3], 3)
    embs, _ = regularize(star, tstar)
    sstar = Colouring(4, {(1, 2): 4, (1, 3): 1, (1, 4): 2})
    ext = extend_start(embs, sstar)
    assert embs.host.n == 16 and is_proper(embs.host, ext)


def _prism_walk(steps=400, seed=3):
    g, c = r1()
    emb, _ = regularize(g, c)
    h = emb.host
    start = c.with_palette(4)
    cur = extend_start(emb, start)
    rng = random.Random(seed)
    moves = []
    for _ in range(steps):
        e = rng.choice(h.edges)
        mv = KempeMove(cur[e], rng.choice([x for x in range(1, 5) if x != cur[e]]), e)
        moves.append(mv)
        cur = apply_move(h, cur, mv)
    return g, emb, start, moves


def test_projection_matches_host_restriction_after_every_prefix():
    g, emb, start, moves = _prism_walk(steps=60)
    h = emb.host
    h_start = extend_start(emb, start)
    h_cur = h_start
    for i in range(1, len(moves) + 1):
        h_cur = apply_move(h, h_cur, moves[i - 1])
        proj = project_trace(emb, Trace.begin(h, h_start, moves[:i]), start)
        verdict = verify_trace(g, start, proj, restrict(h_cur, g))
        assert verdict.accepted


def test_projection_splits_a_host_chain_crossing_the_base_twice():
    g, emb, start, moves = _prism_walk()
    h = emb.host
    h_start = extend_start(emb, start)
    state = EdgeState(h, h_start)
    base = set(g.edges)
    done = 0
    for i, mv in enumerate(moves):
        g_now = restrict(state.snapshot(), g)
        ch = state.chain(mv.c1, mv.c2, mv.anchor)
        pieces = {frozenset(chain_at(g, g_now, mv.c1, mv.c2, e).edges) for e in ch.edges if e in base}
        proj = project_trace(emb, Trace.begin(h, h_start, moves[: i + 1]), start)
        new = proj.moves[done:]
        done = len(proj)
        assert len(new) == len(pieces)
        if len(pieces) >= 2:
            assert len({m.anchor for m in new}) == len(pieces)
            return
        state.apply(mv)
    raise AssertionError("no host chain crossed the base twice")


def test_projection_identity_embedding_keeps_trace():
    g, start, target = c4_fixture()
    emb, _ = regularize(g, target)
    trace = Trace.begin(g, start, [KempeMove(1, 2, (1, 2)), KempeMove(2, 3, (1, 4))])
    assert project_trace(emb, trace, start) == trace


# --- transform ---------------------------------------------------------------------


def test_transform_c4():
    g, start, target = c4_fixture()
    trace = transform(g, start, target)
    assert len(trace) <= 12
    verdict = verify_trace(g, start, trace, target)
    assert verdict.accepted and verdict.final.assignment == target.assignment


def test_transform_from_target_with_spare_colour_is_empty():
    g = cycle(6)
    target = Colouring(2, {e: 1 + (i % 2) for i, e in enumerate([(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6)])})
    assert len(transform(g, target.with_palette(3), target)) == 0


def test_transform_perfect_matching_graph():
    g, start = coloured([(1, 2), (3, 4)], [2, 1], 2)
    _, target = coloured([(1, 2), (3, 4)], [1, 1], 1)
    trace = transform(g, start, target)
    assert len(trace) == 1 and verify_trace(g, start, trace, target).accepted


def test_transform_errors():
    k3 = complete(3)
    s = Colouring(4, {(1, 2): 1, (2, 3): 2, (1, 3): 3})
    with pytest.raises(TriangleError) as info:
        transform(k3, s, Colouring(3, dict(s.assignment)))
    assert sorted(info.value.witness) == [1, 2, 3]
    g, start, target = c4_fixture()
    with pytest.raises(PreconditionError):
        transform(g, start, target.with_palette(3))
    bad = Colouring(3, {(1, 2): 1, (2, 3): 1, (3, 4): 2, (1, 4): 2})
    with pytest.raises(ColouringError):
        transform(g, bad, target)


def test_transform_report_statistics():
    g, start, target = c4_fixture()
    report = run_transform(g, start, target)
    assert report.checkpoints == sum(report.cases.values())
    assert sum(lv.moves for lv in report.levels) == len(report.host_trace)
    for lv in report.levels:
        assert all(b < a for a, b in zip(lv.measures, lv.measures[1:]))
        assert lv.measures[-1] == (0, 0)


POOL = small_triangle_free(6)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(POOL), st.integers(0, 10**6))
def test_transform_verifies_on_random_small_graphs(g, seed):
    rng = random.Random(seed)
    x = chromatic_index(g)
    start = random_colouring(g, x + 1, rng)
    target = random_colouring(g, x, rng)
    trace = transform(g, start, target)
    assert verify_trace(g, start, trace, target).accepted


def test_transform_on_cubic_bipartite_with_nontrivial_start():
    g = complete_bipartite(3, 3)
    target = Colouring(3, {(a, b): (a + b) % 3 + 1 for a, b in g.edges})
    start = random_colouring(g, 4, random.Random(7))
    trace = transform(g, start, target)
    assert verify_trace(g, start, trace, target).accepted
