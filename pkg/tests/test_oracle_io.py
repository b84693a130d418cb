import pytest
from hypothesis import given
from hypothesis import strategies as st

from rainbow_nibble import io
from rainbow_nibble.acceptance import brute_force_max
from rainbow_nibble.constructions import cyclic_latin_coloring, prop2_counterexample
from rainbow_nibble.errors import NotLatin, ParseError
from rainbow_nibble.graph import EdgeColoredGraph, RainbowMatching, build_graph, verify_rainbow_matching
from rainbow_nibble.oracle import exists_rainbow_matching, max_partial_transversal, max_rainbow_matching


def test_oracle_examples():
    assert max_rainbow_matching(prop2_counterexample(2)).max_size == 1
    assert max_rainbow_matching(cyclic_latin_coloring(2)).max_size == 1
    res = max_rainbow_matching(EdgeColoredGraph(0))
    assert res.max_size == 0 and len(res.witness) == 0


def test_exists_examples():
    star = build_graph(4, [(0, 1, 0), (0, 2, 1), (0, 3, 2)])
    assert exists_rainbow_matching(star, 0)
    assert not exists_rainbow_matching(star, 2)
    assert not exists_rainbow_matching(prop2_counterexample(4), 4)
    assert exists_rainbow_matching(prop2_counterexample(4), 3)


def test_partial_transversal():
    cyc = lambda n: [[(i + j) % n for j in range(n)] for i in range(n)]
    assert max_partial_transversal(1, cyc(1)) == 1
    assert max_partial_transversal(2, cyc(2)) == 1
    assert max_partial_transversal(3, cyc(3)) == 3
    with pytest.raises(NotLatin):
        max_partial_transversal(2, [[0, 1], [0, 1]])


def test_budget_flag():
    res = max_rainbow_matching(cyclic_latin_coloring(6), node_budget=5)
    assert not res.exact


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 6))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=9))
    k = draw(st.integers(1, 4))
    return build_graph(n, [(u, v, draw(st.integers(0, k - 1))) for u, v in chosen], k)


@given(small_graphs())
def test_oracle_matches_enumeration(g):
    res = max_rainbow_matching(g)
    assert res.max_size == brute_force_max(g)
    ok, _ = verify_rainbow_matching(g, res.witness)
    assert ok and len(res.witness) == res.max_size


@given(small_graphs(), st.integers(0, 8))
def test_deleting_an_edge_never_helps(g, i):
    edges = g.alive_edges()
    if not edges:
        return
    before = max_rainbow_matching(g).max_size
    g.delete_edge(edges[i % len(edges)])
    assert max_rainbow_matching(g).max_size <= before


@given(small_graphs())
def test_ecg_round_trip(g):
    h = io.parse_ecg(io.format_ecg(g))
    assert (h.n, h.eu, h.ev, h.ec) == (g.n, g.eu, g.ev, g.ec)


def test_side_a_round_trip():
    g = build_graph(4, [(0, 2, 0), (1, 3, 1)], side_a=[0, 1])
    assert io.parse_ecg(io.format_ecg(g)).side_a == frozenset({0, 1})


def test_rmm_round_trip_and_errors():
    g = build_graph(4, [(0, 1, 0), (2, 3, 1)])
    m = RainbowMatching([(0, 0), (1, 1)])
    assert io.parse_rmm(io.format_rmm(m), g).entries == m.entries
    with pytest.raises(ParseError) as info:
        io.parse_rmm("m 0 0\nm 9 1\n", g)
    assert info.value.line == 2
    with pytest.raises(ParseError):
        io.parse_rmm("x 1 2\n")
    with pytest.raises(ParseError):
        io.parse_ecg("e 0 1 0\n")
