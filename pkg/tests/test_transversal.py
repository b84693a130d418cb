import math

import pytest

from rainbow_nibble.constructions import cyclic_latin_coloring
from rainbow_nibble.errors import BudgetExceeded, CompletionFailed, EmptyColor, GreedyStuck
from rainbow_nibble.graph import RainbowMatching, build_graph, verify_rainbow_matching
from rainbow_nibble.rng import substream
from rainbow_nibble.transversal import (
    build_conflict_instance,
    complete_rainbow_matching,
    completion_hypothesis,
    greedy_complete,
    independent_transversal,
)


def test_conflict_instances():
    g = build_graph(4, [(0, 1, 0), (2, 3, 1)])
    inst = build_conflict_instance(g, {0, 1})
    assert inst.parts == [[0], [1]] and inst.max_conflict_degree() == 0
    g = build_graph(3, [(0, 1, 0), (1, 2, 1)])
    assert build_conflict_instance(g, {0, 1}).conflict_degree(0) == 1
    inst = build_conflict_instance(cyclic_latin_coloring(3), range(3))
    assert [len(p) for p in inst.parts] == [3, 3, 3]
    assert {inst.conflict_degree(e) for p in inst.parts for e in p} == {4}


def test_conflict_instance_empty_color():
    g = build_graph(3, [(0, 1, 0)], 2)
    with pytest.raises(EmptyColor):
        build_conflict_instance(g, {1})


def test_transversal_trivial_and_impossible():
    g = build_graph(4, [(0, 1, 0), (2, 3, 1)])
    chosen, steps = independent_transversal(build_conflict_instance(g, {0, 1}))
    assert chosen == [0, 1] and steps == 0
    g = build_graph(3, [(0, 1, 0), (1, 2, 1)])
    with pytest.raises(BudgetExceeded):
        independent_transversal(build_conflict_instance(g, {0, 1}), resample_budget=50)


def big_parts_instance(seed, parts=6, per=60, n=400):
    """Each part is a random matching, so conflict degree is at most 2(parts-1)."""
    rng = substream(seed, "test-parts")
    pairs, edges = set(), []
    for c in range(parts):
        verts = rng.sample(range(n), 2 * per)
        for i in range(per):
            u, v = verts[2 * i], verts[2 * i + 1]
            key = (min(u, v), max(u, v))
            if key not in pairs:
                pairs.add(key)
                edges.append((u, v, c))
    return build_graph(n, edges, parts)


@pytest.mark.parametrize("seed", range(5))
def test_resampling_succeeds_with_large_parts(seed):
    g = big_parts_instance(seed)
    inst = build_conflict_instance(g, range(6))
    assert all(len(p) >= 2 * math.e * inst.max_conflict_degree() for p in inst.parts)
    chosen, _ = independent_transversal(inst, seed)
    verts = [x for e in chosen for x in (g.eu[e], g.ev[e])]
    assert len(set(verts)) == 2 * len(chosen)


def test_complete_examples():
    g = build_graph(2, [(0, 1, 0)])
    assert complete_rainbow_matching(g, [0]).entries == [(0, 0)]
    g = build_graph(6, [(0, 1, 0), (2, 3, 1), (4, 5, 2)])
    m = complete_rainbow_matching(g, [0, 1, 2])
    assert sorted(m.entries) == [(0, 0), (1, 1), (2, 2)]
    assert completion_hypothesis(g, [0, 1, 2]) == (False, 1, 1)


def test_complete_failure():
    g = build_graph(3, [(0, 1, 0), (1, 2, 1)])
    with pytest.raises(CompletionFailed):
        complete_rainbow_matching(g, [0, 1], budget=10)


def test_greedy_examples():
    g = build_graph(3, [(0, 1, 0), (0, 2, 1)])
    m = greedy_complete(g, RainbowMatching(), [0])
    assert len(m) == 1 and verify_rainbow_matching(g, m)[0]
    g = build_graph(4, [(0, 1, 0), (2, 3, 0)])
    with pytest.raises(GreedyStuck):
        greedy_complete(g, RainbowMatching([(0, 0)]), [2])


def test_greedy_avoid():
    g = build_graph(4, [(0, 1, 0), (0, 2, 1)])
    m = greedy_complete(g, RainbowMatching(), [0], avoid=[1])
    assert m.entries == [(1, 1)]


def test_greedy_color_count():
    g = build_graph(6, [(0, 1, 0), (2, 3, 1), (4, 5, 1)])
    assert len(greedy_complete(g, RainbowMatching(), 2)) == 2
