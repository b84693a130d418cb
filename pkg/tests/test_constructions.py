import pytest

from rainbow_nibble.constructions import (
    InstanceSpec,
    build_instance,
    ceil_int,
    cyclic_latin_coloring,
    k2qm1_tight,
    prop2_counterexample,
    random_instance,
    round_robin,
    star_forest,
)
from rainbow_nibble.errors import ConfigInvalid, OddT
from rainbow_nibble.graph import snapshot_stats
from rainbow_nibble.oracle import max_rainbow_matching


def test_ceil_int_ignores_float_dust():
    assert ceil_int(3.0000000000001) == 3
    assert ceil_int(3.2) == 4


def test_cyclic_latin_small():
    g = cyclic_latin_coloring(1)
    assert g.num_edges == 1 and g.num_colors == 1
    assert max_rainbow_matching(cyclic_latin_coloring(2)).max_size == 1
    assert max_rainbow_matching(cyclic_latin_coloring(3)).max_size == 3


@pytest.mark.parametrize("t, best", [(2, 1), (4, 3)])
def test_prop2_shape_and_value(t, best):
    g = prop2_counterexample(t)
    st = snapshot_stats(g)
    assert st.alive_colors == t + 1 and st.min_class == st.max_class == t and st.proper
    assert max_rainbow_matching(g).max_size == best


def test_prop2_odd():
    with pytest.raises(OddT):
        prop2_counterexample(3)


def test_star_forest():
    assert star_forest(2, 1).num_edges == 1
    st = snapshot_stats(star_forest(3, 5))
    assert st.min_class == st.max_class == 2
    g = star_forest(4, 3)
    plain = type(g)(g.n)
    for e in g.alive_edges():
        plain.add_edge(g.eu[e], g.ev[e], e)
    assert max_rainbow_matching(plain).max_size == 3


def test_round_robin_is_a_near_factorization():
    for m in (3, 5, 7, 9):
        rounds = round_robin(m)
        seen = set()
        for r in rounds:
            verts = [x for uv in r for x in uv]
            assert len(set(verts)) == m - 1
            seen.update(tuple(sorted(uv)) for uv in r)
        assert len(seen) == m * (m - 1) // 2


def test_k2qm1_tight():
    g = k2qm1_tight(2)
    assert g.n == 3 and g.num_colors == 1 and g.num_edges == 2
    g = k2qm1_tight(4)
    st = snapshot_stats(g)
    assert g.n == 7 and st.alive_colors == 5 and st.min_class == st.max_class == 4
    assert max_rainbow_matching(g).max_size <= 3
    assert snapshot_stats(k2qm1_tight(3)).max_degree <= 4


def test_random_thm3_degrees():
    g = random_instance(InstanceSpec("random-thm3", q=50, eps=0.5, seed=1))
    st = snapshot_stats(g, side=sorted(g.side_a))
    assert st.min_side_degree >= 75 and st.proper


def test_random_thm1_proper():
    g = random_instance(InstanceSpec("random-thm1", q=60, eps=0.5, seed=2))
    st = snapshot_stats(g)
    assert st.proper and st.max_degree <= 60 and st.min_class >= 90


def test_random_thm1_color_degree():
    g = random_instance(InstanceSpec("random-thm1", q=60, eps=0.5, delta_max=3, seed=2))
    assert snapshot_stats(g).max_color_degree <= 3


def test_random_thmq_counts():
    g = random_instance(InstanceSpec("random-thmq", q=40, eps=0.25, seed=0))
    st = snapshot_stats(g)
    assert st.alive_colors == 100 and st.min_class >= 40 and st.proper


def test_random_is_deterministic():
    spec = InstanceSpec("random-thmq", q=20, eps=0.25, seed=5)
    a, b = random_instance(spec), random_instance(spec)
    assert (a.eu, a.ev, a.ec) == (b.eu, b.ev, b.ec)


def test_spec_validation():
    with pytest.raises(ConfigInvalid):
        build_instance(InstanceSpec("random-thm3", q=10))
    with pytest.raises(ConfigInvalid):
        build_instance(InstanceSpec("no-such-kind"))
