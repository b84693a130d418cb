import math

import pytest

from rainbow_nibble import saturating
from rainbow_nibble.constructions import InstanceSpec, cyclic_latin_coloring, random_instance
from rainbow_nibble.errors import ConfigInvalid
from rainbow_nibble.graph import RainbowMatching, build_graph, verify_rainbow_matching

DESK = dict(error_scale=4.1e-4, error_growth=1.2)


def test_error_alpha():
    assert saturating.error_alpha(0, 0.04, 0.8, 0.5) == 0
    # (1 + 10*0.04/(1-gamma*eta)^2) = 1.1 needs (1-gamma*eta)^2 = 4
    assert saturating.error_alpha(2, 0.04, 1.0, -1.0) == pytest.approx(0.042)


def test_deletion_prob_start():
    p = saturating.default_params(100, 0.25, delta=0.01)
    assert saturating.deletion_prob(0, p, 0) == pytest.approx(0.008)


def test_hit_prob():
    assert saturating.hit_prob(0, 10, 3) == 0
    assert saturating.hit_prob(10, 10, 1) == 1
    assert saturating.hit_prob(1, 4, 2) == pytest.approx(1 - 0.75**2)


def state_for(g, p):
    _, sched = saturating._schedule(p)
    return saturating.SaturatingState(g, sorted(g.side_a), 0, 1, RainbowMatching()), sched


def test_single_draw_on_single_edge():
    g = build_graph(2, [(0, 1, 0)], side_a=[0])
    p = saturating.default_params(2, 0.5, delta=0.5, eta=0.6, error_scale=0.0)
    st, sched = state_for(g, p)
    saturating.iterate(st, p, sched)
    assert st.partial.entries == [(0, 0)] and not st.g.vertex_alive[0]


def test_repeat_draw_is_discarded():
    g = build_graph(2, [(0, 1, 0)], side_a=[0])
    p = saturating.default_params(4, 0.5, delta=0.5, eta=0.6, error_scale=0.0)
    st, sched = state_for(g, p)
    rec = saturating.iterate(st, p, sched)
    assert len(st.partial) == 1 and rec.discards == 1


def test_one_a_vertex():
    g = build_graph(4, [(0, 1, 0), (0, 2, 1), (0, 3, 2)], side_a=[0])
    rep = saturating.run(g, saturating.default_params(2, 0.5, delta=0.5, eta=0.6, error_scale=0.0))
    assert rep.outcome == "full" and rep.matched_count == 1


def test_requires_bipartite_split():
    g = build_graph(3, [(0, 1, 0), (1, 2, 1)], side_a=[0, 1])
    with pytest.raises(ConfigInvalid):
        saturating.run(g, saturating.default_params(2, 0.5))


def test_desk_run_holds_degree_targets():
    g = random_instance(InstanceSpec("random-thm3", q=500, eps=0.3, seed=11))
    rep = saturating.run(g, saturating.default_params(500, 0.3, seed=11, **DESK))
    assert verify_rainbow_matching(g, rep.matching)[0]
    for r in rep.trajectory[1:]:
        if not r.degraded:
            assert r.empirical_size == math.ceil((1 - r.alpha) * r.s_ideal - 1e-9)


def latin_slab(q, eps):
    """Rows 0..q-1 of a cyclic Latin square of order (1+eps)q as a bipartite graph."""
    n = math.ceil((1 + eps) * q)
    full = cyclic_latin_coloring(n)
    edges = [(full.eu[e], full.ev[e], full.ec[e]) for e in full.alive_edges() if full.eu[e] < q]
    return build_graph(2 * n, edges, n, side_a=range(q))


def test_latin_slab_saturates():
    g = latin_slab(300, 0.4)
    rep = saturating.run(g, saturating.default_params(300, 0.4, **DESK))
    assert rep.outcome == "full" and rep.matched_count == 300
    assert verify_rainbow_matching(g, rep.matching)[0]
