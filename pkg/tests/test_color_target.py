import math

import pytest

from rainbow_nibble import color_target as ct
from rainbow_nibble import curves
from rainbow_nibble.constructions import InstanceSpec, prop2_counterexample, random_instance
from rainbow_nibble.errors import AugmentStuck, ConfigInvalid, ReductionFailed, TargetMissed
from rainbow_nibble.graph import RainbowMatching, build_graph, verify_rainbow_matching
from rainbow_nibble.oracle import max_rainbow_matching

DESK = dict(delta=0.005, error_scale=1e-3)


def valid(g, m, size):
    ok, _ = verify_rainbow_matching(g, m)
    return ok and len(m) == size


def test_params_and_probs():
    p = ct.default_params(1000, 0.1, delta=0.01, eta=0.1)
    a, b = ct.deletion_probs(0, p, 0, 0)
    assert a == pytest.approx(2.2 * 0.01) and b == pytest.approx(2.1 * 0.01)
    assert b / a == pytest.approx(p.gamma)
    assert ct.default_params(1000, 0.1).delta == pytest.approx(1 / math.log(1000))
    assert ct.eta_upper(0.1) == pytest.approx(1 / curves.slope("thmq", 0.1))


def test_eta_bounds_checked():
    with pytest.raises(ConfigInvalid):
        ct.default_params(100, 0.1, eta=ct.eta_upper(0.1) + 0.01).validate()


def test_weaker_q1_and_empty():
    g = build_graph(2, [(0, 1, 0)])
    assert valid(g, ct.weaker_bound_solver(g, 0), 0)
    m = ct.weaker_bound_solver(build_graph(10, [(2 * i, 2 * i + 1, i) for i in range(5)]), 1)
    assert len(m) == 1


def eight_colors():
    pairs = [(u, v) for u in range(7) for v in range(u + 1, 7)]
    edges, used = [], set()
    for c in range(8):
        got = []
        for u, v in pairs:
            if (u, v) in used or any(x in (u, v) for e in got for x in e):
                continue
            got.append((u, v))
            if len(got) == 2:
                break
        for u, v in got:
            used.add((u, v))
            edges.append((u, v, c))
    return build_graph(7, edges, 8)


def test_weaker_q2_augment_branch():
    g = eight_colors()
    diag = {}
    m = ct.weaker_bound_solver(g, 2, diagnostics=diag)
    assert diag["weaker_branch"] == "augment" and valid(g, m, 2)
    assert max_rainbow_matching(g).max_size >= 2


def test_exchange_step():
    # a-b in the matching blocks both free colors; swapping it out frees both
    g = build_graph(4, [(0, 1, 0), (2, 0, 1), (1, 3, 2)])
    m = ct.augment_matching(g, 2, start=RainbowMatching([(0, 0)]))
    assert sorted(m.entries) == [(1, 1), (2, 2)]


def test_augment_stuck():
    g = build_graph(3, [(0, 1, 0), (1, 2, 1)])
    with pytest.raises(AugmentStuck):
        ct.augment_matching(g, 2)


def test_too_few_colors():
    g = build_graph(4, [(0, 1, 0), (2, 3, 1)])
    with pytest.raises(AugmentStuck):
        ct.weaker_bound_solver(g, 2)


def case1_instance(q=9, hubs=6, ncol=40, pad=3):
    """Hubs of degree ncol, one edge per color each, plus pad disjoint edges per color."""
    edges, nxt = [], hubs
    for c in range(ncol):
        for h in range(hubs):
            edges.append((h, nxt, c))
            nxt += 1
        for _ in range(pad):
            edges.append((nxt, nxt + 1, c))
            nxt += 2
    return build_graph(nxt, edges, ncol)


def test_weaker_case1():
    g = case1_instance()
    diag = {}
    m = ct.weaker_bound_solver(g, 9, diagnostics=diag)
    assert diag["weaker_branch"] == "case1" and valid(g, m, 9)


def test_weaker_case2():
    g = random_instance(InstanceSpec("random-thmq", q=60, eps=1.0, seed=0))
    diag = {}
    m = ct.weaker_bound_solver(g, 60, diagnostics=diag)
    assert diag["weaker_branch"] == "case2" and valid(g, m, 60)


def heavy_instance(nh=18, ncol=52, nb=60, extra=4):
    """nh hubs adjacent in every color, plus a few light edges per color."""
    edges, pairs = [], set()
    at = [set() for _ in range(nh + nb)]

    def add(u, v, c):
        edges.append((u, v, c))
        pairs.add((min(u, v), max(u, v)))
        at[u].add(c)
        at[v].add(c)

    for c in range(ncol):
        for h in range(nh):
            add(h, nh + (h + c) % nb, c)
    for c in range(ncol):
        k = 0
        free = [v for v in range(nh, nh + nb) if c not in at[v]]
        for i in range(len(free)):
            for j in range(i + 1, len(free)):
                u, v = free[i], free[j]
                if k < extra and (u, v) not in pairs and c not in at[u] and c not in at[v]:
                    add(u, v, c)
                    k += 1
    return build_graph(nh + nb, edges, ncol)


def test_preprocess_pass_through():
    g = random_instance(InstanceSpec("random-thmq", q=40, eps=0.25, seed=0))
    pre = ct.preprocess(g, 40, 0.25)
    assert pre.heavy == frozenset() and pre.direct is None


@pytest.mark.parametrize("seed", range(3))
def test_preprocess_reduction(seed):
    g = heavy_instance()
    assert len(ct.heavy_vertices(g, 20, 0.3)) > (1 - 0.15) * 20
    rep = ct.run(g, ct.default_params(20, 0.3, seed=seed))
    assert rep.diagnostics["path"] == "direct-reduction"
    assert rep.outcome == "full" and valid(g, rep.matching, 20)


def test_reduction_failure_below_minimum():
    g = heavy_instance(nh=3, ncol=6, nb=8, extra=1)
    with pytest.raises(ReductionFailed):
        ct.preprocess(g, 2, 0.5)


def test_conflict_free_batches():
    q, eps = 50, 0.3
    k = math.ceil(2 * (1 + eps) * q)
    g = build_graph(2 * k, [(2 * i, 2 * i + 1, i) for i in range(k)])
    p = ct.default_params(q, eps, delta=0.02, eta=0.2, error_scale=0.0)
    with pytest.raises(TargetMissed) as info:
        ct.run(g, p)
    traj = info.value.report.trajectory
    m = ct.batch_size(p)
    for prev, cur in zip(traj, traj[1:]):
        # repeats of one edge are the only possible clashes
        assert cur.matched - prev.matched + cur.discards == m


def test_random_desk_run_keeps_a_fraction():
    g = random_instance(InstanceSpec("random-thmq", q=500, eps=0.3, seed=3))
    rep = ct.run(g, ct.default_params(500, 0.3, seed=3, **DESK))
    d = rep.diagnostics
    assert d["heavy"] == 0 and d["a_fraction_ok"] and d["max_a_fraction"] <= d["a_fraction_limit"]
    assert rep.outcome == "full" and valid(g, rep.matching, 500)


def test_prop2_misses_target():
    g = prop2_counterexample(4)
    with pytest.raises(TargetMissed) as info:
        ct.run(g, ct.default_params(4, 0.3))
    rep = info.value.report
    assert rep.diagnostics["hypothesis_warnings"]
    assert verify_rainbow_matching(g, info.value.partial)[0]
