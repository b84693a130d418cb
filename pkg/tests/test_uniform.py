import pytest

from rainbow_nibble import uniform
from rainbow_nibble.constructions import InstanceSpec, random_instance
from rainbow_nibble.errors import CompletionFailed, ConfigInvalid, DenominatorNonpositive
from rainbow_nibble.graph import RainbowMatching, build_graph, verify_rainbow_matching

DESK = dict(eps=0.5, delta=0.05, eta=0.6, error_scale=0.05)


def test_default_params():
    assert uniform.default_params(10**6, 1).delta == pytest.approx(0.02)
    p = uniform.default_params(100, 1)
    # (1/100)^(1/6) * ln(100)^2, evaluated by hand
    assert p.eps == pytest.approx(9.8437, abs=1e-4) and p.invalid


def test_activation_prob():
    assert uniform.activation_prob(1, 0.2) == 0.2
    assert uniform.activation_prob(3, 0.1) == pytest.approx(0.125)
    with pytest.raises(DenominatorNonpositive):
        uniform.activation_prob(3, 0.5)


def test_deletion_prob():
    p = uniform.default_params(1000, 1, eps=0.25, delta=0.01)
    assert uniform.deletion_prob_a(0, p, 0, 0) == pytest.approx(0.008)
    assert uniform.deletion_prob_a(10, p, 0, 0) == pytest.approx(0.008 / 0.92)
    for t in range(0, 40, 7):
        assert uniform.deletion_prob_a(t, p, 0, 0) == pytest.approx(0.008 / (1 - 0.008 * t))


def test_step_residual():
    assert uniform.step_residual_prob(0, 0.3) == 0.3
    assert uniform.step_residual_prob(0.3, 0.3) == 0
    assert uniform.step_residual_prob(0.5, 0.6) == pytest.approx(0.2)


def disjoint_singletons(k):
    return build_graph(2 * k, [(2 * i, 2 * i + 1, i) for i in range(k)])


def test_single_pass_with_certain_activation():
    g = disjoint_singletons(3)
    p = uniform.default_params(2, 1, eps=0.5, delta=0.99, eta=0.99, error_scale=0.0, retries=1)
    T, sched = uniform._schedule(p)
    state = uniform.UniformState(g.copy(), 0, 1, RainbowMatching())
    uniform.iterate(state, p, sched)
    assert len(state.partial) == 3


def test_conflicting_picks_are_dropped():
    g = build_graph(2 * 1 + 1, [(0, 1, 0), (1, 2, 1)])
    p = uniform.default_params(2, 1, eps=0.5, delta=0.99, eta=0.99, error_scale=0.0, retries=1)
    _, sched = uniform._schedule(p)
    state = uniform.UniformState(g.copy(), 0, 1, RainbowMatching())
    uniform.iterate(state, p, sched)
    assert len(state.partial) == 0


def test_completion_only_path():
    g = disjoint_singletons(3)
    p = uniform.default_params(2, 1, eps=0.5, delta=0.5, eta=0.0)
    rep = uniform.run(g, p)
    assert rep.outcome == "full" and rep.matched_count == 3 and len(rep.trajectory) == 1


def test_retries_zero_flags_every_iteration():
    g = random_instance(InstanceSpec("random-thm1", q=60, eps=0.5, seed=1))
    p = uniform.default_params(60, 1, retries=0, **DESK)
    rep = uniform.run(g, p)
    assert all(r.degraded for r in rep.trajectory[1:])


def test_small_instance_records_degraded():
    g = random_instance(InstanceSpec("random-thm1", q=10, eps=0.5, seed=0))
    p = uniform.default_params(10, 1, retries=1, **dict(DESK, error_scale=0.0))
    try:
        rep = uniform.run(g, p)
    except CompletionFailed as exc:
        rep = exc.report
    assert rep.diagnostics["degraded_iterations"] >= 1


def test_alpha_at_least_one_rejected():
    g = disjoint_singletons(2)
    p = uniform.default_params(400, 1, eps=0.5, delta=0.05, eta=0.6, error_scale=1.0)
    with pytest.raises(ConfigInvalid):
        uniform.run(g, p)


@pytest.mark.parametrize("dmax", [1, 3])
def test_desk_run_uses_every_color(dmax):
    g = random_instance(InstanceSpec("random-thm1", q=400, eps=0.5, delta_max=dmax, seed=7))
    p = uniform.default_params(400, dmax, seed=7, **dict(DESK, error_scale=0.05 / dmax))
    rep = uniform.run(g, p)
    assert rep.outcome == "full" and rep.matched_count == g.num_colors
    assert verify_rainbow_matching(g, rep.matching)[0]
    # accepted boundaries hold every class at exactly the size target
    for r in rep.trajectory[1:]:
        if not r.degraded:
            assert r.empirical_size == r.max_class
