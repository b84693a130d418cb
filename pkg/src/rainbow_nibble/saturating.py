"""Sample-with-replacement nibble that saturates side A of a bipartite graph.

Each iteration draws a batch of random edges, keeps those that clash with
no earlier draw, removes the matched A-vertices together with every
B-endpoint and every color touched by the batch, then tops up random
B-vertex and color deletions so each dies with a common probability a_t.
A-degrees are truncated to the scheduled common value.  A plain greedy
pass finishes the remaining A-vertices.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

from . import curves
from .constructions import ceil_int
from .errors import ADeadUnmatched, ConfigInvalid, DenominatorNonpositive, GreedyStuck, InvariantViolation
from .graph import EdgeColoredGraph, RainbowMatching, verify_rainbow_matching
from .report import RunReport
from .rng import substream
from .transversal import greedy_complete
from .uniform import step_residual_prob

KIND = "thm3"


@dataclass
class SaturatingParams:
    q: int
    eps: float
    delta: float
    eta: float
    seed: int = 0
    error_scale: float = 1.0
    error_growth: float = 10.0
    overrides: tuple = ()

    @property
    def gamma(self) -> float:
        return 1 / (1 + self.eps)

    def validate(self) -> None:
        if not 0 < self.delta < 1:
            raise ConfigInvalid(f"delta={self.delta} outside (0, 1)")
        if not 0 <= self.eta < 1:
            raise ConfigInvalid(f"eta={self.eta} outside [0, 1)")
        if self.eps <= 0:
            raise ConfigInvalid(f"eps={self.eps} must be positive")
        if self.error_scale < 0:
            raise ConfigInvalid("error_scale must be >= 0")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["overrides"] = list(self.overrides)
        return d


def default_params(q: int, eps: float, **overrides) -> SaturatingParams:
    """eta = 1 - eps^3, delta = 1/log q, with keyword overrides."""
    if q < 2:
        raise ConfigInvalid("need q >= 2")
    p = SaturatingParams(q=q, eps=eps, delta=1 / math.log(q), eta=1 - eps**3)
    for k, v in overrides.items():
        if v is None:
            continue
        if not hasattr(p, k):
            raise ConfigInvalid(f"unknown parameter {k!r}")
        setattr(p, k, v)
    p.overrides = tuple(sorted(k for k, v in overrides.items() if v is not None))
    return p


def error_alpha(t: int, delta: float, gamma: float, eta: float) -> float:
    """α_t = √δ((1 + 10δ/(1-γη)²)^t - 1)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return curves.thm3_alpha(t, delta, gamma, eta)


def deletion_prob(t: int, params, alpha: float) -> float:
    """a_t = γδ g(tδ)(1+α)/(s(tδ)(1-α))."""
    if alpha >= 1:
        raise DenominatorNonpositive(f"alpha_t={alpha} >= 1")
    s, g = curves.curve_values(KIND, params.eps, t * params.delta)
    if s <= 0:
        raise DenominatorNonpositive(f"s({t * params.delta}) = {s}")
    return params.gamma * params.delta * g * (1 + alpha) / (s * (1 - alpha))


def batch_size(params) -> int:
    return ceil_int(params.delta * params.q)


def hit_prob(count: int, total: int, m: int) -> float:
    """1 - (1 - count/total)^m, the chance that m draws touch ``count`` of ``total`` edges."""
    if total <= 0 or count <= 0:
        return 0.0
    x = count / total
    if x >= 1:
        return 1.0
    return -math.expm1(m * math.log1p(-x))


@dataclass
class SaturatingState:
    g: EdgeColoredGraph
    side_a: list[int]
    t: int
    s_target: int
    partial: RainbowMatching
    trajectory: list = field(default_factory=list)


def _schedule(params) -> tuple[int, curves.ErrorSchedule]:
    T = curves.num_iterations(params)
    sched = curves.error_sequences(KIND, params, T)
    for t in range(T + 1):
        if not sched.alpha[t] < 1:
            raise ConfigInvalid(
                f"error schedule alpha_{t}={sched.alpha[t]:.3g} >= 1; "
                "lower error_scale or change eps/delta/eta"
            )
    return T, sched


def _a_degree_target(params, sched, t: int) -> int:
    return ceil_int((1 - sched.alpha[t]) * curves.ideal_size(KIND, params, t))


def _cap(params, sched, t: int) -> float:
    return (1 + sched.alpha[t]) * curves.ideal_degree(KIND, params, t)


def iterate(state: SaturatingState, params: SaturatingParams, sched) -> curves.TrajectoryRecord:
    """Steps 1-7 in place; returns the trajectory record of the new boundary."""
    g = state.g
    t = state.t
    m = batch_size(params)
    a_t = deletion_prob(t, params, sched.alpha[t])
    draw = substream(params.seed, "draw", t)
    kill_v = substream(params.seed, "residual-vertex", t)
    kill_c = substream(params.seed, "residual-color", t)
    a_set = g.side_a

    pool = g.alive_edges()
    total = len(pool)
    if total == 0:
        batch = []
    else:
        batch = [pool[draw.randrange(total)] for _ in range(m)]
    b_probs = {v: hit_prob(g.degree(v), total, m)
               for v in range(g.n) if v not in a_set and g.vertex_alive[v] and g.degree(v)}
    c_probs = {c: hit_prob(g.class_size(c), total, m) for c in g.alive_colors()}

    # step 2: keep draws that clash with no earlier draw
    seen_v: set[int] = set()
    seen_c: set[int] = set()
    added = []
    for e in batch:
        u, v, c = g.eu[e], g.ev[e], g.ec[e]
        if u not in seen_v and v not in seen_v and c not in seen_c:
            added.append(e)
        seen_v.update((u, v))
        seen_c.add(c)
    for e in added:
        state.partial.add(e, g.ec[e])

    # step 3
    for e in added:
        a = g.eu[e] if g.eu[e] in a_set else g.ev[e]
        if g.vertex_alive[a]:
            g.delete_vertex(a)
    for e in batch:
        b = g.ev[e] if g.eu[e] in a_set else g.eu[e]
        if g.vertex_alive[b]:
            g.delete_vertex(b)

    # step 4
    clamps = 0
    for v, pp in b_probs.items():
        if not g.vertex_alive[v]:
            continue
        if pp > a_t:
            clamps += 1
        if kill_v.random() < step_residual_prob(pp, a_t):
            g.delete_vertex(v)

    # step 5
    for e in batch:
        c = g.ec[e]
        if g.color_alive[c]:
            g.delete_color_class(c)

    # step 6
    for c, pc in c_probs.items():
        if not g.color_alive[c]:
            continue
        if pc > a_t:
            clamps += 1
        if kill_c.random() < step_residual_prob(pc, a_t):
            g.delete_color_class(c)

    matched_a = {g.eu[e] if g.eu[e] in a_set else g.ev[e] for e, _ in state.partial}
    for a in state.side_a:
        if not g.vertex_alive[a] and a not in matched_a:
            raise ADeadUnmatched(f"A-vertex {a} deleted without a matching edge")

    # step 7
    t1 = t + 1
    target = _a_degree_target(params, sched, t1)
    cap = _cap(params, sched, t1)
    alive_a = [a for a in state.side_a if g.vertex_alive[a]]
    below = 0
    for a in alive_a:
        if g.degree(a) < target:
            below += 1
        else:
            g.truncate_vertex(a, target)
    a_degs = [g.degree(a) for a in alive_a]
    b_max = max((g.degree(v) for v in range(g.n) if v not in a_set and g.vertex_alive[v]), default=0)
    c_max = max((g.class_size(c) for c in g.alive_colors()), default=0)
    over = int(b_max > cap + 1e-9) + int(c_max > cap + 1e-9)

    state.t = t1
    state.s_target = target
    return curves.TrajectoryRecord(
        t=t1,
        empirical_size=min(a_degs, default=0),
        empirical_degree=b_max,
        matched=len(state.partial),
        s_ideal=curves.ideal_size(KIND, params, t1),
        d_ideal=curves.ideal_degree(KIND, params, t1),
        alpha=sched.alpha[t1],
        beta=sched.alpha[t1],
        a_t=a_t,
        max_class=c_max,
        discards=len(batch) - len(added),
        clamps=clamps,
        degraded=below > 0,
        violations=below + over,
        alive_edges=len(g.alive_edges()),
    )


def discard_bound(params, t: int) -> float:
    """Soft per-iteration bound 3δ²q/(1-tδ) on clashing draws."""
    d = params.delta
    return 3 * d * d * params.q / (1 - t * d)


def run(g: EdgeColoredGraph, params: SaturatingParams) -> RunReport:
    """Saturate side A of ``g`` (taken from ``g.side_a``); ``g`` is left untouched."""
    start = time.perf_counter()
    params.validate()
    if not g.side_a:
        raise ConfigInvalid("graph has no side A")
    side_a = sorted(g.side_a)
    for e in g.alive_edges():
        if (g.eu[e] in g.side_a) == (g.ev[e] in g.side_a):
            raise ConfigInvalid(f"edge {e} does not cross the A|B split")
    T, sched = _schedule(params)
    work = g.copy()
    warnings = []
    if params.eps >= 0.1:
        warnings.append(f"eps={params.eps} outside the proven range eps < 1/10")
    s0 = _a_degree_target(params, sched, 0)
    for a in side_a:
        if work.degree(a) < s0:
            warnings.append(f"A-vertex {a} has degree {work.degree(a)} < {s0}")
        work.truncate_vertex(a, s0, highest_first=True)

    state = SaturatingState(work, side_a, 0, s0, RainbowMatching())
    a_degs = [work.degree(a) for a in side_a]
    state.trajectory.append(curves.TrajectoryRecord(
        t=0, empirical_size=min(a_degs, default=0),
        empirical_degree=max((work.degree(v) for v in range(work.n) if v not in work.side_a), default=0),
        matched=0, s_ideal=curves.ideal_size(KIND, params, 0), d_ideal=curves.ideal_degree(KIND, params, 0),
        alpha=sched.alpha[0], beta=sched.alpha[0],
        max_class=max((work.class_size(c) for c in work.alive_colors()), default=0),
        alive_edges=len(work.alive_edges()),
    ))
    for _ in range(T):
        state.trajectory.append(iterate(state, params, sched))

    traj = state.trajectory
    discards = sum(r.discards for r in traj)
    over_soft = sum(1 for r in traj[1:] if r.discards > 2 * discard_bound(params, r.t - 1))
    diag = {
        "iterations": T,
        "batch_size": batch_size(params),
        "clamps": sum(r.clamps for r in traj),
        "discards": discards,
        "discard_bound_total": 3 * params.delta * params.q * math.log(1 / (1 - params.eta)),
        "discard_soft_flags": over_soft,
        "degraded_iterations": sum(1 for r in traj if r.degraded),
        "violations": sum(r.violations for r in traj),
        "nibble_matched": len(state.partial),
        "hypothesis_warnings": warnings,
    }
    report = RunReport(
        algorithm=KIND, outcome="failure", matching=state.partial, target=len(side_a),
        seed=params.seed, config=params.as_dict(), trajectory=traj, diagnostics=diag,
    )
    left = [a for a in side_a if state.g.vertex_alive[a]]
    diag["greedy_targets"] = len(left)
    try:
        final = greedy_complete(state.g, state.partial, left, order="degree")
    except GreedyStuck as exc:
        _check(g, exc.partial)
        report.matching = exc.partial
        report.outcome = "partial"
        report.error = str(exc)
        report.wall_time = time.perf_counter() - start
        exc.report = report
        raise
    _check(g, final)
    report.matching = final
    report.outcome = "full" if len(final) == len(side_a) else "partial"
    report.wall_time = time.perf_counter() - start
    return report


def _check(g: EdgeColoredGraph, m: RainbowMatching) -> None:
    ok, viol = verify_rainbow_matching(g, m)
    if not ok:
        raise InvariantViolation(f"solver produced an invalid matching: {viol[:5]}")
