"""Color-activation nibble with vertex equalization, for a matching using every color.

Each iteration activates colors, picks one random edge per active color,
deletes the picked endpoints plus extra random vertices so every vertex
dies with one common probability a_t, keeps the conflict-free picks, and
truncates every surviving class to the scheduled common size.  When the
iterations are done, the leftover colors are finished by an independent
transversal.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

from . import curves
from .constructions import ceil_int
from .errors import (
    CompletionFailed,
    ConfigInvalid,
    DenominatorNonpositive,
    InvariantViolation,
)
from .graph import EdgeColoredGraph, RainbowMatching, snapshot_stats, verify_rainbow_matching
from .report import RunReport
from .rng import derive_seed, substream
from .transversal import complete_rainbow_matching

KIND = "thm1"


@dataclass
class UniformParams:
    q: int
    eps: float
    delta: float
    eta: float
    dmax: int = 1
    retries: int = 20
    seed: int = 0
    error_scale: float = 1.0
    invalid: bool = False
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
        if self.dmax < 1:
            raise ConfigInvalid("dmax must be >= 1")
        if self.retries < 0:
            raise ConfigInvalid("retries must be >= 0")
        if self.error_scale < 0:
            raise ConfigInvalid("error_scale must be >= 0")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["overrides"] = list(self.overrides)
        return d


def default_params(q: int, dmax: int = 1, **overrides) -> UniformParams:
    """Formula defaults from q and Δ; keyword overrides replace any field.

    The formulas only make sense for huge q; ``invalid`` is set when the
    final values leave eps < 1, eta > 0, delta < 1.
    """
    if q < 2 or dmax < 1:
        raise ConfigInvalid("need q >= 2 and dmax >= 1")
    r = (dmax * dmax / q) ** (1 / 6)
    lq = math.log(q)
    p = UniformParams(q=q, eps=r * lq * lq, delta=2 * r * r, eta=1 - r * lq, dmax=dmax)
    for k, v in overrides.items():
        if v is None:
            continue
        if not hasattr(p, k):
            raise ConfigInvalid(f"unknown parameter {k!r}")
        setattr(p, k, v)
    p.overrides = tuple(sorted(k for k, v in overrides.items() if v is not None))
    p.invalid = not (p.eps < 1 and p.eta > 0 and p.delta < 1)
    return p


def activation_prob(t: int, delta: float) -> float:
    """θ_t = δ/(1 - (t-1)δ) for the t-th iteration (1-based)."""
    den = 1 - (t - 1) * delta
    if den <= 0:
        raise DenominatorNonpositive(f"1 - (t-1)delta = {den} for t={t}, delta={delta}")
    return delta / den


def deletion_prob_a(t: int, params, alpha: float, beta: float) -> float:
    """a_t = γδ g(tδ)(1+β)/(s(tδ)(1-α))."""
    if alpha >= 1:
        raise DenominatorNonpositive(f"alpha_t={alpha} >= 1")
    s, g = curves.curve_values(KIND, params.eps, t * params.delta)
    if s <= 0:
        raise DenominatorNonpositive(f"s({t * params.delta}) = {s}")
    return params.gamma * params.delta * g * (1 + beta) / (s * (1 - alpha))


def step_residual_prob(p_prime: float, a: float) -> float:
    """p with p' + (1-p')p = a, clamped into [0, 1]."""
    if p_prime >= 1:
        return 0.0
    p = (a - p_prime) / (1 - p_prime)
    return min(1.0, max(0.0, p))


@dataclass
class UniformState:
    g: EdgeColoredGraph
    t: int
    s_target: int
    partial: RainbowMatching
    trajectory: list = field(default_factory=list)

    def clone(self) -> "UniformState":
        return UniformState(self.g.copy(), self.t, self.s_target, self.partial.copy(), list(self.trajectory))


def _schedule(params):
    T = curves.num_iterations(params)
    sched = curves.error_sequences(KIND, params, T)
    for t in range(T + 1):
        if not sched.alpha[t] < 1:
            raise ConfigInvalid(
                f"error schedule alpha_{t}={sched.alpha[t]:.3g} >= 1; "
                "lower error_scale or change eps/delta/eta"
            )
    return T, sched


def _size_target(params, sched, t: int) -> int:
    return ceil_int((1 - sched.alpha[t]) * curves.ideal_size(KIND, params, t))


def _degree_cap(params, sched, t: int) -> float:
    return (1 + sched.beta[t]) * curves.ideal_degree(KIND, params, t)


def endpoint_probs(g: EdgeColoredGraph, theta: float) -> dict[int, float]:
    """p'_v = 1 - prod_C (1 - d_C(v) theta / |C|) for every alive non-isolated vertex."""
    size = {c: g.class_size(c) for c in g.alive_colors()}
    one = {c: math.log1p(-theta / s) if theta < s else -math.inf for c, s in size.items() if s}
    log1p = math.log1p
    pprime = {}
    for v in range(g.n):
        if not g.vertex_alive[v] or not g.degree(v):
            continue
        acc = sum(
            one[c] if d == 1 else (log1p(-d * theta / size[c]) if d * theta < size[c] else -math.inf)
            for c, d in g.color_degrees(v).items()
        )
        pprime[v] = -math.expm1(acc)
    return pprime


def iterate(state: UniformState, params: UniformParams, sched, attempt: int = 0,
            pprime: dict | None = None) -> tuple[int, curves.TrajectoryRecord]:
    """One pass of the seven steps, in place.  Returns (violations, record).

    ``pprime`` may carry precomputed :func:`endpoint_probs` for this state.
    """
    g = state.g
    t = state.t
    seed = params.seed
    theta = activation_prob(t + 1, params.delta)
    a_t = deletion_prob_a(t, params, sched.alpha[t], sched.beta[t])
    act = substream(seed, "activation", t, attempt)
    draw = substream(seed, "draw", t, attempt)
    kill = substream(seed, "residual", t, attempt)

    # steps 1-2
    picks = []
    for c in g.alive_colors():
        if act.random() < theta:
            edges = g.class_edges(c)
            if edges:
                picks.append(edges[draw.randrange(len(edges))])

    if pprime is None:
        pprime = endpoint_probs(g, theta)

    # step 3
    hits: dict[int, int] = {}
    for e in picks:
        for w in (g.eu[e], g.ev[e]):
            hits[w] = hits.get(w, 0) + 1
    for w in hits:
        if g.vertex_alive[w]:
            g.delete_vertex(w)

    # step 4
    clamps = 0
    for v, pp in pprime.items():
        if not g.vertex_alive[v]:
            continue
        if pp > a_t:
            clamps += 1
        if kill.random() < step_residual_prob(pp, a_t):
            g.delete_vertex(v)

    # steps 5-6
    used = {x for e, _ in state.partial for x in (g.eu[e], g.ev[e])}
    added = 0
    for e in picks:
        u, v = g.eu[e], g.ev[e]
        if hits[u] == 1 and hits[v] == 1:
            c = g.ec[e]
            if u in used or v in used or not g.color_alive[c]:
                raise InvariantViolation(f"picked edge {e} conflicts with the partial matching")
            state.partial.add(e, c)
            used.update((u, v))
            g.delete_color_class(c)
            added += 1

    # step 7
    t1 = t + 1
    target = _size_target(params, sched, t1)
    cap = _degree_cap(params, sched, t1)
    below = 0
    for c in g.alive_colors():
        if g.class_size(c) < target:
            below += 1
        else:
            g.truncate_class(c, target)
    over = sum(1 for v in range(g.n) if g.vertex_alive[v] and g.degree(v) > cap + 1e-9)

    state.t = t1
    state.s_target = target
    st = snapshot_stats(g)
    rec = curves.TrajectoryRecord(
        t=t1,
        empirical_size=st.min_class,
        empirical_degree=st.max_degree,
        matched=len(state.partial),
        s_ideal=curves.ideal_size(KIND, params, t1),
        d_ideal=curves.ideal_degree(KIND, params, t1),
        alpha=sched.alpha[t1],
        beta=sched.beta[t1],
        a_t=a_t,
        theta_t=theta,
        max_class=st.max_class,
        discards=len(picks) - added,
        clamps=clamps,
        violations=below + over,
        alive_edges=st.alive_edges,
    )
    return below + over, rec


def iterate_with_retry(state: UniformState, params: UniformParams, sched) -> UniformState:
    """Retry an iteration on clones until the targets hold.

    The first attempt meeting every target wins.  After ``retries`` failed
    attempts the one with fewest violations is kept and flagged degraded.
    ``retries=0`` runs one attempt and always flags it.
    """
    best = None
    n_attempts = max(params.retries, 1)
    pprime = endpoint_probs(state.g, activation_prob(state.t + 1, params.delta))
    for attempt in range(n_attempts):
        trial = state.clone()
        viol, rec = iterate(trial, params, sched, attempt, pprime)
        rec.attempts = attempt + 1
        if viol == 0 and params.retries > 0:
            trial.trajectory.append(rec)
            return trial
        if best is None or viol < best[0]:
            best = (viol, trial, rec)
    _, trial, rec = best
    rec.degraded = True
    trial.trajectory.append(rec)
    return trial


def _initial_record(g, params, sched, partial) -> curves.TrajectoryRecord:
    st = snapshot_stats(g)
    return curves.TrajectoryRecord(
        t=0,
        empirical_size=st.min_class,
        empirical_degree=st.max_degree,
        matched=len(partial),
        s_ideal=curves.ideal_size(KIND, params, 0),
        d_ideal=curves.ideal_degree(KIND, params, 0),
        alpha=sched.alpha[0],
        beta=sched.beta[0],
        max_class=st.max_class,
        alive_edges=st.alive_edges,
    )


def hypothesis_warnings(g: EdgeColoredGraph, params: UniformParams) -> list[str]:
    st = snapshot_stats(g)
    out = []
    if st.max_degree > params.q:
        out.append(f"max degree {st.max_degree} > q={params.q}")
    if st.max_color_degree > params.dmax:
        out.append(f"color degree {st.max_color_degree} > dmax={params.dmax}")
    need = ceil_int((1 + params.eps) * params.q)
    if st.min_class < need:
        out.append(f"smallest class {st.min_class} < (1+eps)q={need}")
    return out


def run(g: EdgeColoredGraph, params: UniformParams) -> RunReport:
    """Nibble then complete; ``g`` itself is left untouched."""
    start = time.perf_counter()
    params.validate()
    T, sched = _schedule(params)
    work = g.copy()
    warnings = hypothesis_warnings(work, params)
    target_colors = [c for c in range(g.num_colors) if g.color_alive[c] and g.class_size(c)]

    s0 = _size_target(params, sched, 0)
    for c in work.alive_colors():
        work.truncate_class(c, s0)
    partial = RainbowMatching()
    state = UniformState(work, 0, s0, partial, [_initial_record(work, params, sched, partial)])
    for _ in range(T):
        state = iterate_with_retry(state, params, sched)

    traj = state.trajectory
    diag = {
        "iterations": T,
        "clamps": sum(r.clamps for r in traj),
        "discards": sum(r.discards for r in traj),
        "attempts": sum(r.attempts for r in traj[1:]),
        "degraded_iterations": sum(1 for r in traj if r.degraded),
        "violations": sum(r.violations for r in traj),
        "nibble_matched": len(state.partial),
        "hypothesis_warnings": warnings,
    }
    report = RunReport(
        algorithm=KIND,
        outcome="failure",
        matching=state.partial,
        target=len(target_colors),
        seed=params.seed,
        config=params.as_dict(),
        trajectory=traj,
        diagnostics=diag,
    )

    left = [c for c in state.g.alive_colors() if c in set(target_colors)]
    try:
        extra = complete_rainbow_matching(state.g, left, seed=derive_seed(params.seed, "completion"), diagnostics=diag)
    except CompletionFailed as exc:
        report.outcome = "partial"
        report.error = str(exc)
        report.wall_time = time.perf_counter() - start
        _check(g, report.matching)
        exc.partial = report.matching
        exc.report = report
        raise
    matching = RainbowMatching(state.partial.entries + extra.entries)
    _check(g, matching)
    report.matching = matching
    report.outcome = "full" if len(matching) == len(target_colors) else "partial"
    report.wall_time = time.perf_counter() - start
    return report


def _check(g: EdgeColoredGraph, m: RainbowMatching) -> None:
    ok, viol = verify_rainbow_matching(g, m)
    if not ok:
        raise InvariantViolation(f"solver produced an invalid matching: {viol[:5]}")
