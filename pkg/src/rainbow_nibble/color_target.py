"""Color-target nibble: a rainbow matching of size q from 2(1+eps)q colors.

Pipeline: heavy-vertex preprocessing (which may solve the instance
outright through a reduction to the saturating nibble plus a weaker-bound
solver), then a sample-with-replacement nibble in which heavy vertices
(set A) and the rest die with different common probabilities a_t and b_t.
Class truncation removes A-incident edges first so the share of A
among each class's vertices stays bounded.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

from . import curves, saturating, uniform
from .constructions import ceil_int
from .errors import (
    AugmentStuck,
    ConfigInvalid,
    DenominatorNonpositive,
    GreedyStuck,
    InvariantViolation,
    RainbowError,
    ReductionFailed,
    TargetMissed,
)
from .graph import EdgeColoredGraph, RainbowMatching, build_graph, snapshot_stats, verify_rainbow_matching
from .report import RunReport
from .rng import derive_seed, substream
from .saturating import hit_prob
from .transversal import greedy_complete
from .uniform import step_residual_prob

KIND = "thmq"

# Desk-scale settings for the sub-solvers; the formula defaults of both
# engines only become valid for astronomically large q.
CASE2_DEFAULTS = {"delta": 0.05, "eta": 0.6, "error_scale": 0.0125, "retries": 20}
REDUCTION_DEFAULTS = {"error_scale": 4.1e-4, "error_growth": 1.2, "eta": 0.3}


@dataclass
class ColorTargetParams:
    q: int
    eps: float
    delta: float
    eta: float
    seed: int = 0
    error_scale: float = 1.0
    retries: int = 1
    case2_overrides: dict = field(default_factory=lambda: dict(CASE2_DEFAULTS))
    reduction_overrides: dict = field(default_factory=lambda: dict(REDUCTION_DEFAULTS))
    overrides: tuple = ()

    @property
    def theta(self) -> float:
        return self.eps / 2

    @property
    def gamma(self) -> float:
        return curves.gamma_of(KIND, self.eps)

    @property
    def m(self) -> float:
        return curves.exponent_m(self.eps)

    @property
    def num_colors(self) -> int:
        return ceil_int(2 * (1 + self.eps) * self.q)

    def validate(self) -> None:
        if self.q < 1:
            raise ConfigInvalid("need q >= 1")
        if not 0 < self.eps < 1:
            raise ConfigInvalid(f"eps={self.eps} outside (0, 1)")
        if not 0 < self.delta < 1:
            raise ConfigInvalid(f"delta={self.delta} outside (0, 1)")
        if not 0 <= self.eta < eta_upper(self.eps):
            raise ConfigInvalid(f"eta={self.eta} outside [0, {eta_upper(self.eps):.6g})")
        if self.retries < 0:
            raise ConfigInvalid("retries must be >= 0")
        if self.error_scale < 0:
            raise ConfigInvalid("error_scale must be >= 0")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["overrides"] = list(self.overrides)
        return d


def eta_lower(eps: float) -> float:
    return 1 / (2 * (1 + eps))


def eta_upper(eps: float) -> float:
    """Point where the curves' base reaches zero."""
    return 1 / curves.slope(KIND, eps)


def default_eta(eps: float) -> float:
    theta = eps / 2
    gam = curves.gamma_of(KIND, eps)
    return eta_lower(eps) * (1 - theta / 2 + theta * gam / 2) / (1 - theta + theta * gam)


def default_params(q: int, eps: float, **overrides) -> ColorTargetParams:
    """theta = eps/2, eta between its two bounds, delta = 1/log q."""
    if q < 2:
        raise ConfigInvalid("need q >= 2")
    p = ColorTargetParams(q=q, eps=eps, delta=1 / math.log(q), eta=default_eta(eps))
    for k, v in overrides.items():
        if v is None:
            continue
        if not hasattr(p, k):
            raise ConfigInvalid(f"unknown parameter {k!r}")
        setattr(p, k, v)
    p.overrides = tuple(sorted(k for k, v in overrides.items() if v is not None))
    return p


def deletion_probs(t: int, params, alpha: float, beta: float) -> tuple[float, float]:
    """(a_t, b_t): common death probabilities for A-vertices and the rest."""
    if alpha >= 1:
        raise DenominatorNonpositive(f"alpha_t={alpha} >= 1")
    s, g = curves.curve_values(KIND, params.eps, t * params.delta)
    if s <= 0:
        raise DenominatorNonpositive(f"s({t * params.delta}) = {s}")
    common = params.delta * g * (1 + beta) / (s * (1 - alpha))
    return 2 * (1 + params.eps) * common, 2 * (1 + params.eps / 2) * common


def batch_size(params) -> int:
    return ceil_int(2 * params.delta * (1 + params.eps) * params.q)


def discard_bound(params) -> float:
    """Total clash bound 8δq log(1/(1 - slope*eta))."""
    base = 1 - curves.slope(KIND, params.eps) * params.eta
    if base <= 0:
        return math.inf
    return 8 * params.delta * params.q * math.log(1 / base)


# ----------------------------------------------------------------------
# weaker-bound solver


def _used_vertices(g: EdgeColoredGraph, m: RainbowMatching) -> set[int]:
    return {x for e, _ in m for x in (g.eu[e], g.ev[e])}


def _exchange(g: EdgeColoredGraph, m: RainbowMatching, used_v: set[int], used_c: set[int]):
    """Swap one matching edge for two disjoint, distinctly colored edges at its ends."""
    for i, (e, c) in enumerate(m.entries):
        x, y = g.eu[e], g.ev[e]
        at_x = [f for f in sorted(g.incident_edges(x))
                if g.ec[f] not in used_c and g.other(f, x) not in used_v]
        at_y = [f for f in sorted(g.incident_edges(y))
                if g.ec[f] not in used_c and g.other(f, y) not in used_v]
        for f1 in at_x:
            for f2 in at_y:
                if g.ec[f1] != g.ec[f2] and g.other(f1, x) != g.other(f2, y):
                    return i, f1, f2
    return None


def augment_matching(g: EdgeColoredGraph, q: int, start: RainbowMatching | None = None) -> RainbowMatching:
    """Grow a rainbow matching to size q by free additions and single-edge exchanges."""
    m = start.copy() if start is not None else RainbowMatching()
    while len(m) < q:
        used_v = _used_vertices(g, m)
        used_c = set(m.colors())
        free = None
        for c in g.alive_colors():
            if c in used_c:
                continue
            for e in sorted(g.class_edges(c)):
                if g.eu[e] not in used_v and g.ev[e] not in used_v:
                    free = e
                    break
            if free is not None:
                break
        if free is not None:
            m.add(free, g.ec[free])
            continue
        swap = _exchange(g, m, used_v, used_c)
        if swap is None:
            raise AugmentStuck(f"no augmentation from size {len(m)} toward {q}", partial=m)
        i, f1, f2 = swap
        entries = m.entries[:i] + m.entries[i + 1:] + [(f1, g.ec[f1]), (f2, g.ec[f2])]
        m = RainbowMatching(entries)
    return m


def _eligible_colors(g: EdgeColoredGraph, q: int) -> list[int]:
    return [c for c in g.alive_colors() if g.class_size(c) >= q]


def _degree_order(g: EdgeColoredGraph) -> list[int]:
    return sorted(g.alive_vertices(), key=lambda v: (-g.degree(v), v))


def weaker_bound_solver(g: EdgeColoredGraph, q: int, seed: int = 0,
                        case2_overrides: dict | None = None, diagnostics: dict | None = None) -> RainbowMatching:
    """Rainbow matching of size q when there are at least 4q colors of size >= q."""
    diag = diagnostics if diagnostics is not None else {}
    if q <= 0:
        diag["weaker_branch"] = "empty"
        return RainbowMatching()
    ncol = len(_eligible_colors(g, q))
    diag["weaker_colors"] = ncol
    if ncol >= 2 * q * q:
        diag["weaker_branch"] = "augment"
        return augment_matching(g, q)
    if ncol < 4 * q:
        raise AugmentStuck(f"{ncol} colors with >= {q} edges; need at least {4 * q}")

    order = _degree_order(g)
    degs = [g.degree(v) for v in order]
    k = next((i for i in range(1, len(degs) + 1) if degs[i - 1] <= 3 * (q - i)), None)
    root = math.isqrt(q)
    diag["weaker_k"] = k
    if k is None or k > q - root:
        diag["weaker_branch"] = "case1"
        r = q - root
        removed = order[:r]
        rest = g.copy()
        for v in removed:
            rest.delete_vertex(v)
        inner = augment_matching(rest, root)
        # re-add from the lowest-degree removed vertex up, never landing on
        # a removed vertex that is still waiting for its edge
        out = inner
        for i in range(r - 1, -1, -1):
            out = greedy_complete(g, out, [removed[i]], order="given", avoid=removed[:i])
        return out

    diag["weaker_branch"] = "case2"
    rest = g.copy()
    for v in order[:k]:
        rest.delete_vertex(v)
    cols = sorted(_eligible_colors(g, q))[: 4 * q]
    edges, back = [], []
    for j in range(q):
        for c in cols[4 * j: 4 * j + 4]:
            for e in sorted(rest.class_edges(c)):
                edges.append((rest.eu[e], rest.ev[e], j))
                back.append(e)
    merged = build_graph(g.n, edges, num_colors=q)
    opts = dict(CASE2_DEFAULTS)
    opts.update(case2_overrides or {})
    qu = max(3 * (q - k), 2)
    params = uniform.default_params(qu, dmax=4, eps=1 / 3, seed=derive_seed(seed, "case2"), **opts)
    rep = uniform.run(merged, params)
    diag["case2_outcome"] = rep.outcome
    if rep.outcome != "full":
        raise AugmentStuck(f"case 2 engine matched {rep.matched_count}/{q} merged colors")
    return RainbowMatching([(back[e], g.ec[back[e]]) for e, _ in rep.matching])


# ----------------------------------------------------------------------
# preprocessing


@dataclass
class Preprocessed:
    heavy: frozenset
    direct: RainbowMatching | None = None
    diagnostics: dict = field(default_factory=dict)


def heavy_vertices(g: EdgeColoredGraph, q: int, eps: float) -> list[int]:
    bound = 2 * (1 + eps / 2) * q
    return [v for v in g.alive_vertices() if g.degree(v) > bound + 1e-9]


def preprocess(g: EdgeColoredGraph, q: int, eps: float, seed: int = 0,
               case2_overrides: dict | None = None, reduction_overrides: dict | None = None) -> Preprocessed:
    """Pass the heavy set through, or solve outright when it is too large."""
    theta = eps / 2
    heavy = heavy_vertices(g, q, eps)
    diag = {"heavy": len(heavy)}
    if len(heavy) <= (1 - theta) * q + 1e-9:
        diag["path"] = "nibble"
        return Preprocessed(frozenset(heavy), None, diag)

    diag["path"] = "direct-reduction"
    k_t = ceil_int(theta * q)
    k_a = q - k_t
    a_set = sorted(heavy, key=lambda v: (-g.degree(v), v))[:k_a]
    a_frozen = frozenset(a_set)
    diag["reduction_sizes"] = [k_a, k_t]
    residue = g.copy()
    for v in a_set:
        residue.delete_vertex(v)
    try:
        t_match = weaker_bound_solver(residue, k_t, derive_seed(seed, "weaker"), case2_overrides, diag)
    except RainbowError as exc:
        raise ReductionFailed(f"reduction: weaker-bound step failed: {exc}", partial=RainbowMatching()) from exc

    bip = g.copy()
    for e, c in t_match:
        for w in (g.eu[e], g.ev[e]):
            if bip.vertex_alive[w]:
                bip.delete_vertex(w)
        if bip.color_alive[c]:
            bip.delete_color_class(c)
    for e in list(bip.alive_edges()):
        if (bip.eu[e] in a_frozen) == (bip.ev[e] in a_frozen):
            bip.delete_edge(e)
    bip.side_a = a_frozen
    min_deg = min((bip.degree(a) for a in a_set), default=0)
    diag["reduction_min_a_degree"] = min_deg
    if k_a == 0:
        return Preprocessed(a_frozen, t_match, diag)
    eps_sat = min(min_deg / k_a - 1, theta / (1 - theta))
    if eps_sat <= 0 or k_a < 2:
        raise ReductionFailed(
            f"reduction: A-degree {min_deg} leaves no slack over |A|={k_a}", partial=t_match
        )
    opts = dict(REDUCTION_DEFAULTS)
    opts.update(reduction_overrides or {})
    sp = saturating.default_params(k_a, eps_sat, seed=derive_seed(seed, "saturate"), **opts)
    try:
        rep = saturating.run(bip, sp)
    except RainbowError as exc:
        raise ReductionFailed(f"reduction: saturating step failed: {exc}", partial=t_match) from exc
    diag["reduction_saturating"] = {"outcome": rep.outcome, "eps": eps_sat, **rep.diagnostics}
    if rep.outcome != "full":
        raise ReductionFailed(f"reduction: saturated {rep.matched_count}/{k_a}", partial=t_match)
    return Preprocessed(a_frozen, RainbowMatching(t_match.entries + rep.matching.entries), diag)


# ----------------------------------------------------------------------
# nibble


@dataclass
class ColorTargetState:
    g: EdgeColoredGraph
    heavy: frozenset
    t: int
    s_target: int
    partial: RainbowMatching
    trajectory: list = field(default_factory=list)

    def clone(self) -> "ColorTargetState":
        return ColorTargetState(self.g.copy(), self.heavy, self.t, self.s_target,
                                self.partial.copy(), list(self.trajectory))


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


def a_fractions(g: EdgeColoredGraph, heavy) -> dict[int, float]:
    """|V_C ∩ A| / |V_C| for every alive nonempty class C."""
    out = {}
    for c in g.alive_colors():
        edges = g.class_edges(c)
        if not edges:
            continue
        if not heavy:
            out[c] = 0.0
            continue
        inside = sum((g.eu[e] in heavy) + (g.ev[e] in heavy) for e in edges)
        out[c] = inside / (2 * len(edges))
    return out


def iterate(state: ColorTargetState, params: ColorTargetParams, sched,
            attempt: int = 0) -> tuple[int, curves.TrajectoryRecord]:
    """Steps 1-6 in place.  Returns (violations, record)."""
    g = state.g
    t = state.t
    heavy = state.heavy
    m = batch_size(params)
    a_t, b_t = deletion_probs(t, params, sched.alpha[t], sched.beta[t])
    draw = substream(params.seed, "draw", t, attempt)
    kill = substream(params.seed, "residual", t, attempt)

    # step 1
    pool = g.alive_edges()
    total = len(pool)
    batch = [pool[draw.randrange(total)] for _ in range(m)] if total else []
    pprime = {v: hit_prob(g.degree(v), total, m) for v in g.alive_vertices() if g.degree(v)}

    # step 4 decisions use the graph as drawn
    seen_v: set[int] = set()
    seen_c: set[int] = set()
    added = []
    for e in batch:
        u, v, c = g.eu[e], g.ev[e], g.ec[e]
        if u not in seen_v and v not in seen_v and c not in seen_c:
            added.append(e)
        seen_v.update((u, v))
        seen_c.add(c)

    # step 2
    for e in batch:
        for w in (g.eu[e], g.ev[e]):
            if g.vertex_alive[w]:
                g.delete_vertex(w)

    # step 3
    clamps = 0
    for v, pp in pprime.items():
        if not g.vertex_alive[v]:
            continue
        target = a_t if v in heavy else b_t
        if pp > target:
            clamps += 1
        if kill.random() < step_residual_prob(pp, target):
            g.delete_vertex(v)

    # steps 4-5
    for e in added:
        c = g.ec[e]
        state.partial.add(e, c)
        if g.color_alive[c]:
            g.delete_color_class(c)

    # step 6
    t1 = t + 1
    target = _size_target(params, sched, t1)
    below = 0
    for c in g.alive_colors():
        size = g.class_size(c)
        if size < target:
            below += 1
        elif size > target:
            first = sorted(e for e in g.class_edges(c) if g.eu[e] in heavy or g.ev[e] in heavy) if heavy else ()
            g.truncate_class(c, target, first=first)
    fracs = a_fractions(g, heavy)
    limit = (1 - params.theta) / 2
    frac_bad = sum(1 for f in fracs.values() if f > limit + 1e-12)
    cap_a = (1 + sched.beta[t1]) * curves.ideal_degree(KIND, params, t1)
    cap_b = (1 + sched.beta[t1]) * curves.ideal_degree(KIND, params, t1, other=True)
    max_a = max((g.degree(v) for v in heavy if g.vertex_alive[v]), default=0)
    max_b = max((g.degree(v) for v in g.alive_vertices() if v not in heavy), default=0)
    over = int(max_a > cap_a + 1e-9) + int(max_b > cap_b + 1e-9)

    state.t = t1
    state.s_target = target
    st = snapshot_stats(g)
    rec = curves.TrajectoryRecord(
        t=t1,
        empirical_size=st.min_class,
        empirical_degree=max_a,
        matched=len(state.partial),
        s_ideal=curves.ideal_size(KIND, params, t1),
        d_ideal=curves.ideal_degree(KIND, params, t1),
        alpha=sched.alpha[t1],
        beta=sched.beta[t1],
        a_t=a_t,
        b_t=b_t,
        max_class=st.max_class,
        max_other_degree=max_b,
        d2_ideal=curves.ideal_degree(KIND, params, t1, other=True),
        discards=len(batch) - len(added),
        clamps=clamps,
        violations=below + frac_bad + over,
        max_a_fraction=max(fracs.values(), default=0.0),
        alive_edges=st.alive_edges,
    )
    return below + frac_bad + over, rec


def iterate_with_retry(state: ColorTargetState, params: ColorTargetParams, sched) -> ColorTargetState:
    """Same policy as the uniform nibble; a single attempt runs in place."""
    n_attempts = max(params.retries, 1)
    if n_attempts == 1:
        viol, rec = iterate(state, params, sched, 0)
        rec.degraded = viol > 0 or params.retries == 0
        state.trajectory.append(rec)
        return state
    best = None
    for attempt in range(n_attempts):
        trial = state.clone()
        viol, rec = iterate(trial, params, sched, attempt)
        rec.attempts = attempt + 1
        if viol == 0:
            trial.trajectory.append(rec)
            return trial
        if best is None or viol < best[0]:
            best = (viol, trial, rec)
    _, trial, rec = best
    rec.degraded = True
    trial.trajectory.append(rec)
    return trial


def hypothesis_warnings(g: EdgeColoredGraph, params: ColorTargetParams) -> list[str]:
    st = snapshot_stats(g)
    out = []
    if st.alive_colors < params.num_colors:
        out.append(f"{st.alive_colors} colors < 2(1+eps)q={params.num_colors}")
    if st.min_class < params.q:
        out.append(f"smallest class {st.min_class} < q={params.q}")
    if not st.proper:
        out.append("coloring is not proper")
    if params.eps >= 0.1:
        out.append(f"eps={params.eps} outside the proven range eps < 1/10")
    return out


def _initial_record(g, heavy, params, sched) -> curves.TrajectoryRecord:
    st = snapshot_stats(g)
    fracs = a_fractions(g, heavy)
    return curves.TrajectoryRecord(
        t=0,
        empirical_size=st.min_class,
        empirical_degree=max((g.degree(v) for v in heavy), default=0),
        matched=0,
        s_ideal=curves.ideal_size(KIND, params, 0),
        d_ideal=curves.ideal_degree(KIND, params, 0),
        alpha=sched.alpha[0],
        beta=sched.beta[0],
        max_class=st.max_class,
        max_other_degree=max((g.degree(v) for v in g.alive_vertices() if v not in heavy), default=0),
        d2_ideal=curves.ideal_degree(KIND, params, 0, other=True),
        max_a_fraction=max(fracs.values(), default=0.0),
        alive_edges=st.alive_edges,
    )


def run(g: EdgeColoredGraph, params: ColorTargetParams) -> RunReport:
    """Preprocess, nibble, trim to q; ``g`` is left untouched."""
    start = time.perf_counter()
    params.validate()
    warnings = hypothesis_warnings(g, params)
    report = RunReport(algorithm=KIND, outcome="failure", matching=RainbowMatching(), target=params.q,
                       seed=params.seed, config=params.as_dict())
    diag = report.diagnostics
    diag["hypothesis_warnings"] = warnings

    try:
        pre = preprocess(g, params.q, params.eps, derive_seed(params.seed, "preprocess"),
                         params.case2_overrides, params.reduction_overrides)
    except ReductionFailed as exc:
        diag["path"] = "direct-reduction"
        report.error = str(exc)
        report.matching = exc.partial or RainbowMatching()
        _check(g, report.matching)
        report.wall_time = time.perf_counter() - start
        exc.report = report
        raise
    diag.update(pre.diagnostics)
    if pre.direct is not None:
        final = RainbowMatching(pre.direct.entries[: params.q])
        _check(g, final)
        report.matching = final
        report.outcome = "full" if len(final) >= params.q else "partial"
        report.wall_time = time.perf_counter() - start
        return report

    T, sched = _schedule(params)
    work = g.copy()
    s0 = _size_target(params, sched, 0)
    for c in work.alive_colors():
        work.truncate_class(c, s0, first=sorted(
            e for e in work.class_edges(c) if work.eu[e] in pre.heavy or work.ev[e] in pre.heavy))
    state = ColorTargetState(work, pre.heavy, 0, s0, RainbowMatching(),
                             [_initial_record(work, pre.heavy, params, sched)])
    for _ in range(T):
        if len(state.partial) >= params.q:
            break
        state = iterate_with_retry(state, params, sched)

    traj = state.trajectory
    limit = (1 - params.theta) / 2
    diag.update({
        "iterations": T,
        "iterations_run": len(traj) - 1,
        "batch_size": batch_size(params),
        "clamps": sum(r.clamps for r in traj),
        "discards": sum(r.discards for r in traj),
        "discard_bound_total": discard_bound(params),
        "degraded_iterations": sum(1 for r in traj if r.degraded),
        "violations": sum(r.violations for r in traj),
        "max_a_fraction": max((r.max_a_fraction or 0.0) for r in traj),
        "a_fraction_limit": limit,
        "a_fraction_ok": all((r.max_a_fraction or 0.0) <= limit + 1e-12 for r in traj),
        "nibble_matched": len(state.partial),
    })
    report.trajectory = traj
    final = RainbowMatching(state.partial.entries[: params.q])
    _check(g, final)
    report.matching = final
    report.wall_time = time.perf_counter() - start
    if len(final) < params.q:
        report.outcome = "partial"
        report.error = f"nibble matched {len(final)} < q={params.q}"
        raise TargetMissed(report.error, partial=final, report=report)
    report.outcome = "full"
    return report


def _check(g: EdgeColoredGraph, m: RainbowMatching) -> None:
    ok, viol = verify_rainbow_matching(g, m)
    if not ok:
        raise InvariantViolation(f"solver produced an invalid matching: {viol[:5]}")
