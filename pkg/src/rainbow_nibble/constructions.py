"""Instance families: explicit constructions and random hypothesis-satisfying graphs."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .errors import ConfigInvalid, GenerationBudgetExceeded, OddT
from .graph import EdgeColoredGraph, build_graph, snapshot_stats
from .rng import substream

KINDS = (
    "cyclic-latin",
    "prop2-counterexample",
    "star-forest",
    "k2qm1-tight",
    "random-thm1",
    "random-thm3",
    "random-thmq",
)
RANDOM_KINDS = ("random-thm1", "random-thm3", "random-thmq")
RETRY_BUDGET = 100


def ceil_int(x: float) -> int:
    """Ceiling that ignores floating-point dust just above an integer."""
    return int(math.ceil(x - 1e-9))


def cyclic_latin_coloring(n: int) -> EdgeColoredGraph:
    """K_{n,n} with a_i = i, b_j = n + j and edge a_i b_j colored (i + j) mod n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    edges = [(i, n + j, (i + j) % n) for i in range(n) for j in range(n)]
    return build_graph(2 * n, edges, n)


def prop2_counterexample(t: int) -> EdgeColoredGraph:
    """t+1 colors with t edges each and no rainbow matching of size t (t even).

    A = 0..t-1 and B = t..2t-1 are both read as Z_t.  Color j < t joins
    a to a + j; color t pairs consecutive vertices inside A and inside B.
    """
    if t < 2 or t % 2:
        raise OddT(f"t must be even and >= 2, got {t}")
    edges = [(a, t + (a + j) % t, j) for j in range(t) for a in range(t)]
    edges += [(2 * i, 2 * i + 1, t) for i in range(t // 2)]
    edges += [(t + 2 * i, t + 2 * i + 1, t) for i in range(t // 2)]
    return build_graph(2 * t, edges, t + 1)


def star_forest(q: int, n: int) -> EdgeColoredGraph:
    """q-1 disjoint copies of K_{1,n}, each star using colors 0..n-1 once."""
    if q < 2 or n < 1:
        raise ValueError("need q >= 2 and n >= 1")
    edges = []
    for k in range(q - 1):
        center = k * (n + 1)
        edges += [(center, center + 1 + i, i) for i in range(n)]
    return build_graph((q - 1) * (n + 1), edges, n)


def round_robin(m: int) -> list[list[tuple[int, int]]]:
    """Near-perfect matchings of K_m for odd m: round r pairs r+i with r-i."""
    if m % 2 == 0:
        raise ValueError("round_robin expects an odd vertex count")
    return [
        [((r + i) % m, (r - i) % m) for i in range(1, (m - 1) // 2 + 1)]
        for r in range(m)
    ]


def k2qm1_tight(q: int) -> EdgeColoredGraph:
    """2q-3 colors of q edges each on K_{2q-1}: no rainbow (or any) q-matching."""
    if q < 2:
        raise ValueError("q must be >= 2")
    m = 2 * q - 1
    k = 2 * q - 3
    rounds = round_robin(m)
    edges = [(u, v, c) for c in range(k) for u, v in rounds[c]]
    leftover = [uv for r in rounds[k:] for uv in r]
    edges += [(u, v, c) for c, (u, v) in enumerate(leftover[:k])]
    return build_graph(m, edges, k)


# ----------------------------------------------------------------------
# random instances


@dataclass
class InstanceSpec:
    kind: str
    n: int | None = None
    q: int | None = None
    t: int | None = None
    eps: float | None = None
    delta_max: int = 1
    seed: int = 0
    num_colors: int | None = None
    num_vertices: int | None = None
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigInvalid(f"unknown instance kind {self.kind!r}")
        need = {
            "cyclic-latin": ("n",),
            "prop2-counterexample": ("t",),
            "star-forest": ("q", "n"),
            "k2qm1-tight": ("q",),
            "random-thm1": ("q",),
            "random-thm3": ("q", "eps"),
            "random-thmq": ("q", "eps"),
        }[self.kind]
        for name in need:
            if getattr(self, name) is None:
                raise ConfigInvalid(f"{self.kind} needs parameter {name}")
        if self.delta_max < 1:
            raise ConfigInvalid("delta_max must be >= 1")


def thm1_color_size(q: int, delta_max: int, eps: float | None) -> int:
    if eps is None:
        eps = (delta_max**2 / q) ** (1 / 6) * math.log(q) ** 2
    return ceil_int((1 + eps) * q)


def check_hypotheses(g: EdgeColoredGraph, spec: InstanceSpec) -> list[str]:
    """Problems with ``g`` as an instance of ``spec``, judged from snapshot stats."""
    problems = []
    q, eps = spec.q, spec.eps
    if spec.kind == "random-thm1":
        st = snapshot_stats(g)
        need = thm1_color_size(q, spec.delta_max, eps)
        if st.max_degree > q:
            problems.append(f"max degree {st.max_degree} > q={q}")
        if st.min_class < need:
            problems.append(f"smallest class {st.min_class} < {need}")
        if st.max_color_degree > spec.delta_max:
            problems.append(f"color degree {st.max_color_degree} > {spec.delta_max}")
    elif spec.kind == "random-thm3":
        side = sorted(g.side_a or ())
        st = snapshot_stats(g, side=side)
        if len(side) != q:
            problems.append(f"|A| = {len(side)} != q={q}")
        if st.min_side_degree < ceil_int((1 + eps) * q):
            problems.append(f"min A-degree {st.min_side_degree} < {ceil_int((1 + eps) * q)}")
        if not st.proper:
            problems.append("coloring not proper")
        a = g.side_a or frozenset()
        if any((g.eu[e] in a) == (g.ev[e] in a) for e in g.alive_edges()):
            problems.append("edge not crossing A|B")
    elif spec.kind == "random-thmq":
        st = snapshot_stats(g)
        colors = ceil_int(2 * (1 + eps) * q)
        if st.alive_colors != colors:
            problems.append(f"{st.alive_colors} colors != {colors}")
        if st.min_class < q:
            problems.append(f"smallest class {st.min_class} < q={q}")
        if not st.proper:
            problems.append("coloring not proper")
    return problems


def _gen_thm1(spec: InstanceSpec, rng: random.Random) -> EdgeColoredGraph | None:
    q, dmax = spec.q, spec.delta_max
    size = thm1_color_size(q, dmax, spec.eps)
    ncol = spec.num_colors or max(2, q // 4)
    n = spec.num_vertices or max(4 * size, ceil_int(4 * ncol * size / q))
    g = EdgeColoredGraph(n, ncol)
    deg = [0] * n
    pairs = g._pairs
    for c in range(ncol):
        members: list[int] = []
        cdeg: dict[int, int] = {}
        placed = 0
        tries = 0
        while placed < size:
            tries += 1
            if tries > 50 * size:
                return None
            # with color degree > 1 allowed, grow some small stars inside the class
            if dmax > 1 and members and rng.random() < 0.5:
                u = members[rng.randrange(len(members))]
            else:
                u = rng.randrange(n)
            v = rng.randrange(n)
            if u == v or deg[u] >= q or deg[v] >= q:
                continue
            if cdeg.get(u, 0) >= dmax or cdeg.get(v, 0) >= dmax:
                continue
            if ((u, v) if u < v else (v, u)) in pairs:
                continue
            g.add_edge(u, v, c)
            deg[u] += 1
            deg[v] += 1
            for w in (u, v):
                k = cdeg.get(w, 0)
                if k == 0:
                    members.append(w)
                cdeg[w] = k + 1
            placed += 1
    return g


def _gen_thm3(spec: InstanceSpec, rng: random.Random) -> EdgeColoredGraph | None:
    q = spec.q
    d = ceil_int((1 + spec.eps) * q)
    nb = (spec.num_vertices - q) if spec.num_vertices else 2 * d
    ncol = spec.num_colors or 2 * d
    if nb < d:
        raise ConfigInvalid(f"side B ({nb}) smaller than required A-degree {d}")
    g = EdgeColoredGraph(q + nb, ncol)
    used: list[set[int]] = [set() for _ in range(q + nb)]
    for a in range(q):
        for b in rng.sample(range(q, q + nb), d):
            ua, ub = used[a], used[b]
            if len(ua) + len(ub) >= ncol:
                return None
            for _ in range(64 * ncol):
                c = rng.randrange(ncol)
                if c not in ua and c not in ub:
                    break
            else:
                free = [c for c in range(ncol) if c not in ua and c not in ub]
                if not free:
                    return None
                c = rng.choice(free)
            g.add_edge(a, b, c)
            ua.add(c)
            ub.add(c)
    g.side_a = frozenset(range(q))
    return g


def _gen_thmq(spec: InstanceSpec, rng: random.Random) -> EdgeColoredGraph | None:
    q = spec.q
    ncol = ceil_int(2 * (1 + spec.eps) * q)
    n = spec.num_vertices or 2 * ncol
    if n < 2 * q:
        raise ConfigInvalid(f"{n} vertices cannot hold a matching of size {q}")
    g = EdgeColoredGraph(n, ncol)
    pairs = g._pairs
    order = list(range(n))
    for c in range(ncol):
        rng.shuffle(order)
        pending: list[int] = []
        placed = 0
        for w in order:
            for i, u in enumerate(pending):
                if ((u, w) if u < w else (w, u)) not in pairs:
                    g.add_edge(u, w, c)
                    del pending[i]
                    placed += 1
                    break
            else:
                pending.append(w)
            if placed == q:
                break
        if placed < q:
            return None
    return g


def random_instance(spec: InstanceSpec) -> EdgeColoredGraph:
    spec.validate()
    if spec.kind not in RANDOM_KINDS:
        return build_instance(spec)
    gen = {"random-thm1": _gen_thm1, "random-thm3": _gen_thm3, "random-thmq": _gen_thmq}[spec.kind]
    last = None
    for attempt in range(RETRY_BUDGET):
        rng = substream(spec.seed, "generate", spec.kind, attempt)
        g = gen(spec, rng)
        if g is None:
            continue
        last = check_hypotheses(g, spec)
        if not last:
            return g
    raise GenerationBudgetExceeded(
        f"{spec.kind}: no valid instance in {RETRY_BUDGET} attempts (last problems: {last})"
    )


def build_instance(spec: InstanceSpec) -> EdgeColoredGraph:
    spec.validate()
    if spec.kind == "cyclic-latin":
        return cyclic_latin_coloring(spec.n)
    if spec.kind == "prop2-counterexample":
        return prop2_counterexample(spec.t)
    if spec.kind == "star-forest":
        return star_forest(spec.q, spec.n)
    if spec.kind == "k2qm1-tight":
        return k2qm1_tight(spec.q)
    return random_instance(spec)
