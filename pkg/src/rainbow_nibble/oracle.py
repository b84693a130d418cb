"""Exact maximum rainbow matching by branch and bound over colors.

Exponential time.  Ground truth for the constructions and small
generated instances, not a solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import BudgetExceeded, NotLatin
from .graph import EdgeColoredGraph, RainbowMatching, build_graph

DEFAULT_BUDGET = 10_000_000


@dataclass
class OracleResult:
    max_size: int
    witness: RainbowMatching
    explored_nodes: int
    exact: bool = True


class _Search:
    def __init__(self, g: EdgeColoredGraph, budget: int, stop_at: int | None):
        self.g = g
        self.budget = budget
        self.stop_at = stop_at
        # colors in ascending id, each with its alive edges in ascending id
        self.classes = [
            (c, sorted(g.class_edges(c)))
            for c in g.alive_colors()
            if g.class_size(c)
        ]
        self.used = bytearray(g.n)
        self.chosen: list[tuple[int, int]] = []
        self.best: list[tuple[int, int]] = []
        self.nodes = 0
        self.exhausted = False

    def run(self) -> None:
        if self.stop_at is not None and self.stop_at <= 0:
            return
        self._visit(0, self._free_vertices())

    def _free_vertices(self) -> int:
        g = self.g
        return sum(1 for v in range(g.n) if g.vertex_alive[v] and g.degree(v))

    def _visit(self, i: int, free: int) -> bool:
        """Returns True when the search should stop early."""
        self.nodes += 1
        if self.nodes > self.budget:
            self.exhausted = True
            return True
        k = len(self.chosen)
        if k > len(self.best):
            self.best = list(self.chosen)
            if self.stop_at is not None and k >= self.stop_at:
                return True
            if k == len(self.classes):
                return True
        remaining = len(self.classes) - i
        if k + min(remaining, free // 2) <= len(self.best):
            return False
        if i == len(self.classes):
            return False
        c, edges = self.classes[i]
        eu, ev, used = self.g.eu, self.g.ev, self.used
        for e in edges:
            u, v = eu[e], ev[e]
            if used[u] or used[v]:
                continue
            used[u] = used[v] = 1
            self.chosen.append((e, c))
            stop = self._visit(i + 1, free - 2)
            self.chosen.pop()
            used[u] = used[v] = 0
            if stop:
                return True
        return self._visit(i + 1, free)


def max_rainbow_matching(g: EdgeColoredGraph, node_budget: int = DEFAULT_BUDGET) -> OracleResult:
    if node_budget <= 0:
        raise ValueError("node_budget must be positive")
    s = _Search(g, node_budget, None)
    s.run()
    return OracleResult(
        max_size=len(s.best),
        witness=RainbowMatching(list(s.best)),
        explored_nodes=s.nodes,
        exact=not s.exhausted,
    )


def exists_rainbow_matching(g: EdgeColoredGraph, k: int, node_budget: int = DEFAULT_BUDGET) -> bool:
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return True
    s = _Search(g, node_budget, k)
    s.run()
    if len(s.best) >= k:
        return True
    if s.exhausted:
        raise BudgetExceeded(
            f"undecided after {s.nodes} nodes (best {len(s.best)})",
            state=RainbowMatching(list(s.best)),
        )
    return False


def latin_graph(latin: Sequence[Sequence[int]]) -> EdgeColoredGraph:
    """K_{n,n} with cell (i, j) as edge a_i b_j colored by the symbol."""
    n = len(latin)
    symbols = set(range(n))
    for row in latin:
        if len(row) != n or set(row) != symbols:
            raise NotLatin("rows must be permutations of 0..n-1")
    for j in range(n):
        if {latin[i][j] for i in range(n)} != symbols:
            raise NotLatin(f"column {j} is not a permutation")
    edges = [(i, n + j, latin[i][j]) for i in range(n) for j in range(n)]
    return build_graph(2 * n, edges, n)


def max_partial_transversal(n: int, latin: Sequence[Sequence[int]], node_budget: int = DEFAULT_BUDGET) -> int:
    if len(latin) != n:
        raise NotLatin(f"expected {n} rows, got {len(latin)}")
    res = max_rainbow_matching(latin_graph(latin), node_budget)
    if not res.exact:
        raise BudgetExceeded("transversal search exceeded budget", state=res.witness)
    return res.max_size
