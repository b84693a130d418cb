"""Endgame subroutines: independent transversals by resampling, and greedy completion.

A rainbow matching over a set of colors is an independent transversal of
the conflict graph whose parts are the color classes and whose edges join
incident graph edges.  The conflict graph is never materialized; two
nodes (graph edges) conflict iff they share an endpoint in ``g``.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from typing import Iterable

from .errors import BudgetExceeded, CompletionFailed, EmptyColor, GreedyStuck
from .graph import EdgeColoredGraph, RainbowMatching
from .rng import substream

log = logging.getLogger(__name__)


@dataclass
class ConflictInstance:
    g: EdgeColoredGraph
    colors: list[int]
    parts: list[list[int]]

    def conflict_degree(self, e: int) -> int:
        """Number of other instance nodes sharing an endpoint with edge ``e``."""
        g = self.g
        members = self._members()
        u, v = g.eu[e], g.ev[e]
        return sum(1 for f in g.incident_edges(u) if f != e and f in members) + sum(
            1 for f in g.incident_edges(v) if f != e and f in members
        )

    def max_conflict_degree(self) -> int:
        return max((self.conflict_degree(e) for p in self.parts for e in p), default=0)

    def _members(self) -> set[int]:
        if not hasattr(self, "_member_set"):
            self._member_set = {e for p in self.parts for e in p}
        return self._member_set


def build_conflict_instance(g: EdgeColoredGraph, colors: Iterable[int]) -> ConflictInstance:
    cols = sorted(set(colors))
    parts = []
    for c in cols:
        if not (0 <= c < g.num_colors) or not g.color_alive[c] or g.class_size(c) == 0:
            raise EmptyColor(f"color {c} has no alive edges")
        parts.append(sorted(g.class_edges(c)))
    return ConflictInstance(g, cols, parts)


def independent_transversal(inst: ConflictInstance, seed: int = 0,
                            resample_budget: int | None = None) -> tuple[list[int], int]:
    """One node per part with no two sharing a graph vertex.

    Starts from a uniform transversal; while some graph vertex is used by
    two chosen edges, resamples the parts involved at the lowest such
    vertex.  Returns ``(chosen edges in part order, resample count)``.
    """
    for i, p in enumerate(inst.parts):
        if not p:
            raise EmptyColor(f"part {i} is empty")
    if resample_budget is None:
        resample_budget = 1000 * len(inst.parts)
    g = inst.g
    eu, ev = g.eu, g.ev
    rng = substream(seed, "resample")
    chosen = [p[rng.randrange(len(p))] for p in inst.parts]
    users: dict[int, list[int]] = {}
    for i, e in enumerate(chosen):
        users.setdefault(eu[e], []).append(i)
        users.setdefault(ev[e], []).append(i)
    heap = [v for v, lst in users.items() if len(lst) > 1]
    heapq.heapify(heap)

    steps = 0
    while heap:
        v = heap[0]
        lst = users.get(v)
        if not lst or len(lst) < 2:
            heapq.heappop(heap)
            continue
        if steps >= resample_budget:
            bad = sum(1 for u, l in users.items() if len(l) > 1)
            raise BudgetExceeded(
                f"no independent transversal after {steps} resamples ({bad} bad vertices)",
                state=list(chosen),
                conflicts=bad,
            )
        steps += 1
        for i in sorted(lst[:2]):
            old = chosen[i]
            for w in (eu[old], ev[old]):
                users[w].remove(i)
            p = inst.parts[i]
            new = p[rng.randrange(len(p))]
            chosen[i] = new
            for w in (eu[new], ev[new]):
                lw = users.setdefault(w, [])
                lw.append(i)
                if len(lw) == 2:
                    heapq.heappush(heap, w)
    return chosen, steps


def completion_hypothesis(g: EdgeColoredGraph, colors: Iterable[int]) -> tuple[bool, int, int]:
    """(holds, smallest class, max degree): is every class >= 4e * maxdeg on these colors?"""
    cols = list(colors)
    if not cols:
        return True, 0, 0
    deg: dict[int, int] = {}
    for c in cols:
        for e in g.class_edges(c):
            for w in (g.eu[e], g.ev[e]):
                deg[w] = deg.get(w, 0) + 1
    maxdeg = max(deg.values(), default=0)
    smallest = min(g.class_size(c) for c in cols)
    return smallest >= 4 * math.e * maxdeg, smallest, maxdeg


def complete_rainbow_matching(g: EdgeColoredGraph, colors: Iterable[int], seed: int = 0,
                              budget: int | None = None, diagnostics: dict | None = None) -> RainbowMatching:
    """Rainbow matching using every color in ``colors``, via an independent transversal."""
    cols = sorted(set(colors))
    if not cols:
        return RainbowMatching()
    holds, smallest, maxdeg = completion_hypothesis(g, cols)
    if diagnostics is not None:
        diagnostics["completion_hypothesis"] = holds
        diagnostics["completion_min_class"] = smallest
        diagnostics["completion_max_degree"] = maxdeg
    if not holds:
        log.warning("completion: smallest class %d < 4e * max degree %d; trying anyway", smallest, maxdeg)
    try:
        inst = build_conflict_instance(g, cols)
        chosen, steps = independent_transversal(inst, seed, budget)
    except EmptyColor as exc:
        raise CompletionFailed(f"completion impossible: {exc}") from exc
    except BudgetExceeded as exc:
        raise CompletionFailed(f"completion failed: {exc}") from exc
    if diagnostics is not None:
        diagnostics["resamples"] = steps
    return RainbowMatching([(e, g.ec[e]) for e in chosen])


def greedy_complete(g: EdgeColoredGraph, partial: RainbowMatching, targets,
                    order: str = "degree", avoid: Iterable[int] = ()) -> RainbowMatching:
    """Extend ``partial`` greedily over alive edges of ``g``.

    ``targets`` is either an iterable of vertices (each must get a matching
    edge) or an int (that many new colors).  With ``order="degree"`` target
    vertices are served from lowest to highest degree; ``"given"`` keeps
    the caller's order.  Each target takes its lowest-id usable edge whose
    far endpoint is not in ``avoid``.
    """
    avoid = set(avoid)
    out = partial.copy()
    used_v: set[int] = set()
    used_c: set[int] = set()
    for e, c in partial:
        used_v.add(g.eu[e])
        used_v.add(g.ev[e])
        used_c.add(c)
    eu, ev, ec = g.eu, g.ev, g.ec

    if isinstance(targets, int):
        need = targets
        for c in g.alive_colors():
            if need == 0:
                break
            if c in used_c:
                continue
            for e in sorted(g.class_edges(c)):
                if eu[e] not in used_v and ev[e] not in used_v:
                    out.add(e, c)
                    used_v.update((eu[e], ev[e]))
                    used_c.add(c)
                    need -= 1
                    break
        if need:
            raise GreedyStuck(f"greedy completion short by {need} colors", target=need, partial=out)
        return out

    verts = list(targets)
    if order == "degree":
        verts.sort(key=lambda v: (g.degree(v), v))
    elif order != "given":
        raise ValueError(f"unknown order {order!r}")
    for v in verts:
        if v in used_v:
            continue
        for e in sorted(g.incident_edges(v)):
            w = eu[e] if ev[e] == v else ev[e]
            if w not in used_v and w not in avoid and ec[e] not in used_c:
                out.add(e, ec[e])
                used_v.update((v, w))
                used_c.add(ec[e])
                break
        else:
            raise GreedyStuck(f"target vertex {v} has no usable edge", target=v, partial=out)
    return out
