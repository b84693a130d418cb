"""Mutable edge-colored simple graph and the rainbow matching verifier.

Ids are dense integers fixed at build time.  Deletion only flips alive
flags; every alive edge also sits in three swap-removal lists (global,
per-vertex, per-color) so that uniform sampling of an alive edge from
any of them is O(1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import AlreadyDead, LoopEdge, ParallelEdge, UnknownEdge, VertexOutOfRange


@dataclass
class RainbowMatching:
    """Edges claimed pairwise vertex-disjoint with pairwise distinct colors."""

    entries: list[tuple[int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def add(self, edge: int, color: int) -> None:
        self.entries.append((edge, color))

    def edges(self) -> list[int]:
        return [e for e, _ in self.entries]

    def colors(self) -> list[int]:
        return [c for _, c in self.entries]

    def copy(self) -> "RainbowMatching":
        return RainbowMatching(list(self.entries))


@dataclass
class GraphStats:
    min_class: int
    max_class: int
    max_degree: int
    max_color_degree: int
    alive_vertices: int
    alive_edges: int
    alive_colors: int
    min_side_degree: int | None = None
    max_side_degree: int | None = None

    @property
    def proper(self) -> bool:
        return self.max_color_degree <= 1


class EdgeColoredGraph:
    def __init__(self, num_vertices: int, num_colors: int = 0):
        self.n = num_vertices
        self.num_colors = num_colors
        self.eu: list[int] = []
        self.ev: list[int] = []
        self.ec: list[int] = []
        self.side_a: frozenset[int] | None = None
        self._pairs: set[tuple[int, int]] = set()

        self.edge_alive = bytearray()
        self.vertex_alive = bytearray(b"\x01" * num_vertices)
        self.color_alive = bytearray(b"\x01" * num_colors)

        self._all: list[int] = []
        self._all_pos: list[int] = []
        self._v_edges: list[list[int]] = [[] for _ in range(num_vertices)]
        self._pos_u: list[int] = []
        self._pos_v: list[int] = []
        self._c_edges: list[list[int]] = [[] for _ in range(num_colors)]
        self._c_pos: list[int] = []
        self._vcol: list[dict[int, int]] = [{} for _ in range(num_vertices)]

    # ------------------------------------------------------------------
    # construction

    def add_edge(self, u: int, v: int, c: int) -> int:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise VertexOutOfRange(f"edge ({u}, {v}) outside 0..{self.n - 1}")
        if u == v:
            raise LoopEdge(f"loop at vertex {u}")
        if c < 0:
            raise ValueError(f"negative color {c}")
        key = (u, v) if u < v else (v, u)
        if key in self._pairs:
            raise ParallelEdge(f"duplicate edge {key}")
        self._pairs.add(key)
        while c >= self.num_colors:
            self.num_colors += 1
            self._c_edges.append([])
            self.color_alive.append(1)

        e = len(self.eu)
        self.eu.append(u)
        self.ev.append(v)
        self.ec.append(c)
        self.edge_alive.append(1)
        self._all_pos.append(len(self._all))
        self._all.append(e)
        self._pos_u.append(len(self._v_edges[u]))
        self._v_edges[u].append(e)
        self._pos_v.append(len(self._v_edges[v]))
        self._v_edges[v].append(e)
        self._c_pos.append(len(self._c_edges[c]))
        self._c_edges[c].append(e)
        vc = self._vcol[u]
        vc[c] = vc.get(c, 0) + 1
        vc = self._vcol[v]
        vc[c] = vc.get(c, 0) + 1
        return e

    def copy(self) -> "EdgeColoredGraph":
        g = EdgeColoredGraph.__new__(EdgeColoredGraph)
        g.n = self.n
        g.num_colors = self.num_colors
        # original edge list and pair set are immutable after build; share them
        g.eu, g.ev, g.ec = self.eu, self.ev, self.ec
        g._pairs = self._pairs
        g.side_a = self.side_a
        g.edge_alive = bytearray(self.edge_alive)
        g.vertex_alive = bytearray(self.vertex_alive)
        g.color_alive = bytearray(self.color_alive)
        g._all = self._all[:]
        g._all_pos = self._all_pos[:]
        g._v_edges = [lst[:] for lst in self._v_edges]
        g._pos_u = self._pos_u[:]
        g._pos_v = self._pos_v[:]
        g._c_edges = [lst[:] for lst in self._c_edges]
        g._c_pos = self._c_pos[:]
        g._vcol = [d.copy() for d in self._vcol]
        return g

    # ------------------------------------------------------------------
    # queries

    @property
    def num_edges(self) -> int:
        return len(self.eu)

    def endpoints(self, e: int) -> tuple[int, int]:
        return self.eu[e], self.ev[e]

    def color(self, e: int) -> int:
        return self.ec[e]

    def degree(self, v: int) -> int:
        return len(self._v_edges[v])

    def class_size(self, c: int) -> int:
        return len(self._c_edges[c])

    def color_degree(self, v: int, c: int) -> int:
        return self._vcol[v].get(c, 0)

    def color_degrees(self, v: int) -> dict[int, int]:
        """Map color -> d_C(v) over alive edges at ``v`` (do not mutate)."""
        return self._vcol[v]

    def alive_edges(self) -> list[int]:
        """Alive edge ids in internal order (do not mutate)."""
        return self._all

    def incident_edges(self, v: int) -> list[int]:
        return self._v_edges[v]

    def class_edges(self, c: int) -> list[int]:
        return self._c_edges[c]

    def alive_vertices(self) -> list[int]:
        va = self.vertex_alive
        return [v for v in range(self.n) if va[v]]

    def alive_colors(self) -> list[int]:
        ca = self.color_alive
        return [c for c in range(self.num_colors) if ca[c]]

    def is_edge_alive(self, e: int) -> bool:
        return bool(self.edge_alive[e])

    def other(self, e: int, v: int) -> int:
        u = self.eu[e]
        return self.ev[e] if u == v else u

    # ------------------------------------------------------------------
    # mutation

    def _kill_edge(self, e: int) -> None:
        self.edge_alive[e] = 0
        u, v, c = self.eu[e], self.ev[e], self.ec[e]

        lst, pos = self._all, self._all_pos
        i = pos[e]
        last = lst.pop()
        if last != e:
            lst[i] = last
            pos[last] = i

        self._unlink_vertex(u, e, self._pos_u[e])
        self._unlink_vertex(v, e, self._pos_v[e])

        lst, pos = self._c_edges[c], self._c_pos
        i = pos[e]
        last = lst.pop()
        if last != e:
            lst[i] = last
            pos[last] = i

        for w in (u, v):
            vc = self._vcol[w]
            k = vc[c] - 1
            if k:
                vc[c] = k
            else:
                del vc[c]

    def _unlink_vertex(self, w: int, e: int, i: int) -> None:
        lst = self._v_edges[w]
        last = lst.pop()
        if last != e:
            lst[i] = last
            if self.eu[last] == w:
                self._pos_u[last] = i
            else:
                self._pos_v[last] = i

    def delete_edge(self, e: int) -> None:
        if not 0 <= e < len(self.eu):
            raise UnknownEdge(f"edge {e}")
        if not self.edge_alive[e]:
            raise AlreadyDead(f"edge {e} already deleted")
        self._kill_edge(e)

    def delete_vertex(self, v: int) -> int:
        """Delete ``v`` and its incident edges; returns the number of edges removed."""
        if not 0 <= v < self.n:
            raise VertexOutOfRange(f"vertex {v}")
        if not self.vertex_alive[v]:
            raise AlreadyDead(f"vertex {v} already deleted")
        self.vertex_alive[v] = 0
        lst = self._v_edges[v]
        k = len(lst)
        while lst:
            self._kill_edge(lst[-1])
        return k

    def delete_color_class(self, c: int) -> int:
        if not 0 <= c < self.num_colors:
            raise UnknownEdge(f"color {c}")
        if not self.color_alive[c]:
            raise AlreadyDead(f"color {c} already deleted")
        self.color_alive[c] = 0
        lst = self._c_edges[c]
        k = len(lst)
        while lst:
            self._kill_edge(lst[-1])
        return k

    def truncate_class(self, c: int, target: int, first: Iterable[int] = ()) -> int:
        """Delete edges of color ``c`` until at most ``target`` remain.

        Edges listed in ``first`` go first, then the rest by ascending id.
        Returns the number of edges removed.
        """
        excess = len(self._c_edges[c]) - target
        if excess <= 0:
            return 0
        removed = 0
        for e in first:
            if removed == excess:
                return removed
            if self.edge_alive[e]:
                self._kill_edge(e)
                removed += 1
        if removed < excess:
            for e in sorted(self._c_edges[c])[: excess - removed]:
                self._kill_edge(e)
            removed = excess
        return removed

    def truncate_vertex(self, v: int, target: int, highest_first: bool = False) -> int:
        excess = len(self._v_edges[v]) - target
        if excess <= 0:
            return 0
        victims = sorted(self._v_edges[v], reverse=highest_first)[:excess]
        for e in victims:
            self._kill_edge(e)
        return excess

    # ------------------------------------------------------------------

    def check_invariants(self) -> None:
        """Recompute every index from scratch and compare (test helper)."""
        deg = [0] * self.n
        vcol: list[dict[int, int]] = [{} for _ in range(self.n)]
        csize = [0] * self.num_colors
        alive = 0
        for e in range(len(self.eu)):
            if not self.edge_alive[e]:
                continue
            alive += 1
            u, v, c = self.eu[e], self.ev[e], self.ec[e]
            assert self.vertex_alive[u] and self.vertex_alive[v], f"edge {e} on dead vertex"
            assert self.color_alive[c], f"edge {e} in dead color"
            deg[u] += 1
            deg[v] += 1
            csize[c] += 1
            vcol[u][c] = vcol[u].get(c, 0) + 1
            vcol[v][c] = vcol[v].get(c, 0) + 1
            assert self._all[self._all_pos[e]] == e
            assert self._v_edges[u][self._pos_u[e]] == e
            assert self._v_edges[v][self._pos_v[e]] == e
            assert self._c_edges[c][self._c_pos[e]] == e
        assert alive == len(self._all)
        for v in range(self.n):
            assert deg[v] == len(self._v_edges[v]), f"degree index off at {v}"
            assert vcol[v] == self._vcol[v], f"color-degree index off at {v}"
            assert sum(self._vcol[v].values()) == deg[v]
        for c in range(self.num_colors):
            assert csize[c] == len(self._c_edges[c])

    def __repr__(self) -> str:
        return (
            f"EdgeColoredGraph(n={self.n}, colors={self.num_colors}, "
            f"edges={len(self._all)}/{len(self.eu)} alive)"
        )


def build_graph(n: int, edge_list: Iterable[Sequence[int]], num_colors: int = 0,
                side_a: Iterable[int] | None = None) -> EdgeColoredGraph:
    g = EdgeColoredGraph(n, num_colors)
    for u, v, c in edge_list:
        g.add_edge(u, v, c)
    if side_a is not None:
        a = frozenset(side_a)
        for v in a:
            if not 0 <= v < n:
                raise VertexOutOfRange(f"side-A vertex {v}")
        g.side_a = a
    return g


def verify_rainbow_matching(g: EdgeColoredGraph, m: RainbowMatching | Iterable[tuple[int, int]]):
    """Check ``m`` against the original edge list of ``g``.

    Returns ``(ok, violations)``; each violation is a tuple
    ``(kind, i, j)`` with entry indices, kind one of ``"incidence"``,
    ``"color"`` or ``"color-mismatch"`` (then ``j`` is ``None``).
    """
    entries = list(m.entries if isinstance(m, RainbowMatching) else m)
    violations: list[tuple[str, int, int | None]] = []
    for i, (e, c) in enumerate(entries):
        if not 0 <= e < len(g.eu):
            raise UnknownEdge(f"matching entry {i} refers to unknown edge {e}")
        if g.ec[e] != c:
            violations.append(("color-mismatch", i, None))

    by_vertex: dict[int, list[int]] = {}
    by_color: dict[int, list[int]] = {}
    for i, (e, c) in enumerate(entries):
        by_vertex.setdefault(g.eu[e], []).append(i)
        by_vertex.setdefault(g.ev[e], []).append(i)
        by_color.setdefault(g.ec[e], []).append(i)

    incident: set[tuple[int, int]] = set()
    for idx in by_vertex.values():
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                incident.add((idx[a], idx[b]))
    violations.extend(("incidence", i, j) for i, j in sorted(incident))
    for idx in by_color.values():
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                violations.append(("color", idx[a], idx[b]))
    return not violations, violations


def snapshot_stats(g: EdgeColoredGraph, side: Iterable[int] | None = None) -> GraphStats:
    colors = g.alive_colors()
    sizes = [g.class_size(c) for c in colors]
    verts = g.alive_vertices()
    degs = [g.degree(v) for v in verts]
    max_cd = 0
    for v in verts:
        vc = g.color_degrees(v)
        if vc:
            m = max(vc.values())
            if m > max_cd:
                max_cd = m
    stats = GraphStats(
        min_class=min(sizes, default=0),
        max_class=max(sizes, default=0),
        max_degree=max(degs, default=0),
        max_color_degree=max_cd,
        alive_vertices=len(verts),
        alive_edges=len(g.alive_edges()),
        alive_colors=len(colors),
    )
    if side is not None:
        sd = [g.degree(v) for v in side if g.vertex_alive[v]]
        stats.min_side_degree = min(sd, default=0)
        stats.max_side_degree = max(sd, default=0)
    return stats
