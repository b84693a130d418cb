"""Plain-text formats: ``.ecg`` graphs and ``.rmm`` matchings.

``.ecg``::

    p <num_vertices> <num_colors>
    a <vertex>            # optional, marks side A of a bipartite instance
    e <u> <v> <c>

``.rmm``: one ``m <edge-index> <c>`` line per matching edge.
Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .errors import InputError, ParseError
from .graph import EdgeColoredGraph, RainbowMatching


def format_ecg(g: EdgeColoredGraph) -> str:
    out = [f"p {g.n} {g.num_colors}\n"]
    if g.side_a is not None:
        out.extend(f"a {v}\n" for v in sorted(g.side_a))
    out.extend(f"e {u} {v} {c}\n" for u, v, c in zip(g.eu, g.ev, g.ec))
    return "".join(out)


def parse_ecg(text: str) -> EdgeColoredGraph:
    header = None
    edges = []
    side_a = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        try:
            nums = [int(x) for x in parts[1:]]
        except ValueError:
            raise ParseError(f"non-integer field in {line!r}", lineno) from None
        if any(x < 0 for x in nums):
            raise ParseError(f"negative id in {line!r}", lineno)
        if tag == "p":
            if header is not None:
                raise ParseError("duplicate header", lineno)
            if len(nums) != 2:
                raise ParseError("header must be 'p <num_vertices> <num_colors>'", lineno)
            header = nums
        elif header is None:
            raise ParseError("missing 'p' header before data", lineno)
        elif tag == "e":
            if len(nums) != 3:
                raise ParseError("edge line must be 'e <u> <v> <c>'", lineno)
            if nums[2] >= header[1]:
                raise ParseError(f"color {nums[2]} >= declared {header[1]}", lineno)
            edges.append((lineno, nums))
        elif tag == "a":
            if len(nums) != 1:
                raise ParseError("side line must be 'a <vertex>'", lineno)
            side_a.append(nums[0])
        else:
            raise ParseError(f"unknown line type {tag!r}", lineno)
    if header is None:
        raise ParseError("empty file: missing 'p' header")

    g = EdgeColoredGraph(header[0], header[1])
    for lineno, (u, v, c) in edges:
        try:
            g.add_edge(u, v, c)
        except InputError as exc:
            raise ParseError(str(exc), lineno) from None
    if side_a:
        bad = [v for v in side_a if v >= g.n]
        if bad:
            raise ParseError(f"side-A vertex {bad[0]} out of range")
        g.side_a = frozenset(side_a)
    return g


def format_rmm(m: RainbowMatching) -> str:
    return "".join(f"m {e} {c}\n" for e, c in m.entries)


def parse_rmm(text: str, g: EdgeColoredGraph | None = None) -> RainbowMatching:
    m = RainbowMatching()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] != "m" or len(parts) != 3:
            raise ParseError(f"expected 'm <edge-index> <c>', got {line!r}", lineno)
        try:
            e, c = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(f"non-integer field in {line!r}", lineno) from None
        if g is not None and not 0 <= e < g.num_edges:
            raise ParseError(f"unknown edge index {e} (graph has {g.num_edges})", lineno)
        m.add(e, c)
    return m


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_ecg(path) -> EdgeColoredGraph:
    return parse_ecg(Path(path).read_text())


def write_ecg(path, g: EdgeColoredGraph) -> None:
    write_atomic(path, format_ecg(g))


def read_rmm(path, g: EdgeColoredGraph | None = None) -> RainbowMatching:
    return parse_rmm(Path(path).read_text(), g)


def write_rmm(path, m: RainbowMatching) -> None:
    write_atomic(path, format_rmm(m))
