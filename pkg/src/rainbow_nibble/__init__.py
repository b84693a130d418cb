"""Randomized nibble algorithms for large rainbow matchings in edge-colored graphs."""

from .graph import (
    EdgeColoredGraph,
    GraphStats,
    RainbowMatching,
    build_graph,
    snapshot_stats,
    verify_rainbow_matching,
)

__version__ = "0.1.0"

__all__ = [
    "EdgeColoredGraph",
    "GraphStats",
    "RainbowMatching",
    "build_graph",
    "snapshot_stats",
    "verify_rainbow_matching",
]
