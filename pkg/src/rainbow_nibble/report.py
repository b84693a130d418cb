"""Run reports and trajectory CSV output."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from . import curves
from .curves import TrajectoryRecord
from .graph import RainbowMatching

OUTCOMES = ("full", "partial", "failure")

TRAJ_COLUMNS = [
    "t", "empirical_size", "empirical_degree", "matched", "s_ideal", "d_ideal", "d2_ideal",
    "alpha", "beta", "a_t", "b_t", "theta_t", "max_class", "max_other_degree", "discards",
    "clamps", "attempts", "degraded", "violations", "max_a_fraction", "alive_edges",
]


@dataclass
class RunReport:
    algorithm: str
    outcome: str
    matching: RainbowMatching
    target: int
    seed: int
    config: dict
    trajectory: list[TrajectoryRecord] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    error: str | None = None
    wall_time: float = 0.0

    @property
    def matched_count(self) -> int:
        return len(self.matching)

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "algorithm": self.algorithm,
            "outcome": self.outcome,
            "matched_count": self.matched_count,
            "target": self.target,
            "seed": self.seed,
            "config": self.config,
            "matching": [list(x) for x in self.matching.entries],
            "diagnostics": self.diagnostics,
            "error": self.error,
            "trajectory": [r.as_dict() for r in self.trajectory],
        }
        if timing:
            d["wall_time"] = round(self.wall_time, 6)
        return d

    def to_json(self, timing: bool = False) -> str:
        """Canonical JSON; byte-identical for identical runs unless ``timing`` is set."""
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=1, allow_nan=True) + "\n"


def trajectory_csv(records: list[TrajectoryRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRAJ_COLUMNS)
    for r in records:
        d = r.as_dict()
        w.writerow(["" if d[k] is None else _fmt(d[k]) for k in TRAJ_COLUMNS])
    return buf.getvalue()


CURVE_COLUMNS = ["t", "x", "s_ideal", "g_ideal", "alpha", "beta", "a_t", "b_t", "theta_t"]


def curve_csv(kind: str, params) -> str:
    """Ideal curves and scheduled error terms for t = 0..floor(eta/delta)."""
    T = max(curves.num_iterations(params), 0)
    sched = curves.error_sequences(kind, params, T)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for t in range(T + 1):
        x = t * params.delta
        s, g = curves.curve_values(kind, params.eps, x)
        a = curves.ideal_deletion(kind, params, t)
        b = curves.ideal_deletion(kind, params, t, other=True) if kind == "thmq" else None
        theta = params.delta / (1 - t * params.delta) if kind == "thm1" else None
        row = [t, x, s, g, sched.alpha[t], sched.beta[t], a, b, theta]
        w.writerow(["" if v is None else _fmt(v) for v in row])
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)
