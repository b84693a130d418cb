"""Seeded multi-trial campaigns and file verification.

Trial i of a campaign uses seed ``base_seed + i`` both for its generated
instance and for its solver.  Trials run in worker processes (capped by
``RNM_WORKERS``); results are aggregated in trial order, so summaries do
not depend on the worker count.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import color_target, curves, io, saturating, uniform
from .constructions import InstanceSpec, build_instance
from .errors import ConfigInvalid, InvariantViolation, RainbowError, SolverFailure
from .graph import EdgeColoredGraph, RainbowMatching, snapshot_stats, verify_rainbow_matching
from .report import RunReport

log = logging.getLogger(__name__)

ALGORITHMS = ("thm1", "thm3", "thmq")


@dataclass
class CampaignConfig:
    algorithm: str
    trials: int = 1
    base_seed: int = 0
    instance: dict | None = None
    graph_file: str | None = None
    q: int | None = None
    eps: float | None = None
    params: dict = field(default_factory=dict)
    workers: int | None = None
    out_dir: str | None = None

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigInvalid(f"unknown algorithm {self.algorithm!r}; pick one of {ALGORITHMS}")
        if self.trials < 1:
            raise ConfigInvalid("trials must be >= 1")
        if (self.instance is None) == (self.graph_file is None):
            raise ConfigInvalid("give exactly one of instance and graph_file")
        if self.instance is not None:
            InstanceSpec(**self.instance).validate()

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        d.pop("out_dir")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigInvalid(f"unknown config keys {sorted(extra)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigInvalid(str(exc)) from None


def worker_count(requested: int | None = None) -> int:
    env = os.environ.get("RNM_WORKERS")
    cap = None
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ConfigInvalid(f"RNM_WORKERS={env!r} is not an integer") from None
    n = requested if requested is not None else (cap or 1)
    if cap is not None:
        n = min(n, cap)
    return max(1, n)


# ----------------------------------------------------------------------
# single solves


def make_params(algorithm: str, g: EdgeColoredGraph, q: int | None, eps: float | None,
                seed: int, overrides: dict | None = None, dmax: int | None = None):
    """Default parameters of ``algorithm`` for ``g`` with keyword overrides applied."""
    opts = dict(overrides or {})
    opts["seed"] = seed
    if algorithm == "thm1":
        if q is None:
            q = max(snapshot_stats(g).max_degree, 2)
        if dmax is None:
            dmax = opts.pop("dmax", None) or max(snapshot_stats(g).max_color_degree, 1)
        else:
            opts.pop("dmax", None)
        if eps is not None:
            opts.setdefault("eps", eps)
        return uniform.default_params(q, dmax, **opts)
    if algorithm == "thm3":
        if q is None:
            q = len(g.side_a or ())
        if eps is None:
            raise ConfigInvalid("thm3 needs eps")
        return saturating.default_params(q, eps, **opts)
    if algorithm == "thmq":
        if q is None or eps is None:
            raise ConfigInvalid("thmq needs q and eps")
        return color_target.default_params(q, eps, **opts)
    raise ConfigInvalid(f"unknown algorithm {algorithm!r}")


def solve(algorithm: str, g: EdgeColoredGraph, params) -> RunReport:
    """Run one solver; failures still return their report with outcome set."""
    mod = {"thm1": uniform, "thm3": saturating, "thmq": color_target}[algorithm]
    try:
        return mod.run(g, params)
    except SolverFailure as exc:
        if exc.report is not None:
            if exc.report.outcome == "full":
                exc.report.outcome = "partial"
            return exc.report
        return RunReport(algorithm=algorithm, outcome="failure", matching=exc.partial or RainbowMatching(),
                         target=0, seed=params.seed, config=params.as_dict(), error=str(exc))


# ----------------------------------------------------------------------
# campaigns


def _trial_graph(cfg: CampaignConfig, seed: int) -> EdgeColoredGraph:
    if cfg.graph_file is not None:
        return io.read_ecg(cfg.graph_file)
    spec = dict(cfg.instance)
    spec["seed"] = seed
    return build_instance(InstanceSpec(**spec))


def _trial_defaults(cfg: CampaignConfig) -> tuple[int | None, float | None, int | None]:
    inst = cfg.instance or {}
    q = cfg.q if cfg.q is not None else inst.get("q")
    eps = cfg.eps if cfg.eps is not None else inst.get("eps")
    dmax = inst.get("delta_max") if cfg.algorithm == "thm1" and inst else None
    return q, eps, dmax


def run_trial(cfg: CampaignConfig, index: int) -> dict:
    """One trial, never raising for solver-level problems."""
    seed = cfg.base_seed + index
    rec = {"index": index, "seed": seed}
    try:
        g = _trial_graph(cfg, seed)
        q, eps, dmax = _trial_defaults(cfg)
        params = make_params(cfg.algorithm, g, q, eps, seed, cfg.params, dmax)
        report = solve(cfg.algorithm, g, params)
        ok, viol = verify_rainbow_matching(g, report.matching)
        rec["report"] = report.to_dict()
        rec["valid"] = ok
        rec["violations"] = len(viol)
        rec["deviation"] = curves.compare(report.trajectory).as_dict() if report.trajectory else None
    except InvariantViolation as exc:
        rec.update(report=None, valid=False, error=f"{type(exc).__name__}: {exc}", invariant=True)
    except RainbowError as exc:
        rec.update(report=None, valid=True, error=f"{type(exc).__name__}: {exc}")
    return rec


def _run_trial_packed(args):
    return run_trial(*args)


def summarize(cfg: CampaignConfig, trials: list[dict]) -> dict:
    outcomes = [t["report"]["outcome"] if t.get("report") else "failure" for t in trials]
    matched = [t["report"]["matched_count"] if t.get("report") else 0 for t in trials]
    n = len(trials)
    devs = [t["deviation"] for t in trials if t.get("deviation")]
    worst_size = [max((abs(x) for x in d["size_deviation"]), default=0.0) for d in devs]
    return {
        "config": cfg.as_dict(),
        "trials": n,
        "successes": outcomes.count("full"),
        "success_rate": outcomes.count("full") / n if n else 0.0,
        "mean_matched": sum(matched) / n if n else 0.0,
        "valid_rate": sum(1 for t in trials if t["valid"]) / n if n else 0.0,
        "invariant_failures": sum(1 for t in trials if t.get("invariant")),
        "deviation": {
            "mean_worst_size": sum(worst_size) / len(worst_size) if worst_size else None,
            "max_worst_size": max(worst_size) if worst_size else None,
        },
        "per_trial": [
            {
                "seed": t["seed"],
                "outcome": o,
                "matched": m,
                "valid": t["valid"],
                "error": t.get("error") or (t["report"] or {}).get("error"),
            }
            for t, o, m in zip(trials, outcomes, matched)
        ],
    }


def run_campaign(config: CampaignConfig | dict) -> tuple[dict, list[dict]]:
    """Run every trial; returns (summary, per-trial records) in trial order."""
    cfg = config if isinstance(config, CampaignConfig) else CampaignConfig.from_dict(config)
    cfg.validate()
    workers = min(worker_count(cfg.workers), cfg.trials)
    jobs = [(cfg, i) for i in range(cfg.trials)]
    if workers <= 1:
        trials = [run_trial(*j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(_run_trial_packed, jobs))
    summary = summarize(cfg, trials)
    if cfg.out_dir:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for t in trials:
            io.write_atomic(out / f"trial-{t['index']:04d}.json", canonical_json(t))
        io.write_atomic(out / "summary.json", canonical_json(summary))
    return summary, trials


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


# ----------------------------------------------------------------------
# file verification


def verify_files(graph_file, matching_file, out=None) -> int:
    """0 when the matching file is a valid rainbow matching of the graph file, else 1.

    Parse problems raise :class:`ParseError`.
    """
    g = io.read_ecg(graph_file)
    m = io.read_rmm(matching_file, g)
    ok, viol = verify_rainbow_matching(g, m)
    lines = []
    for kind, i, j in viol:
        if kind == "color-mismatch":
            lines.append(f"color-mismatch: entry {i} claims color {m.entries[i][1]}, edge has {g.ec[m.entries[i][0]]}")
        elif kind == "color":
            lines.append(f"color violation: entries {i} and {j} share color {m.entries[i][1]}")
        else:
            lines.append(f"incidence violation: entries {i} and {j} share a vertex")
    if out is not None:
        for line in lines:
            print(line, file=out)
        if ok:
            print(f"ok: rainbow matching of size {len(m)}", file=out)
    return 0 if ok else 1
