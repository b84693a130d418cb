"""Command-line driver: ``rnm <subcommand> ...``.

Exit codes: 0 success, 1 target missed or invalid matching, 2 invalid
input, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import color_target, curves, harness, io, saturating, uniform
from .constructions import InstanceSpec, build_instance
from .errors import InputError, InvariantViolation, RainbowError, SolverFailure
from .oracle import exists_rainbow_matching, max_rainbow_matching
from .report import curve_csv, trajectory_csv

EXIT_OK, EXIT_MISSED, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _overrides(pairs) -> dict:
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise InputError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _parse_value(v.strip())
    return out


def _emit(text: str, path: str | None) -> None:
    if path:
        io.write_atomic(path, text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    spec = InstanceSpec(kind=args.kind, n=args.n, q=args.q, t=args.t, eps=args.eps,
                        delta_max=args.dmax, seed=args.seed)
    g = build_instance(spec)
    _emit(io.format_ecg(g), args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    g = io.read_ecg(args.graph)
    params = harness.make_params(args.alg, g, args.q, args.eps, args.seed, _overrides(args.set), args.dmax)
    report = harness.solve(args.alg, g, params)
    _emit(report.to_json(timing=args.timing), args.output)
    if args.matching:
        io.write_rmm(args.matching, report.matching)
    if args.traj:
        io.write_atomic(args.traj, trajectory_csv(report.trajectory))
    print(f"{report.algorithm}: {report.outcome}, {report.matched_count}/{report.target}", file=sys.stderr)
    return EXIT_OK if report.outcome == "full" else EXIT_MISSED


def cmd_oracle(args) -> int:
    g = io.read_ecg(args.graph)
    if args.k is not None:
        found = exists_rainbow_matching(g, args.k, args.budget)
        print(f"exists={found} k={args.k}")
        return EXIT_OK if found else EXIT_MISSED
    res = max_rainbow_matching(g, args.budget)
    print(f"max={res.max_size} exact={res.exact} nodes={res.explored_nodes}")
    if args.witness:
        io.write_rmm(args.witness, res.witness)
    return EXIT_OK if res.exact else EXIT_MISSED


def cmd_verify(args) -> int:
    return harness.verify_files(args.graph, args.matching, out=sys.stdout)


def cmd_traj(args) -> int:
    if args.report is None:
        if args.kind is None or args.q is None or args.eps is None:
            raise InputError("traj needs a report file, or --kind, --q and --eps for ideal curves")
        params = _curve_params(args)
        _emit(curve_csv(args.kind, params), args.output)
        return EXIT_OK
    with open(args.report) as fh:
        data = json.load(fh)
    records = [curves.TrajectoryRecord(**r) for r in data.get("trajectory", [])]
    if not records:
        raise InputError("report has no trajectory")
    _emit(trajectory_csv(records), args.output)
    summary = curves.compare(records)
    print(f"max |size deviation| {summary.max_abs_size:.4f}, flagged iterations {summary.flag_count}",
          file=sys.stderr)
    return EXIT_OK


def _curve_params(args):
    opts = {"delta": args.delta, "eta": args.eta, "error_scale": args.error_scale}
    if args.kind == "thm1":
        return uniform.default_params(args.q, args.dmax, eps=args.eps, **opts)
    if args.kind == "thm3":
        return saturating.default_params(args.q, args.eps, **opts)
    return color_target.default_params(args.q, args.eps, **opts)


def cmd_campaign(args) -> int:
    with open(args.config) as fh:
        cfg = harness.CampaignConfig.from_dict(json.load(fh))
    if args.workers is not None:
        cfg.workers = args.workers
    if args.out_dir:
        cfg.out_dir = args.out_dir
    summary, trials = harness.run_campaign(cfg)
    sys.stdout.write(harness.canonical_json({k: v for k, v in summary.items() if k != "per_trial"}))
    if summary["invariant_failures"]:
        return EXIT_INVARIANT
    return EXIT_OK if summary["successes"] == summary["trials"] else EXIT_MISSED


def cmd_accept(args) -> int:
    from . import acceptance

    results = acceptance.run_all(only=args.only, workers=args.workers)
    for r in results:
        print(r.line(), flush=True)
    return EXIT_OK if all(r.passed for r in results) else EXIT_MISSED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rnm", description="Rainbow matching nibble solvers and experiment harness.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance as .ecg")
    g.add_argument("kind", choices=[
        "cyclic-latin", "prop2-counterexample", "star-forest", "k2qm1-tight",
        "random-thm1", "random-thm3", "random-thmq"])
    g.add_argument("--n", type=int)
    g.add_argument("--q", type=int)
    g.add_argument("--t", type=int)
    g.add_argument("--eps", type=float)
    g.add_argument("--dmax", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run a nibble solver on an .ecg graph")
    s.add_argument("graph")
    s.add_argument("--alg", choices=harness.ALGORITHMS, required=True)
    s.add_argument("--q", type=int)
    s.add_argument("--eps", type=float)
    s.add_argument("--dmax", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--set", action="append", metavar="KEY=VALUE", help="parameter override (repeatable)")
    s.add_argument("-o", "--output", help="report JSON path (default stdout)")
    s.add_argument("--matching", help="write the matching as .rmm")
    s.add_argument("--traj", help="write the trajectory as CSV")
    s.add_argument("--timing", action="store_true", help="include wall_time in the report")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exact maximum rainbow matching (small graphs)")
    o.add_argument("graph")
    o.add_argument("--k", type=int, help="only decide whether a matching of size k exists")
    o.add_argument("--budget", type=int, default=10_000_000)
    o.add_argument("--witness", help="write a maximum matching as .rmm")
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="check an .rmm matching against an .ecg graph")
    v.add_argument("graph")
    v.add_argument("matching")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("traj", help="trajectory CSV from a report JSON, or ideal curves from parameters")
    t.add_argument("report", nargs="?")
    t.add_argument("--kind", choices=curves.KINDS)
    t.add_argument("--q", type=int)
    t.add_argument("--eps", type=float)
    t.add_argument("--delta", type=float)
    t.add_argument("--eta", type=float)
    t.add_argument("--dmax", type=int, default=1)
    t.add_argument("--error-scale", type=float)
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_traj)

    c = sub.add_parser("campaign", help="seeded multi-trial campaign from a JSON config")
    c.add_argument("config")
    c.add_argument("--workers", type=int)
    c.add_argument("--out-dir")
    c.set_defaults(func=cmd_campaign)

    a = sub.add_parser("accept", help="run the acceptance criteria")
    a.add_argument("--only", type=int, action="append", help="criterion number (repeatable)")
    a.add_argument("--workers", type=int)
    a.set_defaults(func=cmd_accept)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InputError, OSError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverFailure as exc:
        print(f"target missed: {exc}", file=sys.stderr)
        return EXIT_MISSED
    except RainbowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSED


if __name__ == "__main__":
    sys.exit(main())
