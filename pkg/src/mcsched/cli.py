"""Command-line interface.

Subcommands: analyze, tighten, simulate, generate, campaign.  Exit code 0 on
completion, 2 on configuration errors (bad arguments, malformed inputs).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import gen, harness, sched_tests, sim, tighten
from .errors import MCSchedError
from .model import TaskSet, parse_rational

log = logging.getLogger("mcsched")

TESTS = {
    "lc": sched_tests.lc_test,
    "prior": sched_tests.hc_test_prior,
    "new": sched_tests.hc_test_new,
    "improved": sched_tests.hc_test_improved,
}


def _load_taskset(path) -> TaskSet:
    with open(path) as fh:
        return TaskSet.from_json(json.load(fh))


def cmd_analyze(args) -> int:
    ts = _load_taskset(args.input)
    verdicts = []
    if args.test == "all":
        verdicts = sched_tests.run_all(ts, args.t_max, args.integer_grid)
    elif args.test == "edfvd":
        verdicts = [sched_tests.edfvd_test(ts)]
    else:
        verdicts = [TESTS[args.test](ts, args.t_max, args.integer_grid)]
    for v in verdicts:
        print(json.dumps(v.to_json()))
    return 0


def cmd_tighten(args) -> int:
    ts = _load_taskset(args.input)
    strategy = tighten.STRATEGIES[args.strategy]
    if args.strategy == "exhaustive":
        result = strategy(ts, t_max=args.t_max)
    else:
        result = strategy(ts, t_max=args.t_max, trace=args.trace)
    if result.success:
        from .model import apply_tightening
        out = apply_tightening(ts, result.assignment)
    else:
        out = ts
    with open(args.output, "w") as fh:
        json.dump(out.to_json(), fh, indent=2)
        fh.write("\n")
    doc = result.to_json()
    if not args.trace:
        doc.pop("trace", None)
    print(json.dumps(doc))
    return 0


def cmd_simulate(args) -> int:
    ts = _load_taskset(args.input)
    if args.exhaustive:
        verdict = sim.exhaustive_simulation(ts, horizon=args.horizon)
        print(json.dumps(verdict.to_json()))
        return 0
    horizon = args.horizon
    if horizon is None:
        horizon = sim._oracle_horizon(ts) + ts.max_deadline()
    switch = parse_rational(args.switch_at) if args.switch_at is not None else None
    events = [] if args.trace else None
    outcome = sim.simulate(ts, sim.Scenario(horizon=horizon, switch_instant=switch),
                           events=events)
    if args.trace:
        with open(args.trace, "w") as fh:
            for rec in events:
                fh.write(json.dumps(rec) + "\n")
    print(json.dumps({
        "jobs": len(outcome.jobs),
        "real_deadline_misses": [[tid, str(dl)] for tid, dl in outcome.real_deadline_misses],
        "tight_deadline_misses": [[tid, str(dl)] for tid, dl in outcome.tight_deadline_misses],
        "switch_effective": None if outcome.switch_effective is None
        else str(outcome.switch_effective),
    }))
    return 0


def cmd_generate(args) -> int:
    with open(args.params) as fh:
        doc = json.load(fh)
    for key in ("period_range", "lc_util_range", "hc_wcet_multiplier_range"):
        if key in doc:
            doc[key] = tuple(doc[key])
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    base_seed = doc.pop("seed", 0)
    for i in range(args.count):
        params = gen.GenParams(seed=base_seed + i, **doc)
        ts = gen.generate_taskset(params)
        path = out_dir / f"taskset_{base_seed + i}.json"
        with open(path, "w") as fh:
            json.dump(ts.to_json(), fh, indent=2)
            fh.write("\n")
        print(str(path))
    return 0


def cmd_campaign(args) -> int:
    with open(args.config) as fh:
        cfg = harness.CampaignConfig.from_json(json.load(fh))
    workers = os.environ.get("MCS_WORKERS")
    if workers is not None:
        import dataclasses
        cfg = dataclasses.replace(cfg, workers=int(workers))
    results = harness.run_campaign(cfg)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    harness.emit_results(results, "csv", out_dir / "results.csv")
    harness.emit_results(results, "json", out_dir / "results.json")
    print(str(out_dir / "results.csv"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcsched",
        description="Schedulability toolkit for dual-criticality EDF systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run schedulability tests on a task set")
    p.add_argument("--test", choices=["lc", "prior", "new", "improved", "edfvd", "all"],
                   default="all")
    p.add_argument("--input", required=True)
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--integer-grid", action="store_true",
                   help="force a unit-step sweep (cross-checking aid)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("tighten", help="assign tightened deadlines")
    p.add_argument("--strategy", choices=sorted(tighten.STRATEGIES), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_tighten)

    p = sub.add_parser("simulate", help="run the EDF simulator")
    p.add_argument("--input", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--switch-at", default=None, metavar="T1")
    g.add_argument("--exhaustive", action="store_true")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--trace", default=None, metavar="OUT_JSONL")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("generate", help="generate random task sets")
    p.add_argument("--params", required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("campaign", help="run an acceptance-ratio campaign")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_campaign)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (MCSchedError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
