"""Acceptance-ratio campaign runner.

A campaign is a grid of (l_bound, p_criticality) buckets.  Every bucket
generates sets_per_bucket task sets (deterministically from base_seed) and
evaluates each requested algorithm on the same sets, so acceptance fractions
are paired.  Results serialize to CSV/JSON plus a plot-ready TSV per
(p_criticality, deadline_mode) with one acceptance column per algorithm.
"""

from __future__ import annotations

import csv
import json
import logging
import signal
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import gen, sched_tests, sim, tighten
from .errors import BudgetExceeded, MCSchedError
from .model import TaskSet

log = logging.getLogger(__name__)

ALGORITHMS = ("ecdf", "greedy", "edfpd", "edfvd", "exhaustive-test", "exhaustive-sim")

DEFAULT_L_BOUNDS = tuple(
    Fraction(s) for s in ("0.65", "0.7", "0.75", "0.8", "0.85", "0.9", "0.95", "0.975"))
DEFAULT_P_CRITICALITIES = (0.5, 0.7)


@dataclass(frozen=True)
class CampaignConfig:
    algorithms: Tuple[str, ...] = ("ecdf", "greedy")
    l_bounds: Tuple[Fraction, ...] = DEFAULT_L_BOUNDS
    p_criticalities: Tuple[float, ...] = DEFAULT_P_CRITICALITIES
    deadline_mode: str = "full"
    sets_per_bucket: int = 500
    base_seed: int = 0
    workers: int = 1
    implicit: bool = False
    period_range: Tuple[int, int] = (5, 100)
    max_tasks: int = 64
    timeout_s: float = 30.0
    exhaustive_budget: int = 50_000

    def __post_init__(self):
        if self.sets_per_bucket < 1:
            raise ValueError("sets_per_bucket must be at least 1")
        if not self.algorithms:
            raise ValueError("algorithms must be nonempty")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}")
        object.__setattr__(self, "l_bounds",
                           tuple(gen._as_fraction(b) for b in self.l_bounds))

    @classmethod
    def from_json(cls, doc) -> "CampaignConfig":
        if isinstance(doc, str):
            doc = json.loads(doc)
        kwargs = dict(doc)
        for key in ("algorithms", "p_criticalities", "period_range"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        if "l_bounds" in kwargs:
            kwargs["l_bounds"] = tuple(gen._as_fraction(b) for b in kwargs["l_bounds"])
        return cls(**kwargs)


@dataclass(frozen=True)
class BucketResult:
    l_bound: Fraction
    p_criticality: float
    deadline_mode: str
    algorithm: str
    accepted: int
    total: int
    wall_time: float

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.accepted, self.total) if self.total else Fraction(0)


class _Timeout(Exception):
    pass


def _with_timeout(seconds: float, fn, *args):
    """Run fn under an interval timer; raises _Timeout on expiry."""
    if seconds <= 0:
        return fn(*args)

    def handler(signum, frame):
        raise _Timeout()

    old = signal.signal(signal.SIGALRM, handler)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        return fn(*args)
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def _set_seed(base_seed: int, bucket_idx: int, set_idx: int) -> int:
    ss = np.random.SeedSequence([base_seed, bucket_idx, set_idx])
    return int(ss.generate_state(1, np.uint64)[0])


def _exhaustive_sim_search(ts: TaskSet, budget: int) -> bool:
    """SIMULATION baseline: every integer assignment, every switch instant."""
    import itertools
    hi = ts.hi_tasks
    if not hi:
        return sim.exhaustive_simulation(ts).schedulable
    ids = [t.id for t in hi]
    ranges = [range(t.wcet_lo, t.deadline + 1) for t in hi]
    tried = 0
    from .model import apply_tightening
    for values in itertools.product(*ranges):
        if tried >= budget:
            raise BudgetExceeded(f"simulation search budget of {budget} spent")
        tried += 1
        cur = apply_tightening(ts, dict(zip(ids, values)))
        if sim.exhaustive_simulation(cur).schedulable:
            return True
    return False


def _evaluate(algorithm: str, ts: TaskSet, cfg: CampaignConfig,
              cache: Dict[str, bool]) -> bool:
    """Accept/reject one set under one algorithm, with memoized ecdf."""
    if algorithm == "ecdf":
        if "ecdf" not in cache:
            cache["ecdf"] = tighten.ecdf(ts).success
        return cache["ecdf"]
    if algorithm == "greedy":
        r = tighten.greedy_reconstruction(ts)
        if r.success:
            # dominance check: the accepted assignment must also pass the
            # improved test
            from .model import apply_tightening
            cur = apply_tightening(ts, r.assignment)
            if not (sched_tests.lc_test(cur).schedulable
                    and sched_tests.hc_test_improved(cur).schedulable):
                raise MCSchedError("dominance violated by a greedy assignment")
        return r.success
    if algorithm == "edfpd":
        return tighten.edfpd(ts).success
    if algorithm == "edfvd":
        return sched_tests.edfvd_test(ts).schedulable
    if algorithm == "exhaustive-test":
        # any ecdf success is itself a member of the exhaustive search space
        if "ecdf" not in cache:
            cache["ecdf"] = tighten.ecdf(ts).success
        if cache["ecdf"]:
            return True
        return tighten.exhaustive_test_search(ts, budget=cfg.exhaustive_budget).success
    if algorithm == "exhaustive-sim":
        if "exhaustive-test" not in cache:
            cache["exhaustive-test"] = _evaluate("exhaustive-test", ts, cfg, cache)
        if cache["exhaustive-test"]:
            return True  # test soundness: an accepted assignment survives simulation
        return _exhaustive_sim_search(ts, cfg.exhaustive_budget)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _bucket_algorithms(cfg: CampaignConfig) -> List[str]:
    algos = []
    for a in cfg.algorithms:
        if a in ("edfpd", "edfvd") and not cfg.implicit:
            log.warning("skipping %s: campaign generates constrained deadlines "
                        "(set implicit=true to include it)", a)
            continue
        algos.append(a)
    return algos


def _run_bucket(cfg: CampaignConfig, bucket_idx: int, l_bound: Fraction,
                p_criticality: float) -> List[BucketResult]:
    sets = []
    for set_idx in range(cfg.sets_per_bucket):
        params = gen.GenParams(
            l_bound=l_bound,
            seed=_set_seed(cfg.base_seed, bucket_idx, set_idx),
            p_criticality=p_criticality,
            deadline_mode=cfg.deadline_mode,
            implicit=cfg.implicit,
            period_range=cfg.period_range,
            max_tasks=cfg.max_tasks,
        )
        sets.append(gen.generate_taskset(params))
    caches: List[Dict[str, bool]] = [{} for _ in sets]
    results = []
    for algorithm in _bucket_algorithms(cfg):
        accepted = 0
        start = time.perf_counter()
        for ts, cache in zip(sets, caches):
            try:
                ok = _with_timeout(cfg.timeout_s, _evaluate, algorithm, ts, cfg, cache)
            except _Timeout:
                log.warning("timeout: %s on a set in bucket (%s, %s); counted rejected",
                            algorithm, l_bound, p_criticality)
                ok = False
            except BudgetExceeded as exc:
                log.warning("budget: %s; counted rejected", exc)
                ok = False
            except MCSchedError as exc:
                log.error("analysis error (%s): %s; counted rejected", algorithm, exc)
                ok = False
            cache[algorithm] = ok
            accepted += ok
        results.append(BucketResult(
            l_bound=l_bound,
            p_criticality=p_criticality,
            deadline_mode=cfg.deadline_mode,
            algorithm=algorithm,
            accepted=accepted,
            total=len(sets),
            wall_time=time.perf_counter() - start,
        ))
    return results


def run_campaign(cfg: CampaignConfig) -> List[BucketResult]:
    """Evaluate every bucket; deterministic given cfg (modulo wall_time)."""
    buckets = [(i, lb, pc)
               for i, (lb, pc) in enumerate(
                   (lb, pc) for lb in cfg.l_bounds for pc in cfg.p_criticalities)]
    if cfg.workers > 1 and len(buckets) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_run_bucket_star,
                                   [(cfg, i, lb, pc) for i, lb, pc in buckets]))
    else:
        chunks = [_run_bucket(cfg, i, lb, pc) for i, lb, pc in buckets]
    return [r for chunk in chunks for r in chunk]


def _run_bucket_star(args):
    return _run_bucket(*args)


def _fnum(value) -> str:
    return repr(float(value))


def emit_results(results: Sequence[BucketResult], fmt: str, path) -> Path:
    """Write results as CSV or JSON; CSV also gets companion plot TSVs."""
    path = Path(path)
    if fmt == "json":
        doc = [{
            "l_bound": _fnum(r.l_bound),
            "p_criticality": r.p_criticality,
            "deadline_mode": r.deadline_mode,
            "algorithm": r.algorithm,
            "accepted": r.accepted,
            "total": r.total,
            "fraction": f"{r.fraction.numerator}/{r.fraction.denominator}",
            "wall_time_s": r.wall_time,
        } for r in results]
        path.write_text(json.dumps(doc, indent=2) + "\n")
        return path
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["l_bound", "p_criticality", "deadline_mode", "algorithm",
                         "accepted", "total", "fraction", "wall_time_s"])
        for r in results:
            writer.writerow([_fnum(r.l_bound), _fnum(r.p_criticality),
                             r.deadline_mode, r.algorithm, r.accepted, r.total,
                             _fnum(r.fraction), f"{r.wall_time:.3f}"])
    emit_plot_data(results, path)
    return path


def parse_results_csv(path) -> List[BucketResult]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(BucketResult(
                l_bound=Fraction(row["l_bound"]),
                p_criticality=float(row["p_criticality"]),
                deadline_mode=row["deadline_mode"],
                algorithm=row["algorithm"],
                accepted=int(row["accepted"]),
                total=int(row["total"]),
                wall_time=float(row["wall_time_s"]),
            ))
    return out


def emit_plot_data(results: Sequence[BucketResult], base_path) -> List[Path]:
    """One TSV per (p_criticality, deadline_mode): l_bound column plus one
    acceptance-fraction column per algorithm."""
    base = Path(base_path)
    groups: Dict[Tuple[float, str], List[BucketResult]] = {}
    for r in results:
        groups.setdefault((r.p_criticality, r.deadline_mode), []).append(r)
    written = []
    for (pc, mode), rows in groups.items():
        algos = []
        for r in rows:
            if r.algorithm not in algos:
                algos.append(r.algorithm)
        table: Dict[Fraction, Dict[str, Fraction]] = {}
        for r in rows:
            table.setdefault(r.l_bound, {})[r.algorithm] = r.fraction
        out = base.with_name(f"{base.stem}.p{pc}.{mode}.plot.tsv")
        with open(out, "w") as fh:
            fh.write("\t".join(["l_bound"] + algos) + "\n")
            for lb in sorted(table):
                cells = [_fnum(lb)]
                for a in algos:
                    frac = table[lb].get(a)
                    cells.append(_fnum(frac) if frac is not None else "nan")
                fh.write("\t".join(cells) + "\n")
        written.append(out)
    return written
