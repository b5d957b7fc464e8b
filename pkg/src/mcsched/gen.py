"""Random task-set generation with exact system-load control.

Sampling follows the usual acceptance-ratio experiment setup: periods uniform
in a range, LC utilization uniform in [0.02, 0.25], HC WCET a uniform
multiple of the LC WCET, and deadlines uniform in either the full [C^H, T]
range or a skewed upper half.  Tasks are appended one at a time until adding
one would push the system load (in a pure LC or pure HC behavior, with
untightened deadlines) past l_bound; that task is discarded.  Sets whose
final load falls below l_bound minus the load window are rejected and
regenerated so buckets stay comparable.

All randomness flows through numpy's SeedSequence with a documented spawn
key (seed, attempt, task_index), so output is reproducible bit-exactly.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from . import _kernels
from .errors import GenerationExhausted
from .model import CriticalityLevel, MCTask, TaskSet

# Event-point cap for the exact load sweep; beyond it the tail cannot beat
# the running maximum for any generated parameterization.
LOAD_SWEEP_CAP = 200_000


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class GenParams:
    l_bound: Fraction
    seed: int
    p_criticality: float = 0.5
    period_range: Tuple[int, int] = (5, 100)
    lc_util_range: Tuple[float, float] = (0.02, 0.25)
    hc_wcet_multiplier_range: Tuple[float, float] = (2.0, 4.0)
    deadline_mode: str = "full"  # full | skewed
    implicit: bool = False  # force D = T (proportionate-deadline campaigns)
    load_window: Fraction = Fraction(1, 20)
    max_tasks: int = 64
    max_attempts: int = 500

    def __post_init__(self):
        object.__setattr__(self, "l_bound", _as_fraction(self.l_bound))
        object.__setattr__(self, "load_window", _as_fraction(self.load_window))
        if not 0 < self.l_bound <= 1:
            raise ValueError(f"l_bound must be in (0, 1], got {self.l_bound}")
        if self.deadline_mode not in ("full", "skewed"):
            raise ValueError(f"unknown deadline_mode {self.deadline_mode!r}")
        if self.period_range[0] > self.period_range[1] or self.period_range[0] < 1:
            raise ValueError(f"bad period_range {self.period_range}")
        if not 0 <= self.p_criticality <= 1:
            raise ValueError(f"p_criticality must be in [0, 1]")


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=seed, spawn_key=key)))


def generate_task(p: GenParams, rng: np.random.Generator, task_id: int) -> MCTask:
    """Draw one task; the draw order (T, u, criticality, C^H, D) is fixed."""
    t_lo, t_hi = p.period_range
    period = int(rng.integers(t_lo, t_hi + 1))
    u = rng.uniform(p.lc_util_range[0], p.lc_util_range[1])
    wcet_lo = max(1, round(period * u))
    is_hi = bool(rng.random() < p.p_criticality)
    if is_hi:
        m_lo, m_hi = p.hc_wcet_multiplier_range
        wcet_hi = int(rng.integers(math.ceil(m_lo * wcet_lo),
                                   math.floor(m_hi * wcet_lo) + 1))
        wcet_hi = max(wcet_lo, min(wcet_hi, period))
    else:
        wcet_hi = wcet_lo
    if p.implicit:
        deadline = period
    else:
        if is_hi and p.deadline_mode == "skewed":
            d_lo = math.ceil((period + wcet_hi) / 2)
        else:
            d_lo = wcet_hi
        deadline = int(rng.integers(d_lo, period + 1))
    return MCTask(
        id=task_id,
        period=period,
        deadline=deadline,
        criticality=CriticalityLevel.HI if is_hi else CriticalityLevel.LO,
        wcet_lo=wcet_lo,
        wcet_hi=wcet_hi,
    )


def _behaviors(ts: TaskSet):
    """(tasks, effective deadline, effective WCET) per pure behavior."""
    lc = [(t.period, t.deadline, t.wcet_lo) for t in ts]
    hc = [(t.period, t.deadline, t.wcet_hi) for t in ts.hi_tasks]
    return [b for b in (lc, hc) if b]


def load_exceeds(ts: TaskSet, bound: Fraction) -> bool:
    """Whether the pure-LC or pure-HC load is strictly above bound.

    Exact for integer parameters: the dense integer sweep covers every
    demand breakpoint, and the sweep horizon K/(bound - U) bounds where
    dbf(t)/t can still exceed the bound (dbf(t) <= U*t + K).
    """
    for rows in _behaviors(ts):
        util = sum(Fraction(c, T) for T, _, c in rows)
        if util > bound:
            return True
        k = sum(Fraction(c * (T - d), T) for T, d, c in rows)
        if util == bound:
            t_cap = min(math.lcm(*(T for T, _, _ in rows)) + max(d for _, d, _ in rows),
                        LOAD_SWEEP_CAP)
        else:
            if k == 0:
                continue
            t_cap = math.ceil(k / (bound - util))
        period = np.array([T for T, _, _ in rows], dtype=np.int64)
        eff_d = np.array([d for _, d, _ in rows], dtype=np.int64)
        eff_c = np.array([c for _, _, c in rows], dtype=np.int64)
        if _kernels.demand_exceeds_sweep(period, eff_d, eff_c,
                                         bound.numerator, bound.denominator,
                                         int(t_cap)) >= 0:
            return True
    return False


def system_load(ts: TaskSet) -> Fraction:
    """Exact load: max over window lengths of demand/length, both behaviors.

    Returns the behavior utilization as a sentinel when it is at least one.
    """
    best = Fraction(0)
    for rows in _behaviors(ts):
        util = sum(Fraction(c, T) for T, _, c in rows)
        if util >= 1:
            best = max(best, util)
            continue
        best = max(best, util)
        k = sum(Fraction(c * (T - d), T) for T, d, c in rows)
        if k == 0:
            continue  # implicit deadlines: the load equals the utilization
        # merged event-point sweep with a tail cut: past t, the ratio is at
        # most util + k/t, so stop once that cannot beat the running best
        heap = [(d, i) for i, (_, d, _) in enumerate(rows)]
        heapq.heapify(heap)
        while heap:
            t, i = heapq.heappop(heap)
            if t > LOAD_SWEEP_CAP:
                break
            if best > util and util + k / t <= best:
                break
            lhs = 0
            for T, d, c in rows:
                jobs = (t - d) // T + 1
                if jobs > 0:
                    lhs += jobs * c
            best = max(best, Fraction(lhs, t))
            heapq.heappush(heap, (t + rows[i][0], i))
    return best


def generate_taskset(p: GenParams) -> TaskSet:
    """Generate one set saturating l_bound; deterministic given p.seed."""
    for attempt in range(p.max_attempts):
        tasks = []
        for index in range(p.max_tasks):
            rng = _rng(p.seed, attempt, index)
            candidate = generate_task(p, rng, task_id=index)
            trial = TaskSet(tasks + [candidate])
            if load_exceeds(trial, p.l_bound):
                break
            tasks.append(candidate)
        if not tasks:
            continue
        ts = TaskSet(tasks)
        floor_bound = p.l_bound - p.load_window
        if floor_bound > 0 and not load_exceeds(ts, floor_bound):
            continue  # under the load window; regenerate
        return ts
    raise GenerationExhausted(
        f"no set within ({p.l_bound - p.load_window}, {p.l_bound}] "
        f"after {p.max_attempts} attempts (seed {p.seed})")
