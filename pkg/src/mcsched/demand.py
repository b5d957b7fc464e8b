"""Demand-bound-function kernels and the analysis horizon.

All functions here are pure and accept exact times (ints or Fractions).
Floor division on Fractions yields exact integer floors, so the same code
path serves both integer and rational tightened deadlines.

A HI task falls into exactly one of three carry cases for every window pair
t1 < t2 (t1 = behavior-switch instant, t2 = candidate deadline-miss instant):

  Case1  the window is too short for any HI job of the task to run after the
         switch (t2 - t1 <= D - D^L); the task behaves like a LO task.
  Case2  a carry-over job straddles the switch and still owes execution
         after it; it contributes its full HC budget.
  Case3  the carry-over job finished before the switch; it contributes only
         its LC budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .errors import NotHighCriticality, NotInCarrySet, Overload, WrongCase
from .model import MCTask, Rational, TaskSet

Mode = Enum("Mode", ["LC", "HC"])


class CarryCase(Enum):
    Case1 = 1
    Case2 = 2
    Case3 = 3


@dataclass(frozen=True)
class Horizon:
    """Sweep bound for the demand tests, with the method that produced it."""

    t_max: int
    method: str  # "utilization-bound" | "hyperperiod" | "configured"


def mod_rem(t: Rational, period: int) -> Rational:
    """Remainder of t modulo the period, in [0, period)."""
    if period <= 0:
        raise ValueError("period must be positive")
    return t - (t // period) * period


def dbf_lc(task: MCTask, t: Rational) -> Rational:
    """Max LC demand of the task in any window of length t (tight deadline)."""
    jobs = (t - task.tight_deadline) // task.period + 1
    return jobs * task.wcet_lo if jobs > 0 else 0


def dbf_hc(task: MCTask, t: Rational) -> Rational:
    """Max HC demand in any window of length t (real deadline, HC WCET)."""
    if not task.is_hi:
        raise NotHighCriticality(f"task {task.id} is LO")
    jobs = (t - task.deadline) // task.period + 1
    return jobs * task.wcet_hi if jobs > 0 else 0


def in_carry_set(task: MCTask, length: Rational) -> bool:
    """Whether the task's carry-over job can still owe work after the switch."""
    if not task.is_hi:
        return False
    m = mod_rem(length, task.period)
    return task.deadline > m > task.deadline - task.tight_deadline


def carry_over_cap(task: MCTask, length: Rational) -> Rational:
    """Max LC execution a carry-over job can still have pending at the switch."""
    if not task.is_hi:
        raise NotHighCriticality(f"task {task.id} is LO")
    if not in_carry_set(task, length):
        raise NotInCarrySet(
            f"task {task.id} has no contributing carry-over job at length {length}")
    m = mod_rem(length, task.period)
    return min(task.wcet_lo, m - (task.deadline - task.tight_deadline))


def classify_case(task: MCTask, t1: Rational, t2: Rational) -> CarryCase:
    """Partition a HI task into its carry case for the window pair (t1, t2)."""
    if not task.is_hi:
        raise NotHighCriticality(f"task {task.id} is LO")
    if t1 >= t2:
        raise ValueError("t1 must be below t2")
    d = t2 - t1
    gap = task.deadline - task.tight_deadline
    if d <= gap:
        return CarryCase.Case1
    m = mod_rem(d, task.period)
    if gap < m < task.deadline and (d // task.period) * task.period + task.deadline <= t2:
        return CarryCase.Case2
    return CarryCase.Case3


def dbf_unnecessary(task: MCTask, t1: Rational, t2: Rational) -> Rational:
    """Demand of the task's unnecessary job: released before the switch with
    tightened deadline after it, so its execution turns out wasted.

    Defined for LO tasks and for HI tasks in Case1.
    """
    if task.is_hi and classify_case(task, t1, t2) is not CarryCase.Case1:
        raise WrongCase(f"task {task.id} is not in Case1 for ({t1}, {t2})")
    m = mod_rem(t1, task.period)
    if task.tight_deadline > m and (t1 // task.period) * task.period + task.tight_deadline <= t2:
        return min(task.wcet_lo, m)
    return 0


def pair_demand(task: MCTask, t1: Rational, t2: Rational):
    """(lc_part, hc_part, co_part) of a Case2/Case3 HI task over (0, t2].

    lc_part covers jobs fully inside (0, t1], hc_part covers jobs fully inside
    (t1, t2], and co_part is the carry-over job's contribution: its HC budget
    in Case2, its LC budget in Case3.
    """
    case = classify_case(task, t1, t2)
    if case is CarryCase.Case1:
        raise WrongCase(f"task {task.id} is in Case1 for ({t1}, {t2})")
    d = t2 - t1
    T, D = task.period, task.deadline
    floor_full = (d - D) // T
    lc_jobs = (t2 - D) // T - floor_full - 1
    lc_part = lc_jobs * task.wcet_lo if lc_jobs > 0 else 0
    hc_jobs = floor_full + 1
    hc_part = hc_jobs * task.wcet_hi if hc_jobs > 0 else 0
    co_part = task.wcet_hi if case is CarryCase.Case2 else task.wcet_lo
    return lc_part, hc_part, co_part


def _busy_period_bound(pairs, util_sum: Fraction) -> Optional[int]:
    """ceil(sum (T - D_eff) * u_eff / (1 - U)); None when it diverges."""
    if util_sum >= 1:
        return None
    num = sum((Fraction(T) - deff) * u for T, deff, u in pairs)
    if num <= 0:
        return 0
    return math.ceil(num / (1 - util_sum))


def analysis_horizon(ts: TaskSet, mode: Mode, override: Optional[int] = None) -> Horizon:
    """Pseudo-polynomial sweep bound for the given behavior.

    Takes the smaller of the hyperperiod-plus-max-deadline bound and the
    standard busy-period utilization bound, floored at the largest deadline.
    Raises Overload when the mode's utilization reaches one.
    """
    max_d = ts.max_deadline()
    if override is not None:
        return Horizon(max(int(override), max_d), "configured")
    if mode is Mode.LC:
        tasks = list(ts)
        pairs = [(t.period, t.tight_deadline, t.util_lo) for t in tasks]
        util = sum(t.util_lo for t in tasks)
    else:
        tasks = list(ts.hi_tasks)
        if not tasks:
            return Horizon(max_d, "utilization-bound")
        pairs = [(t.period, t.deadline, t.util_hi) for t in tasks]
        util = sum(t.util_hi for t in tasks)
    busy = _busy_period_bound(pairs, util)
    if busy is None:
        raise Overload(f"{mode.name} utilization {util} >= 1")
    hyper = math.lcm(*(t.period for t in tasks)) + max(t.deadline for t in tasks)
    if busy <= hyper:
        return Horizon(max(busy, max_d), "utilization-bound")
    return Horizon(max(hyper, max_d), "hyperperiod")
