"""Discrete-event preemptive EDF simulator with a criticality switch.

The simulator executes one concrete scenario: a release pattern per task, an
optional switch instant t1, and a horizon.  Before t1 every job runs with its
LC budget and HI jobs are ranked by their tightened deadlines; at t1 all LO
jobs are dropped, every unfinished HI job is inflated to its HC budget and
re-ranked by its real deadline, and later HI releases start out that way.

exhaustive_simulation sweeps the synchronous release pattern over every
integer switch instant (plus the no-switch run).  This checks a necessary
condition only: a miss refutes schedulability, but absence of misses in these
scenarios does not certify the full sporadic space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import demand
from .demand import Mode
from .errors import BudgetExceeded, InvalidScenario, Overload
from .model import Rational, TaskSet
from .sched_tests import Verdict

# Fallback horizon cap when a pure-behavior utilization is at or above one.
OVERLOAD_HORIZON_CAP = 5_000


@dataclass(frozen=True)
class Scenario:
    """One concrete run: release times, optional switch instant, horizon."""

    horizon: Rational
    switch_instant: Optional[Rational] = None
    arrivals: Optional[Dict[int, Sequence[Rational]]] = None


@dataclass
class _Job:
    task_id: int
    release: Rational
    edf_deadline: Rational
    real_deadline: Rational
    tight_deadline: Rational
    remaining: Rational
    completion: Optional[Rational] = None
    dropped: bool = False


@dataclass
class SimOutcome:
    jobs: List[_Job]
    real_deadline_misses: List[Tuple[int, Rational]]
    tight_deadline_misses: List[Tuple[int, Rational]]
    switch_effective: Optional[Rational]

    @property
    def ok(self) -> bool:
        return not self.real_deadline_misses


def _releases(ts: TaskSet, sc: Scenario) -> List[_Job]:
    jobs = []
    for task in ts:
        if sc.arrivals is not None and task.id in sc.arrivals:
            times = list(sc.arrivals[task.id])
            if times and times[0] < 0:
                raise InvalidScenario(f"task {task.id}: first release before 0")
            for a, b in zip(times, times[1:]):
                if b - a < task.period:
                    raise InvalidScenario(
                        f"task {task.id}: releases {a}, {b} closer than period {task.period}")
        else:
            times = []
            r = 0
            while r < sc.horizon:
                times.append(r)
                r += task.period
        for r in times:
            if r >= sc.horizon:
                continue
            jobs.append(_Job(
                task_id=task.id,
                release=r,
                edf_deadline=r + task.tight_deadline,
                real_deadline=r + task.deadline,
                tight_deadline=r + task.tight_deadline,
                remaining=task.wcet_lo,
            ))
    jobs.sort(key=lambda j: (j.release, j.task_id))
    return jobs


def simulate(ts: TaskSet, sc: Scenario,
             stop_on_required_miss: bool = False,
             events: Optional[List[dict]] = None) -> SimOutcome:
    """Run one scenario to the horizon and report every deadline miss.

    With stop_on_required_miss the run aborts as soon as a pending job has
    passed a deadline the run-time strategy must honor; jobs still pending at
    that point show up as misses only if their own deadlines have passed.
    Pass a list as events to receive one dict per scheduling event (release,
    start, preempt, complete, drop, switch).
    """
    by_id = {t.id: t for t in ts}
    jobs = _releases(ts, sc)
    switch = sc.switch_instant
    if switch is not None and switch > sc.horizon:
        switch = None
    switched = False
    pending: List[_Job] = []
    idx = 0
    t: Rational = 0
    running: Optional[_Job] = None

    def emit(kind, at, job=None):
        if events is not None:
            rec = {"event": kind, "time": str(at)}
            if job is not None:
                rec["task"] = job.task_id
                rec["release"] = str(job.release)
            events.append(rec)

    def apply_switch():
        nonlocal switched
        switched = True
        emit("switch", switch)
        for job in pending:
            task = by_id[job.task_id]
            if task.is_hi:
                if job.remaining > 0:
                    job.remaining += task.wcet_hi - task.wcet_lo
                    job.edf_deadline = job.real_deadline
            else:
                job.dropped = True
                emit("drop", switch, job)
        pending[:] = [j for j in pending if not j.dropped]

    while True:
        if switch is not None and not switched and t >= switch:
            apply_switch()
        while idx < len(jobs) and jobs[idx].release <= t:
            job = jobs[idx]
            idx += 1
            task = by_id[job.task_id]
            if switched:
                if not task.is_hi:
                    job.dropped = True
                    emit("drop", job.release, job)
                    continue
                job.remaining = task.wcet_hi
                job.edf_deadline = job.real_deadline
            emit("release", job.release, job)
            pending.append(job)
        runnable = [j for j in pending if j.remaining > 0]
        boundaries = [sc.horizon]
        if idx < len(jobs):
            boundaries.append(jobs[idx].release)
        if switch is not None and not switched and switch > t:
            boundaries.append(switch)
        next_event = min(boundaries)
        if not runnable:
            if next_event <= t:
                break
            t = next_event
            if t >= sc.horizon:
                break
            continue
        job = min(runnable, key=lambda j: (j.edf_deadline, j.task_id))
        if job is not running:
            if running is not None and running.remaining > 0 and not running.dropped:
                emit("preempt", t, running)
            emit("start", t, job)
            running = job
        run_for = min(next_event - t, job.remaining)
        job.remaining -= run_for
        t += run_for
        if job.remaining == 0:
            job.completion = t
            pending.remove(job)
            emit("complete", t, job)
            running = None
        if t >= sc.horizon:
            break
        if stop_on_required_miss and any(
                j.remaining > 0 and j.real_deadline <= t and (
                    by_id[j.task_id].is_hi
                    or switch is None or j.real_deadline <= switch)
                for j in pending):
            break

    cutoff = min(t, sc.horizon)
    real_misses = []
    tight_misses = []
    for job in jobs:
        if job.dropped:
            continue
        if job.completion is not None:
            if job.completion > job.real_deadline and job.real_deadline <= sc.horizon:
                real_misses.append((job.task_id, job.real_deadline))
            if job.completion > job.tight_deadline and job.tight_deadline <= sc.horizon:
                tight_misses.append((job.task_id, job.tight_deadline))
        else:
            if job.real_deadline <= cutoff:
                real_misses.append((job.task_id, job.real_deadline))
            if job.tight_deadline <= cutoff:
                tight_misses.append((job.task_id, job.tight_deadline))
    return SimOutcome(jobs, real_misses, tight_misses,
                      switch if switch is not None else None)


def _oracle_horizon(ts: TaskSet) -> int:
    import math
    bounds = []
    for mode in (Mode.LC, Mode.HC):
        try:
            bounds.append(demand.analysis_horizon(ts, mode).t_max)
        except Overload:
            bounds.append(min(ts.hyperperiod() + ts.max_deadline(),
                              OVERLOAD_HORIZON_CAP))
    return int(math.ceil(max(bounds)))


def required_miss(ts: TaskSet, outcome: SimOutcome,
                  switch: Optional[Rational]) -> Optional[Tuple[int, Rational]]:
    """First miss of a deadline the run-time strategy must honor.

    HI real deadlines always count; LO real deadlines count only when they
    fall at or before the switch (afterwards LO jobs are abandoned by design).
    """
    by_id = {t.id: t for t in ts}
    for tid, dl in sorted(outcome.real_deadline_misses, key=lambda m: (m[1], m[0])):
        if by_id[tid].is_hi:
            return tid, dl
        if switch is None or dl <= switch:
            return tid, dl
    return None


def exhaustive_simulation(ts: TaskSet, horizon: Optional[int] = None,
                          budget: Optional[int] = None) -> Verdict:
    """Sweep the synchronous pattern over every integer switch instant.

    Returns a Verdict with witness = the failing switch instant (or the
    horizon sentinel -1 encoded as None note for the no-switch run).
    """
    name = "exhaustive-sim"
    h = horizon if horizon is not None else _oracle_horizon(ts)
    scenarios: List[Optional[int]] = [None] + list(range(0, h + 1))
    if budget is not None and len(scenarios) > budget:
        raise BudgetExceeded(
            f"{len(scenarios)} scenarios exceed the budget of {budget}")
    for t1 in scenarios:
        outcome = simulate(ts, Scenario(horizon=h + ts.max_deadline(),
                                        switch_instant=t1),
                           stop_on_required_miss=True)
        miss = required_miss(ts, outcome, t1)
        if miss is not None:
            tid, dl = miss
            return Verdict(False, name, witness=t1 if t1 is not None else dl,
                           lhs_at_witness=dl,
                           note="no-switch run" if t1 is None else None)
    return Verdict(True, name)
