"""Deadline-tightening strategies.

  ecdf                    iterative tightening driven by the improved test;
                          picks the candidate whose carry-over deadline needs
                          the smallest reduction to leave the carry set
  greedy_reconstruction   best-effort reconstruction of the classic greedy
                          search driven by the prior-art test
  edfpd                   closed-form proportionate deadlines weighted by
                          each task's criticality utilization uplift
  exhaustive_test_search  brute-force enumeration of integer assignments,
                          accepted by the improved test

All strategies return a TighteningResult; failure is a result, not an error.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Set

from . import demand, sched_tests
from .demand import CarryCase, mod_rem
from .errors import BudgetExceeded, NotImplicitDeadline, ZeroSlack
from .model import Rational, TaskSet, apply_tightening, utilizations


@dataclass
class TighteningResult:
    success: bool
    assignment: Dict[int, Rational] = field(default_factory=dict)
    iterations: int = 0
    removed_candidates: List[int] = field(default_factory=list)
    trace: Optional[List[dict]] = None

    def to_json(self) -> dict:
        from .model import format_rational
        doc = {
            "success": self.success,
            "assignment": {str(k): format_rational(v) for k, v in self.assignment.items()},
            "iterations": self.iterations,
            "removed_candidates": list(self.removed_candidates),
        }
        if self.trace is not None:
            doc["trace"] = self.trace
        return doc


def _log(trace, **kwargs):
    if trace is not None:
        trace.append(kwargs)


# ---------------------------------------------------------------------------
# ECDF

def find_candidate(ts: TaskSet, candidates: Set[int], t1: Rational, t2: Rational,
                   excess: Optional[Rational]) -> Optional[int]:
    """Case2 candidate whose carry-over job leaves the carry set soonest.

    Primary key: smallest MOD(t2-t1, T) - (D - D^L); ties by largest
    C^H - C^L, then smallest id.  When excess is given, only candidates whose
    removal covers it (C^H - C^L >= excess) qualify.
    """
    d = t2 - t1
    best = None
    best_dec = None
    best_diff = None
    for task in ts.hi_tasks:
        if task.id not in candidates:
            continue
        if demand.classify_case(task, t1, t2) is not CarryCase.Case2:
            continue
        diff = task.wcet_hi - task.wcet_lo
        if excess is not None and diff < excess:
            continue
        dec = mod_rem(d, task.period) - (task.deadline - task.tight_deadline)
        if best is None or dec < best_dec or (dec == best_dec and diff > best_diff):
            best, best_dec, best_diff = task.id, dec, diff
    return best


def ecdf(ts: TaskSet, t_max: Optional[int] = None, trace: bool = False) -> TighteningResult:
    """Earliest-carry-over-deadline-first tightening.

    Each iteration runs the LC test and the improved HC test.  An HC failure
    at (t1, t2) tightens the chosen candidate's deadline by one; an LC failure
    reverts the last tightening and retires the task.  iterations counts the
    deadline modifications, bounded by sum(D - C^L) + |HI|.
    """
    log: Optional[List[dict]] = [] if trace else None
    tight: Dict[int, Rational] = {t.id: t.tight_deadline for t in ts.hi_tasks}
    candidates: Set[int] = {t.id for t in ts.hi_tasks}
    removed: List[int] = []
    last: Optional[int] = None
    iterations = 0

    def result(success):
        return TighteningResult(success, dict(tight), iterations, removed, log)

    while True:
        cur = apply_tightening(ts, tight)
        lc = sched_tests.lc_test(cur, t_max)
        if not lc.schedulable:
            if last is None:
                _log(log, event="lc-failure", witness=str(lc.witness))
                return result(False)
            tight[last] += 1
            candidates.discard(last)
            if last not in removed:
                removed.append(last)
            iterations += 1
            _log(log, event="lc-backtrack", task=last, witness=str(lc.witness))
            last = None
            continue
        hc = sched_tests.hc_test_improved(cur, t_max)
        if hc.schedulable:
            _log(log, event="success")
            return result(True)
        t1, t2 = hc.witness
        if t1 == 0 or not candidates:
            _log(log, event="hc-failure", witness=[str(t1), str(t2)])
            return result(False)
        excess = hc.lhs_at_witness - t2
        chosen = find_candidate(cur, candidates, t1, t2, excess)
        if chosen is None:
            # no Case2 candidate covers the excess on its own; fall back to
            # the same selection without the coverage filter
            chosen = find_candidate(cur, candidates, t1, t2, None)
            _log(log, event="fallback-selection", witness=[str(t1), str(t2)])
        if chosen is None:
            _log(log, event="no-candidate", witness=[str(t1), str(t2)])
            return result(False)
        tight[chosen] -= 1
        iterations += 1
        last = chosen
        _log(log, event="tighten", task=chosen, witness=[str(t1), str(t2)],
             new_deadline=str(tight[chosen]))
        if tight[chosen] - 1 < cur.by_id(chosen).wcet_lo:
            candidates.discard(chosen)
            if chosen not in removed:
                removed.append(chosen)


# ---------------------------------------------------------------------------
# GREEDY reconstruction

def greedy_reconstruction(ts: TaskSet, t_max: Optional[int] = None,
                          trace: bool = False) -> TighteningResult:
    """Approximation of the classic greedy deadline search.

    Driven by the prior-art HC test: at the smallest failing window length,
    tighten the task whose unit decrement reduces the test's LHS the most
    (ties by smallest id).  An LC failure reverts the last change and retires
    the task; a failure with nothing to revert, or no reducing candidate,
    ends the run.
    """
    log: Optional[List[dict]] = [] if trace else None
    tight: Dict[int, Rational] = {t.id: t.tight_deadline for t in ts.hi_tasks}
    candidates: Set[int] = {t.id for t in ts.hi_tasks}
    removed: List[int] = []
    last: Optional[int] = None
    iterations = 0

    def result(success):
        return TighteningResult(success, dict(tight), iterations, removed, log)

    while True:
        cur = apply_tightening(ts, tight)
        lc = sched_tests.lc_test(cur, t_max)
        if not lc.schedulable:
            if last is None:
                _log(log, event="lc-failure", witness=str(lc.witness))
                return result(False)
            tight[last] += 1
            candidates.discard(last)
            if last not in removed:
                removed.append(last)
            iterations += 1
            _log(log, event="lc-backtrack", task=last)
            last = None
            continue
        hc = sched_tests.hc_test_prior(cur, t_max)
        if hc.schedulable:
            _log(log, event="success")
            return result(True)
        t = hc.witness
        base = sched_tests.prior_lhs(cur, t)
        chosen = None
        best_gain = 0
        for task in cur.hi_tasks:
            if task.id not in candidates or task.tight_deadline - 1 < task.wcet_lo:
                continue
            trial = apply_tightening(cur, {task.id: task.tight_deadline - 1})
            gain = base - sched_tests.prior_lhs(trial, t)
            if gain > best_gain:
                best_gain = gain
                chosen = task.id
        if chosen is None:
            _log(log, event="no-candidate", witness=str(t))
            return result(False)
        tight[chosen] -= 1
        iterations += 1
        last = chosen
        _log(log, event="tighten", task=chosen, witness=str(t),
             new_deadline=str(tight[chosen]))
        if tight[chosen] - 1 < cur.by_id(chosen).wcet_lo:
            candidates.discard(chosen)
            if chosen not in removed:
                removed.append(chosen)


# ---------------------------------------------------------------------------
# EDF-PD proportionate deadlines

@dataclass(frozen=True)
class PDResult:
    """Proportionate-deadline preprocessing output (exact rationals)."""

    x: Optional[Fraction]
    shares: Dict[int, Fraction]
    pd: Dict[int, Fraction]
    degenerate: bool = False


def edfpd_preprocess(ts: TaskSet) -> PDResult:
    """Solve for the weighting factor x and the proportionate deadlines.

    x distributes the spare LC utilization 1 - U_L^L - U_H^L among HI tasks
    in proportion to (u^H - u^L) * u^L; each HI task then gets the tightened
    deadline PD = x*T / (x + u^H - u^L).
    """
    if not ts.implicit_deadlines:
        raise NotImplicitDeadline("proportionate deadlines require D == T")
    u = utilizations(ts)
    slack = 1 - u.u_lo_lo - u.u_hi_lo
    numerator = Fraction(0)
    weights: Dict[int, Fraction] = {}
    for task in ts.hi_tasks:
        w = (task.util_hi - task.util_lo) * task.util_lo
        weights[task.id] = w
        numerator += w
    if numerator == 0:
        # every HI task has u^H == u^L; no uplift to provision for
        pd = {task.id: Fraction(task.period) for task in ts.hi_tasks}
        return PDResult(None, {tid: Fraction(0) for tid in weights}, pd, degenerate=True)
    if slack <= 0:
        raise ZeroSlack(f"spare LC utilization is {slack}; x is undefined")
    x = numerator / slack
    shares = {tid: w / x for tid, w in weights.items()}
    pd = {}
    for task in ts.hi_tasks:
        pd[task.id] = x * task.period / (x + task.util_hi - task.util_lo)
    return PDResult(x, shares, pd)


def edfpd(ts: TaskSet, t_max: Optional[int] = None, trace: bool = False) -> TighteningResult:
    """Proportionate-deadline strategy wrapper.

    Success means the closed-form deadlines are admissible (within
    [wcet_lo, deadline] for every HI task) and the resulting set passes the
    LC test; the strategy's own HC guarantee is by construction of the
    run-time scheduler and is not re-checked here.
    """
    log: Optional[List[dict]] = [] if trace else None
    pre = edfpd_preprocess(ts)
    assignment: Dict[int, Rational] = {}
    for task in ts.hi_tasks:
        value = pre.pd[task.id]
        if value < task.wcet_lo or value > task.deadline:
            _log(log, event="inadmissible", task=task.id, value=str(value))
            return TighteningResult(False, {}, 1, [], log)
        assignment[task.id] = value
    tightened = apply_tightening(ts, assignment)
    lc = sched_tests.lc_test(tightened, t_max)
    _log(log, event="lc", schedulable=lc.schedulable)
    return TighteningResult(lc.schedulable, assignment, 1, [], log)


# ---------------------------------------------------------------------------
# Exhaustive TEST search

def exhaustive_test_search(ts: TaskSet, t_max: Optional[int] = None,
                           budget: Optional[int] = None) -> TighteningResult:
    """Try every integer assignment D^L in [C^L, D] per HI task.

    Success on the lexicographically first assignment (task ids ascending,
    values ascending) that passes both the LC test and the improved HC test.
    Raises BudgetExceeded when the configured number of assignments is spent.
    """
    hi = ts.hi_tasks
    if not hi:
        lc = sched_tests.lc_test(ts, t_max)
        return TighteningResult(lc.schedulable, {}, 1, [])
    ids = [t.id for t in hi]
    ranges = [range(t.wcet_lo, t.deadline + 1) for t in hi]
    tried = 0
    for values in itertools.product(*ranges):
        if budget is not None and tried >= budget:
            raise BudgetExceeded(f"exhaustive search budget of {budget} assignments spent")
        tried += 1
        assignment = dict(zip(ids, values))
        cur = apply_tightening(ts, assignment)
        if not sched_tests.lc_test(cur, t_max).schedulable:
            continue
        if sched_tests.hc_test_improved(cur, t_max).schedulable:
            return TighteningResult(True, assignment, tried, [])
    return TighteningResult(False, {}, tried, [])


STRATEGIES = {
    "ecdf": ecdf,
    "greedy": greedy_reconstruction,
    "edfpd": edfpd,
    "exhaustive": exhaustive_test_search,
}
