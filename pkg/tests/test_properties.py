"""Randomized structural properties tying the fast kernels to the reference
evaluators and the tests to each other."""

import random
from fractions import Fraction

import numpy as np

from mcsched import _kernels, demand, sched_tests as st
from mcsched.demand import CarryCase, Mode
from mcsched.model import CriticalityLevel, MCTask, TaskSet

from conftest import random_taskset

HI = CriticalityLevel.HI
LO = CriticalityLevel.LO


def _sweep_lhs_max_violation(ts, lhs_fn, horizon, min_gap):
    """First (t2, t1) violation of the pure-Python pair LHS, or None."""
    for t2 in range(1, horizon + 1):
        for t1 in range(0, max(t2 - min_gap, 0)):
            if lhs_fn(ts, t1, t2) > t2:
                return t2, t1, lhs_fn(ts, t1, t2)
    return None


def test_kernels_match_reference_evaluators():
    rng = random.Random(101)
    for _ in range(60):
        ts = random_taskset(rng, n_max=4, t_max=15, u_max=0.5, tightened=True)
        try:
            horizon = demand.analysis_horizon(ts, Mode.HC).t_max
        except Exception:
            continue
        horizon = min(horizon, 60)
        arrays = _kernels.task_arrays(ts.tasks)
        if ts.hi_tasks:
            min_gap = int(min(t.deadline - t.tight_deadline for t in ts.hi_tasks))
            for kernel, lhs_fn in ((_kernels.new_hc_sweep, st.new_lhs),
                                   (_kernels.improved_hc_sweep, st.improved_lhs)):
                t2, t1, lhs = kernel(*arrays, min_gap, horizon)
                ref = _sweep_lhs_max_violation(ts, lhs_fn, horizon, min_gap)
                if ref is None:
                    assert t2 == -1
                else:
                    assert (int(t2), int(t1), int(lhs)) == ref
            hi = ts.hi_tasks
            hp, hd, ht, hl, hh, _ = _kernels.task_arrays(hi)
            t, lhs = _kernels.prior_hc_sweep(hp, hd, ht, hl, hh, horizon)
            ref_t = next((u for u in range(1, horizon + 1)
                          if st.prior_lhs(ts, u) > u), None)
            if ref_t is None:
                assert t == -1
            else:
                assert int(t) == ref_t and int(lhs) == st.prior_lhs(ts, ref_t)
        period, _, tight, wcet_lo, _, _ = arrays
        t, lhs = _kernels.lc_sweep(period, tight, wcet_lo, horizon)
        ref_t = next((u for u in range(1, horizon + 1)
                      if sum(demand.dbf_lc(task, u) for task in ts) > u), None)
        if ref_t is None:
            assert t == -1
        else:
            assert int(t) == ref_t


def test_case_partition_exhaustive_and_exclusive():
    rng = random.Random(103)
    for _ in range(5000):
        period = rng.randint(2, 30)
        deadline = rng.randint(1, period)
        wcet_lo = rng.randint(1, deadline)
        wcet_hi = rng.randint(wcet_lo, deadline)
        tight = rng.randint(wcet_lo, deadline)
        task = MCTask(0, period, deadline, HI, wcet_lo, wcet_hi, tight)
        t2 = rng.randint(1, 80)
        t1 = rng.randint(0, t2 - 1)
        case = demand.classify_case(task, t1, t2)
        d = t2 - t1
        gap = deadline - tight
        m = demand.mod_rem(d, period)
        in_case1 = d <= gap
        in_case2 = (not in_case1 and gap < m < deadline
                    and (d // period) * period + deadline <= t2)
        assert case is (CarryCase.Case1 if in_case1
                        else CarryCase.Case2 if in_case2 else CarryCase.Case3)


def test_pair_demand_upper_bound():
    # whole-window demand never exceeds releases * C^H, plus one extra C^H
    # because the conservative carry term may double-count the carry job
    rng = random.Random(107)
    for _ in range(3000):
        period = rng.randint(2, 25)
        deadline = rng.randint(1, period)
        wcet_lo = rng.randint(1, deadline)
        wcet_hi = rng.randint(wcet_lo, deadline)
        tight = rng.randint(wcet_lo, deadline)
        task = MCTask(0, period, deadline, HI, wcet_lo, wcet_hi, tight)
        t2 = rng.randint(1, 80)
        t1 = rng.randint(0, t2 - 1)
        if demand.classify_case(task, t1, t2) is CarryCase.Case1:
            continue
        lc, hc, co = demand.pair_demand(task, t1, t2)
        assert lc >= 0 and hc >= 0 and co in (wcet_lo, wcet_hi)
        assert lc + hc + co <= (t2 // period + 2) * wcet_hi


def test_unnecessary_total_le_both_arguments():
    rng = random.Random(109)
    for _ in range(400):
        ts = random_taskset(rng, tightened=True)
        t2 = rng.randint(2, 60)
        t1 = rng.randint(0, t2 - 1)
        try:
            total = st.unnecessary_total(ts, t1, t2)
        except Exception:
            continue
        contributors = [
            t for t in ts
            if not t.is_hi or demand.classify_case(t, t1, t2) is CarryCase.Case1
        ]
        if not contributors:
            assert total == 0
            continue
        assert total <= max(t.tight_deadline for t in contributors)
        assert total <= sum(demand.dbf_unnecessary(t, t1, t2) for t in contributors)


def test_prior_pass_implies_improved_pass():
    rng = random.Random(113)
    for _ in range(200):
        ts = random_taskset(rng, u_max=0.4, tightened=True)
        if st.hc_test_prior(ts).schedulable:
            assert st.hc_test_improved(ts).schedulable


def test_new_pass_implies_improved_pass():
    rng = random.Random(127)
    for _ in range(200):
        ts = random_taskset(rng, u_max=0.4, tightened=True)
        if st.hc_test_new(ts).schedulable:
            assert st.hc_test_improved(ts).schedulable


def test_improved_lhs_pointwise_below_new_lhs():
    rng = random.Random(131)
    for _ in range(300):
        ts = random_taskset(rng, tightened=True)
        if not ts.hi_tasks:
            continue
        min_gap = min(t.deadline - t.tight_deadline for t in ts.hi_tasks)
        t2 = rng.randint(min_gap + 1, min_gap + 40)
        t1 = rng.randint(0, t2 - min_gap - 1)
        assert st.improved_lhs(ts, t1, t2) <= st.new_lhs(ts, t1, t2)


def test_dominance_strict_on_reference_pair(dominance_pair):
    assert not st.hc_test_prior(dominance_pair).schedulable
    assert st.hc_test_improved(dominance_pair).schedulable


def test_tightening_preserves_lc_monotonicity():
    # tightening a deadline can only raise LC demand, never lower it
    rng = random.Random(137)
    for _ in range(300):
        period = rng.randint(2, 30)
        deadline = rng.randint(2, period)
        wcet = rng.randint(1, deadline)
        loose = MCTask(0, period, deadline, HI, wcet, wcet)
        tight = loose.with_tight_deadline(rng.randint(wcet, deadline))
        for t in range(0, 2 * period):
            assert demand.dbf_lc(tight, t) >= demand.dbf_lc(loose, t)


def test_verdict_json_shapes():
    rng = random.Random(139)
    for _ in range(40):
        ts = random_taskset(rng, u_max=0.5, tightened=True)
        for fn in (st.lc_test, st.hc_test_prior, st.hc_test_new, st.hc_test_improved):
            doc = fn(ts).to_json()
            assert set(doc) >= {"test", "schedulable", "witness", "lhs_at_witness"}
