"""Acceptance suite: one test per criterion, one pass/fail line each.

Each criterion prints `criterion N: PASS <summary>` on success; a failure
raises with the offending instance embedded, so the pytest line itself is
the fail record.  Tolerances are pinned in-line; every numeric claim is an
exact rational comparison unless noted.
"""

import random
import time
from fractions import Fraction

from mcsched import demand, gen, harness, sched_tests as st, sim, tighten
from mcsched.demand import CarryCase, Mode
from mcsched.errors import Overload
from mcsched.model import (
    CriticalityLevel,
    MCTask,
    TaskSet,
    apply_tightening,
    utilizations,
)

from conftest import random_taskset

HI = CriticalityLevel.HI
LO = CriticalityLevel.LO


def _report(n, detail):
    print(f"criterion {n}: PASS {detail}")


def test_criterion_1_dominance_worked_example():
    start = time.perf_counter()
    ts = TaskSet([MCTask(1, 6, 4, HI, 1, 2), MCTask(2, 7, 5, LO, 1, 1)])
    prior = st.hc_test_prior(ts)
    assert not prior.schedulable
    assert prior.witness == 1
    assert prior.lhs_at_witness == 2
    improved = st.hc_test_improved(ts)
    assert improved.schedulable
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _report(1, f"prior witness t=1 lhs=2, improved schedulable ({elapsed:.3f}s)")


def test_criterion_2_proportionate_deadline_example(proportional_example):
    start = time.perf_counter()
    pre = tighten.edfpd_preprocess(proportional_example)
    assert pre.x == Fraction(19, 60)
    assert pre.shares == {2: Fraction(6, 380), 3: Fraction(36, 380),
                          4: Fraction(15, 380)}
    assert pre.pd[3] == Fraction(380, 37)
    vd = st.edfvd_test(proportional_example)
    assert vd.lhs_at_witness == Fraction(23, 20)
    assert not vd.schedulable
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _report(2, f"x=19/60, shares exact, pd_3=380/37, edfvd=23/20 ({elapsed:.3f}s)")


def test_criterion_3_dominance_property():
    start = time.perf_counter()
    rng = random.Random(2024)
    total = 5000
    prior_passes = new_passes = 0
    for i in range(total):
        ts = random_taskset(rng, n_max=5, t_min=5, t_max=30, u_max=0.45,
                            tightened=True)
        improved = None
        if st.hc_test_prior(ts).schedulable:
            prior_passes += 1
            improved = st.hc_test_improved(ts)
            assert improved.schedulable, f"prior passed, improved failed: {ts}"
        if st.hc_test_new(ts).schedulable:
            new_passes += 1
            if improved is None:
                improved = st.hc_test_improved(ts)
            assert improved.schedulable, f"new passed, improved failed: {ts}"
    elapsed = time.perf_counter() - start
    assert elapsed < 600
    assert prior_passes > 100 and new_passes > 100  # nontrivial coverage
    _report(3, f"{total} instances, prior-pass {prior_passes}, "
               f"new-pass {new_passes}, zero violations ({elapsed:.1f}s)")


def test_criterion_4_test_soundness_vs_oracle():
    start = time.perf_counter()
    rng = random.Random(4040)
    total = 500
    accepted = ecdf_accepted = 0
    for i in range(total):
        ts = random_taskset(rng, n_max=5, t_min=6, t_max=20, u_max=0.4,
                            tightened=True)
        if st.lc_test(ts).schedulable and st.hc_test_improved(ts).schedulable:
            accepted += 1
            v = sim.exhaustive_simulation(ts)
            assert v.schedulable, f"oracle refuted accepted assignment: {ts}"
        base = random_taskset(rng, n_max=5, t_min=6, t_max=20, u_max=0.4)
        res = tighten.ecdf(base)
        if res.success:
            ecdf_accepted += 1
            out = apply_tightening(base, res.assignment)
            assert st.lc_test(out).schedulable
            assert st.hc_test_improved(out).schedulable
            v = sim.exhaustive_simulation(out)
            assert v.schedulable, f"oracle refuted ecdf assignment: {base} {res.assignment}"
    elapsed = time.perf_counter() - start
    assert elapsed < 900
    assert accepted > 50 and ecdf_accepted > 50
    _report(4, f"{total} instances, {accepted} direct + {ecdf_accepted} ecdf "
               f"acceptances, zero oracle misses ({elapsed:.1f}s)")


def test_criterion_5_lc_exactness():
    start = time.perf_counter()
    rng = random.Random(5050)
    total = 500
    mismatches = unschedulable = 0
    for i in range(total):
        ts = random_taskset(rng, n_max=5, t_min=6, t_max=20, u_max=0.6,
                            tightened=True)
        lc = st.lc_test(ts)
        verdict = lc.schedulable
        if not verdict:
            # demand exceeds supply by the witness, so a synchronous run
            # must miss a tight deadline at or before it
            horizon = int(lc.witness) + ts.max_deadline()
        else:
            try:
                horizon = demand.analysis_horizon(ts, Mode.LC).t_max
            except Overload:
                horizon = ts.hyperperiod()
            horizon = min(horizon, 20_000) + ts.max_deadline()
        out = sim.simulate(ts, sim.Scenario(horizon=horizon))
        sim_ok = not out.tight_deadline_misses
        if verdict != sim_ok:
            mismatches += 1
        if not verdict:
            unschedulable += 1
    elapsed = time.perf_counter() - start
    assert mismatches == 0
    assert elapsed < 300
    assert 0 < unschedulable < total  # both outcomes exercised
    _report(5, f"{total} instances, {unschedulable} unschedulable, "
               f"zero mismatches ({elapsed:.1f}s)")


def test_criterion_6_campaign_trend():
    start = time.perf_counter()
    curves = {}
    for mode in ("full", "skewed"):
        cfg = harness.CampaignConfig(
            algorithms=("ecdf", "greedy"),
            deadline_mode=mode,
            sets_per_bucket=500,
            base_seed=60,
        )
        for r in harness.run_campaign(cfg):
            curves.setdefault((r.p_criticality, mode, r.algorithm), {})[
                r.l_bound] = r.fraction
    for pc in (0.5, 0.7):
        for mode in ("full", "skewed"):
            e = curves[(pc, mode, "ecdf")]
            g = curves[(pc, mode, "greedy")]
            gaps = []
            for lb in sorted(e):
                assert e[lb] >= g[lb] - Fraction(1, 50), \
                    f"ecdf below greedy-0.02 at ({pc}, {mode}, {lb})"
                gaps.append(e[lb] - g[lb])
            nondecreasing = sum(
                1 for a, b in zip(gaps, gaps[1:]) if b >= a - Fraction(1, 50))
            assert nondecreasing >= 6, \
                f"gap widens in only {nondecreasing}/7 steps at ({pc}, {mode}): {gaps}"
    elapsed = time.perf_counter() - start
    assert elapsed < 3600
    _report(6, f"32 buckets x 500 sets, ecdf >= greedy-0.02 everywhere, "
               f"gap non-decreasing >= 6/7 per curve ({elapsed:.1f}s)")


def test_criterion_7_ecdf_vs_exhaustive_test():
    start = time.perf_counter()
    cfg = harness.CampaignConfig(
        algorithms=("ecdf", "exhaustive-test"),
        p_criticalities=(0.5,),
        sets_per_bucket=200,
        base_seed=70,
        period_range=(10, 30),
        max_tasks=6,
    )
    rows = harness.run_campaign(cfg)
    by = {}
    for r in rows:
        by.setdefault(r.l_bound, {})[r.algorithm] = r.fraction
    for lb, fr in sorted(by.items()):
        assert fr["exhaustive-test"] >= fr["ecdf"], f"exhaustive below ecdf at {lb}"
        assert fr["exhaustive-test"] - fr["ecdf"] <= Fraction(1, 20), \
            f"gap above 0.05 at {lb}: {fr}"
    elapsed = time.perf_counter() - start
    assert elapsed < 3600
    _report(7, f"8 buckets x 200 sets, 0 <= exhaustive - ecdf <= 0.05 "
               f"everywhere ({elapsed:.1f}s)")


def test_criterion_8_kernel_property_suite():
    start = time.perf_counter()
    n = 100_000

    rng = random.Random(81)
    for _ in range(n):  # dbf monotonicity, one (task, t) step per check
        period = rng.randint(2, 40)
        deadline = rng.randint(1, period)
        wcet = rng.randint(1, deadline)
        task = MCTask(0, period, deadline, LO, wcet, wcet)
        t = rng.randint(0, 4 * period)
        assert demand.dbf_lc(task, t + 1) >= demand.dbf_lc(task, t)

    rng = random.Random(82)
    for _ in range(n):  # case partition: exhaustive and exclusive
        period = rng.randint(2, 40)
        deadline = rng.randint(1, period)
        wcet_lo = rng.randint(1, deadline)
        wcet_hi = rng.randint(wcet_lo, deadline)
        tight = rng.randint(wcet_lo, deadline)
        task = MCTask(0, period, deadline, HI, wcet_lo, wcet_hi, tight)
        t2 = rng.randint(1, 120)
        t1 = rng.randint(0, t2 - 1)
        d, gap = t2 - t1, deadline - tight
        m = demand.mod_rem(d, period)
        memberships = [d <= gap,
                       d > gap and gap < m < deadline
                       and (d // period) * period + deadline <= t2]
        memberships.append(not any(memberships))
        assert sum(memberships) == 1
        assert demand.classify_case(task, t1, t2) is \
            (CarryCase.Case1, CarryCase.Case2, CarryCase.Case3)[memberships.index(True)]

    rng = random.Random(83)
    for _ in range(n):  # unnecessary-total cap <= both of its arguments
        tasks = []
        for i in range(rng.randint(1, 3)):
            period = rng.randint(4, 30)
            deadline = rng.randint(2, period)
            wcet = rng.randint(1, deadline)
            tasks.append(MCTask(i, period, deadline, LO, wcet, wcet))
        ts = TaskSet(tasks)
        t2 = rng.randint(2, 60)
        t1 = rng.randint(0, t2 - 1)
        total = st.unnecessary_total(ts, t1, t2)
        assert total <= max(t.tight_deadline for t in tasks)
        assert total <= sum(demand.dbf_unnecessary(t, t1, t2) for t in tasks)

    rng = random.Random(84)
    for _ in range(n):  # proportionate-deadline identities
        tasks = []
        for i in range(rng.randint(2, 4)):
            period = rng.randint(4, 40)
            wcet_lo = rng.randint(1, max(1, period // 4))
            hi = i == 0 or rng.random() < 0.5
            wcet_hi = rng.randint(wcet_lo, max(wcet_lo, period // 2)) if hi else wcet_lo
            tasks.append(MCTask(i, period, period,
                                HI if hi else LO, wcet_lo, wcet_hi))
        ts = TaskSet(tasks)
        u = utilizations(ts)
        slack = 1 - u.u_lo_lo - u.u_hi_lo
        if slack <= 0:
            continue
        pre = tighten.edfpd_preprocess(ts)
        if pre.degenerate:
            continue
        assert sum(pre.shares.values()) == slack
        for task in ts.hi_tasks:
            pd = pre.pd[task.id]
            # per-task demand identity behind the run-time admission rule
            assert Fraction(task.wcet_lo) / pd == task.util_lo * (
                1 + (task.util_hi - task.util_lo) / pre.x)
            assert pd <= task.period

    rng = random.Random(85)
    for _ in range(n):  # ecdf iteration bound
        ts = random_taskset(rng, n_max=2, t_min=4, t_max=12, u_max=0.5, p_hi=0.9)
        res = tighten.ecdf(ts)
        bound = sum(t.deadline - t.wcet_lo for t in ts.hi_tasks) + len(ts.hi_tasks)
        assert res.iterations <= bound, f"{res.iterations} > {bound} for {ts}"

    elapsed = time.perf_counter() - start
    assert elapsed < 600
    _report(8, f"5 properties x {n} checks, zero failures ({elapsed:.1f}s)")
