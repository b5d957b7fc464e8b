"""Compiled integer sweep kernels for the schedulability tests.

All task parameters must be int64 here; the wrappers in sched_tests fall
back to the exact Fraction path when tightened deadlines are rational.

With integer parameters every breakpoint of the demand expressions is an
integer, and between consecutive integers the left-hand sides are linear
with all discontinuities landing on the grid, so a dense unit-step sweep is
exact.  Kernels return the lexicographically first failing instant(s), or
(-1, ...) when every instant passes.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def lc_sweep(period, tight, wcet_lo, t_max):
    """First t in [1, t_max] where the summed LC demand exceeds t."""
    n = period.shape[0]
    for t in range(1, t_max + 1):
        lhs = 0
        for i in range(n):
            jobs = (t - tight[i]) // period[i] + 1
            if jobs > 0:
                lhs += jobs * wcet_lo[i]
        if lhs > t:
            return t, lhs
    return -1, 0


@njit(cache=True)
def prior_hc_sweep(period, deadline, tight, wcet_lo, wcet_hi, t_max):
    """Carry-set HC test: arrays hold the HI tasks only."""
    n = period.shape[0]
    for t in range(1, t_max + 1):
        lhs = 0
        for i in range(n):
            T = period[i]
            D = deadline[i]
            jobs = (t - D) // T + 1
            if jobs > 0:
                lhs += jobs * wcet_hi[i]
            m = t % T
            gap = D - tight[i]
            if D > m > gap:
                co = m - gap
                if co > wcet_lo[i]:
                    co = wcet_lo[i]
                lhs += wcet_hi[i] - wcet_lo[i] + co
        if lhs > t:
            return t, lhs
    return -1, 0


@njit(cache=True)
def new_hc_sweep(period, deadline, tight, wcet_lo, wcet_hi, is_hi, min_gap, t_max):
    """Collective-demand HC test over all (t2, t1) pairs."""
    n = period.shape[0]
    for t2 in range(1, t_max + 1):
        for t1 in range(0, t2 - min_gap):
            d = t2 - t1
            lhs = 0
            for i in range(n):
                T = period[i]
                CL = wcet_lo[i]
                DL = tight[i]
                if is_hi[i]:
                    D = deadline[i]
                    gap = D - DL
                    if d <= gap:
                        jobs = (t1 - DL) // T + 1
                        if jobs > 0:
                            lhs += jobs * CL
                        m1 = t1 % T
                        if DL > m1 and t1 - m1 + DL <= t2:
                            lhs += CL if m1 > CL else m1
                    else:
                        ff = (d - D) // T
                        lc_jobs = (t2 - D) // T - ff - 1
                        if lc_jobs > 0:
                            lhs += lc_jobs * CL
                        if ff + 1 > 0:
                            lhs += (ff + 1) * wcet_hi[i]
                        m = d % T
                        if gap < m < D and m >= D - t1:
                            lhs += wcet_hi[i]  # Case2 carry-over
                        else:
                            lhs += CL  # Case3 carry-over
                else:
                    jobs = (t1 - DL) // T + 1
                    if jobs > 0:
                        lhs += jobs * CL
                    m1 = t1 % T
                    if DL > m1 and t1 - m1 + DL <= t2:
                        lhs += CL if m1 > CL else m1
            if lhs > t2:
                return t2, t1, lhs
    return -1, -1, 0


@njit(cache=True)
def improved_hc_sweep(period, deadline, tight, wcet_lo, wcet_hi, is_hi, min_gap, t_max):
    """Improved HC test: collective unnecessary-job cap plus the t1 floor."""
    n = period.shape[0]
    for t2 in range(1, t_max + 1):
        for t1 in range(0, t2 - min_gap):
            d = t2 - t1
            sum_l = 0       # dbf^L(t1) of LO/Case1 tasks plus L2 and L3 terms
            un_sum = 0      # summed unnecessary-job demand
            un_cap = 0      # max tight deadline among unnecessary contributors
            hc_sum = 0
            case2_extra = 0
            for i in range(n):
                T = period[i]
                CL = wcet_lo[i]
                DL = tight[i]
                if is_hi[i]:
                    D = deadline[i]
                    gap = D - DL
                    if d > gap:
                        ff = (d - D) // T
                        lc_jobs = (t2 - D) // T - ff - 1
                        lcp = lc_jobs * CL if lc_jobs > 0 else 0
                        if ff + 1 > 0:
                            hc_sum += (ff + 1) * wcet_hi[i]
                        m = d % T
                        if gap < m < D and m >= D - t1:
                            co = m - gap
                            if co > CL:
                                co = CL
                            sum_l += lcp + CL - co
                            case2_extra += co + wcet_hi[i] - CL
                        else:
                            sum_l += lcp + CL
                        continue
                # LO task or HI task in Case1
                jobs = (t1 - DL) // T + 1
                if jobs > 0:
                    sum_l += jobs * CL
                if DL > un_cap:
                    un_cap = DL
                m1 = t1 % T
                if DL > m1 and t1 - m1 + DL <= t2:
                    un_sum += CL if m1 > CL else m1
            if un_sum > un_cap:
                un_sum = un_cap
            total_l = sum_l + un_sum
            if total_l > t1:
                total_l = t1
            lhs = total_l + hc_sum + case2_extra
            if lhs > t2:
                return t2, t1, lhs
    return -1, -1, 0


@njit(cache=True)
def demand_exceeds_sweep(period, eff_deadline, eff_wcet, num, den, t_max):
    """Whether sum dbf(t) > (num/den) * t for some t in [1, t_max]."""
    n = period.shape[0]
    for t in range(1, t_max + 1):
        lhs = 0
        for i in range(n):
            jobs = (t - eff_deadline[i]) // period[i] + 1
            if jobs > 0:
                lhs += jobs * eff_wcet[i]
        if lhs * den > num * t:
            return t
    return -1


def task_arrays(tasks):
    """int64 parameter arrays for the kernels (tight deadlines must be ints)."""
    period = np.array([t.period for t in tasks], dtype=np.int64)
    deadline = np.array([t.deadline for t in tasks], dtype=np.int64)
    tight = np.array([int(t.tight_deadline) for t in tasks], dtype=np.int64)
    wcet_lo = np.array([t.wcet_lo for t in tasks], dtype=np.int64)
    wcet_hi = np.array([t.wcet_hi for t in tasks], dtype=np.int64)
    is_hi = np.array([1 if t.is_hi else 0 for t in tasks], dtype=np.int64)
    return period, deadline, tight, wcet_lo, wcet_hi, is_hi
