import random

import pytest

from mcsched.model import CriticalityLevel, MCTask, TaskSet


@pytest.fixture
def dominance_pair() -> TaskSet:
    """Two-task set where the prior HC test fails but the improved one passes."""
    return TaskSet([
        MCTask(1, 6, 4, CriticalityLevel.HI, 1, 2),
        MCTask(2, 7, 5, CriticalityLevel.LO, 1, 1),
    ])


@pytest.fixture
def proportional_example() -> TaskSet:
    """Implicit-deadline set used for the proportionate-deadline goldens."""
    return TaskSet([
        MCTask(1, 10, 10, CriticalityLevel.LO, 4, 4),
        MCTask(2, 20, 20, CriticalityLevel.HI, 2, 3),
        MCTask(3, 20, 20, CriticalityLevel.HI, 2, 8),
        MCTask(4, 20, 20, CriticalityLevel.HI, 5, 6),
    ])


def random_taskset(rng: random.Random, n_max: int = 5, t_min: int = 5,
                   t_max: int = 30, u_max: float = 0.3,
                   p_hi: float = 0.5, tightened: bool = False) -> TaskSet:
    """Small random set with bounded per-task utilization; always valid."""
    n = rng.randint(1, n_max)
    tasks = []
    for i in range(n):
        period = rng.randint(t_min, t_max)
        wcet_lo = max(1, round(period * rng.uniform(0.02, u_max)))
        hi = rng.random() < p_hi
        deadline = rng.randint(min(max(wcet_lo, 2), period), period)
        if hi:
            wcet_hi = rng.randint(wcet_lo, max(wcet_lo, min(2 * wcet_lo + 2, deadline)))
            tight = rng.randint(wcet_lo, deadline) if tightened else deadline
        else:
            wcet_hi = wcet_lo
            tight = deadline
        tasks.append(MCTask(i, period, deadline,
                            CriticalityLevel.HI if hi else CriticalityLevel.LO,
                            wcet_lo, wcet_hi, tight))
    return TaskSet(tasks)
