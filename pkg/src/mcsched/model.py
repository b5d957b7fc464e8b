"""Domain types for dual-criticality sporadic task systems.

A task is (period T, real deadline D, criticality, LC WCET, HC WCET) with a
constrained deadline (D <= T).  HI tasks additionally carry a *tightened*
deadline used while the system is in low-criticality behavior; it starts out
equal to the real deadline and is reduced by the tightening strategies.
Tightened deadlines are exact rationals so that proportionate-deadline
assignments (which are generally non-integer) are representable without
rounding; all other parameters are integers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from .errors import InvalidAssignment, InvalidTask

Rational = Union[int, Fraction]


class CriticalityLevel(Enum):
    LO = "LO"
    HI = "HI"


def _norm_rational(value) -> Rational:
    """Normalize to int when integral, Fraction otherwise."""
    if isinstance(value, bool):
        raise TypeError("boolean is not a time value")
    if isinstance(value, int):
        return value
    frac = Fraction(value)
    return int(frac) if frac.denominator == 1 else frac


def parse_rational(value) -> Rational:
    """Parse an int, float-free numeric string, or 'p/q' string."""
    if isinstance(value, str):
        return _norm_rational(Fraction(value))
    return _norm_rational(value)


def format_rational(value: Rational) -> Union[int, str]:
    value = _norm_rational(value)
    return value if isinstance(value, int) else f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class MCTask:
    """One sporadic mixed-criticality task."""

    id: int
    period: int
    deadline: int
    criticality: CriticalityLevel
    wcet_lo: int
    wcet_hi: int
    tight_deadline: Rational = None  # defaults to deadline

    def __post_init__(self):
        if self.tight_deadline is None:
            object.__setattr__(self, "tight_deadline", self.deadline)
        else:
            object.__setattr__(self, "tight_deadline", _norm_rational(self.tight_deadline))
        violations = task_violations(self)
        if violations:
            raise InvalidTask(violations)

    @property
    def util_lo(self) -> Fraction:
        return Fraction(self.wcet_lo, self.period)

    @property
    def util_hi(self) -> Fraction:
        return Fraction(self.wcet_hi, self.period)

    @property
    def is_hi(self) -> bool:
        return self.criticality is CriticalityLevel.HI

    def with_tight_deadline(self, value: Rational) -> "MCTask":
        return replace(self, tight_deadline=_norm_rational(value))


def task_violations(t: MCTask) -> list:
    """Every violated model invariant, as human-readable strings."""
    v = []
    if t.period <= 0:
        v.append(f"task {t.id}: period must be positive, got {t.period}")
    if t.deadline <= 0:
        v.append(f"task {t.id}: deadline must be positive, got {t.deadline}")
    if t.wcet_lo <= 0:
        v.append(f"task {t.id}: wcet_lo must be positive, got {t.wcet_lo}")
    if t.wcet_hi <= 0:
        v.append(f"task {t.id}: wcet_hi must be positive, got {t.wcet_hi}")
    if t.wcet_lo > t.wcet_hi:
        v.append(f"task {t.id}: wcet_lo {t.wcet_lo} exceeds wcet_hi {t.wcet_hi}")
    if t.deadline > t.period:
        v.append(f"task {t.id}: deadline {t.deadline} exceeds period {t.period}"
                 " (constrained deadlines required)")
    if t.tight_deadline is not None:
        if t.tight_deadline > t.deadline:
            v.append(f"task {t.id}: tight deadline {t.tight_deadline} exceeds "
                     f"deadline {t.deadline}")
        if t.wcet_lo > 0 and t.tight_deadline < t.wcet_lo:
            v.append(f"task {t.id}: tight deadline {t.tight_deadline} below "
                     f"wcet_lo {t.wcet_lo}")
    if t.criticality is CriticalityLevel.LO:
        if t.wcet_lo != t.wcet_hi:
            v.append(f"task {t.id}: LO task must have wcet_lo == wcet_hi")
        if t.tight_deadline is not None and t.tight_deadline != t.deadline:
            v.append(f"task {t.id}: LO task must keep tight_deadline == deadline")
    return v


def validate_task(candidate) -> MCTask:
    """Build a validated MCTask from a raw record (dict or MCTask).

    Raises InvalidTask listing *all* violated invariants, not just the first.
    """
    if isinstance(candidate, MCTask):
        return candidate
    rec = dict(candidate)
    crit = rec.get("criticality")
    if isinstance(crit, str):
        crit = CriticalityLevel[crit]
    tight = rec.get("tight_deadline")
    if tight is not None:
        tight = parse_rational(tight)
    return MCTask(
        id=int(rec["id"]),
        period=int(rec["period"]),
        deadline=int(rec["deadline"]),
        criticality=crit,
        wcet_lo=int(rec["wcet_lo"]),
        wcet_hi=int(rec["wcet_hi"]),
        tight_deadline=tight,
    )


@dataclass(frozen=True)
class TaskSet:
    """Validated, ordered collection of tasks with unique ids."""

    tasks: Tuple[MCTask, ...]

    def __init__(self, tasks: Iterable[MCTask]):
        tasks = tuple(validate_task(t) for t in tasks)
        if not tasks:
            raise InvalidTask(["task set must contain at least one task"])
        seen = set()
        for t in tasks:
            if t.id in seen:
                raise InvalidTask([f"duplicate task id {t.id}"])
            seen.add(t.id)
        object.__setattr__(self, "tasks", tasks)

    def __iter__(self):
        return iter(self.tasks)

    def __len__(self):
        return len(self.tasks)

    def by_id(self, tid: int) -> MCTask:
        for t in self.tasks:
            if t.id == tid:
                return t
        raise KeyError(tid)

    @property
    def hi_tasks(self) -> Tuple[MCTask, ...]:
        return tuple(t for t in self.tasks if t.is_hi)

    @property
    def lo_tasks(self) -> Tuple[MCTask, ...]:
        return tuple(t for t in self.tasks if not t.is_hi)

    @property
    def all_integer(self) -> bool:
        return all(isinstance(t.tight_deadline, int) for t in self.tasks)

    @property
    def implicit_deadlines(self) -> bool:
        return all(t.deadline == t.period for t in self.tasks)

    def hyperperiod(self) -> int:
        return math.lcm(*(t.period for t in self.tasks))

    def max_deadline(self) -> int:
        return max(t.deadline for t in self.tasks)

    def to_json(self) -> dict:
        return {
            "tasks": [
                {
                    "id": t.id,
                    "period": t.period,
                    "deadline": t.deadline,
                    "criticality": t.criticality.name,
                    "wcet_lo": t.wcet_lo,
                    "wcet_hi": t.wcet_hi,
                    "tight_deadline": format_rational(t.tight_deadline),
                }
                for t in self.tasks
            ]
        }

    @classmethod
    def from_json(cls, doc) -> "TaskSet":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(validate_task(rec) for rec in doc["tasks"])


@dataclass(frozen=True)
class UtilizationSummary:
    """Aggregate utilizations: LO tasks at C^L, HI tasks at C^L and C^H."""

    u_lo_lo: Fraction
    u_hi_lo: Fraction
    u_hi_hi: Fraction
    per_task: Mapping[int, Tuple[Fraction, Fraction]] = field(default_factory=dict)


def utilizations(ts: TaskSet) -> UtilizationSummary:
    """Exact rational utilization sums, split by criticality."""
    u_lo_lo = Fraction(0)
    u_hi_lo = Fraction(0)
    u_hi_hi = Fraction(0)
    per_task: Dict[int, Tuple[Fraction, Fraction]] = {}
    for t in ts:
        per_task[t.id] = (t.util_lo, t.util_hi)
        if t.is_hi:
            u_hi_lo += t.util_lo
            u_hi_hi += t.util_hi
        else:
            u_lo_lo += t.util_lo
    return UtilizationSummary(u_lo_lo, u_hi_lo, u_hi_hi, per_task)


def apply_tightening(ts: TaskSet, assignment: Mapping[int, Rational]) -> TaskSet:
    """Copy of ts with tightened deadlines replaced per assignment.

    Only HI tasks may be targeted, and values must stay in
    [wcet_lo, deadline].
    """
    new_tasks = []
    remaining = dict(assignment)
    for t in ts:
        if t.id in remaining:
            value = parse_rational(remaining.pop(t.id))
            if not t.is_hi:
                raise InvalidAssignment(f"task {t.id} is LO; its deadline is fixed")
            if value < t.wcet_lo or value > t.deadline:
                raise InvalidAssignment(
                    f"task {t.id}: tight deadline {value} outside "
                    f"[{t.wcet_lo}, {t.deadline}]")
            new_tasks.append(t.with_tight_deadline(value))
        else:
            new_tasks.append(t)
    if remaining:
        raise InvalidAssignment(f"unknown task ids {sorted(remaining)}")
    return TaskSet(new_tasks)
