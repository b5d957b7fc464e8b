"""Uniprocessor dual-criticality EDF schedulability toolkit."""

from .errors import (
    BudgetExceeded,
    GenerationExhausted,
    InvalidAssignment,
    InvalidScenario,
    InvalidTask,
    MCSchedError,
    NotHighCriticality,
    NotImplicitDeadline,
    NotInCarrySet,
    Overload,
    WrongCase,
    ZeroSlack,
)
from .model import (
    CriticalityLevel,
    MCTask,
    TaskSet,
    UtilizationSummary,
    apply_tightening,
    utilizations,
    validate_task,
)

__all__ = [
    "BudgetExceeded",
    "CriticalityLevel",
    "GenerationExhausted",
    "InvalidAssignment",
    "InvalidScenario",
    "InvalidTask",
    "MCSchedError",
    "MCTask",
    "NotHighCriticality",
    "NotImplicitDeadline",
    "NotInCarrySet",
    "Overload",
    "TaskSet",
    "UtilizationSummary",
    "WrongCase",
    "ZeroSlack",
    "apply_tightening",
    "utilizations",
    "validate_task",
]

__version__ = "0.1.0"
