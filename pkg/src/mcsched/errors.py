"""Exception types shared across the toolkit."""


class MCSchedError(Exception):
    """Base class for all toolkit errors."""


class InvalidTask(MCSchedError):
    """A task record violates one or more model invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InvalidAssignment(MCSchedError):
    """A tightened-deadline assignment targets the wrong task or value."""


class NotHighCriticality(MCSchedError):
    """Operation defined only for HI tasks was applied to a LO task."""


class NotInCarrySet(MCSchedError):
    """Carry-over cap queried for a task outside the carry set."""


class WrongCase(MCSchedError):
    """Demand term queried for a task in the wrong carry case."""


class Overload(MCSchedError):
    """Utilization at or above one; the busy-period bound diverges."""


class NotImplicitDeadline(MCSchedError):
    """Operation requires implicit deadlines (D == T for every task)."""


class ZeroSlack(MCSchedError):
    """No spare low-criticality utilization; proportional split undefined."""


class BudgetExceeded(MCSchedError):
    """An exhaustive search hit its configured budget."""


class InvalidScenario(MCSchedError):
    """Simulation scenario violates sporadic release separation."""


class GenerationExhausted(MCSchedError):
    """Task-set generator spent its retry budget without hitting the load window."""
