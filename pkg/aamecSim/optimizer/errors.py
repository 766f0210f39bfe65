from typing import TYPE_CHECKING, Optional, Sequence

if TYPE_CHECKING:
    from .search import Solution


class OptimizerError(Exception):
    """Base class of optimizer failures."""


class MalformedInstanceError(OptimizerError, ValueError):
    """The instance violates its own structural invariants."""


class InfeasibleError(OptimizerError):
    """No assignment satisfies every constraint."""

    def __init__(self, message: str, commodities: Sequence[str] = ()):
        super().__init__(message)
        self.commodities = tuple(commodities)


class BudgetExceededError(OptimizerError):
    """The node or time budget ran out before optimality was proven."""

    def __init__(self, message: str, incumbent: Optional["Solution"] = None, gap: float = float("inf")):
        super().__init__(message)
        self.incumbent = incumbent
        self.gap = gap


class TooLargeError(OptimizerError, ValueError):
    """Exhaustive enumeration would exceed its bound."""
