"""Exception types shared across the toolkit."""


class IfallocError(Exception):
    """Base class for all toolkit errors."""


class InputError(IfallocError):
    """Malformed instance, allocation, or scenario data."""


class InfeasibleError(IfallocError):
    """The requested problem has no feasible allocation.

    Carries the offending resource (by name) and, when known, the number
    of rounds that would make the instance feasible.
    """

    def __init__(self, message: str, resource: str | None = None,
                 rounds_needed: int | None = None):
        super().__init__(message)
        self.resource = resource
        self.rounds_needed = rounds_needed


class CapacityExhaustedError(IfallocError):
    """The greedy allocator ran out of interface capacity mid-run.

    Signals the caller to retry with more rounds.
    """

    def __init__(self, message: str, service: int | None = None,
                 resource: int | None = None):
        super().__init__(message)
        self.service = service
        self.resource = resource


class SearchSpaceError(IfallocError):
    """Exhaustive enumeration was refused because the space is too large."""


class BudgetExhaustedError(IfallocError):
    """The search node budget ran out before any feasible solution was found."""
