"""Exception types shared across the package."""


class GuardError(ValueError):
    """An operation refused to run because an input exceeds its size guard."""


class RegimeError(ValueError):
    """Parameters fall outside the regime where a formula or count is defined."""


class RejectionBudgetExceeded(RuntimeError):
    """A rejection sampler used up its attempt budget without accepting."""
