"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InvalidEndpointError(ValueError):
    """A query endpoint lies strictly inside an obstacle."""


class UnreachableError(RuntimeError):
    """No obstacle-avoiding path connects the query endpoints."""


class ExpansionLimitError(ValueError):
    """Explicit expansion of a fractal stage would exceed the rectangle limit."""


class UndefinedResultError(ValueError):
    """Every sampled pair was degenerate, so the statistic is undefined."""
