"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes (domain -> 2, capacity -> 3), so library
code should raise the most specific class that applies instead of bare
ValueError/RuntimeError.
"""


class DomainError(ValueError):
    """Inputs violate a documented precondition (bad parameters, bad graph)."""


class CapacityError(RuntimeError):
    """Requested computation exceeds a configured enumeration/size limit."""


class NumericError(RuntimeError):
    """A solver failed to converge or to find a feasible value.

    Under the documented preconditions this should not happen, so it usually
    signals that the caller's parameters violate an assumption that is not
    cheaply checkable up front.
    """


class InvariantViolation(RuntimeError):
    """An internal loop invariant failed; the computation never silently continues."""
