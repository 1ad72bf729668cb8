"""Exception hierarchy shared by all modules.

The CLI maps these onto distinct exit codes, so keep the split stable:
precondition violations (bad inputs, contract breaches) vs. the flow
denominator guard vs. numerical tolerance failures.
"""


class BorelConvError(Exception):
    """Base class for all package errors."""


class PreconditionError(BorelConvError):
    """An operation was called outside its contract (bad centre, level
    beyond the horizon, path not allowed, ...)."""


class ChiGuardError(BorelConvError):
    """The flow denominator came too close to zero: the target path passes
    too close to a point of the plain sum set at the working level.  The
    caller should reroute the path or lower the level."""


class ToleranceError(BorelConvError):
    """A numerical tolerance could not be met (length identity violated,
    series step underflow, re-expansion tail too large, ...)."""
