"""Exception types shared by all modules."""


class GraphLimError(Exception):
    """Base class for errors raised by graphlim."""


class InputError(GraphLimError, ValueError):
    """Arguments violate an operation's preconditions."""


class CapacityError(GraphLimError):
    """The requested exact computation exceeds the supported size."""
