"""Exception types shared across the package."""


class InstanceError(ValueError):
    """Invalid user input: malformed instance, bad lengths, bad bounds."""


class DisconnectedGraphError(InstanceError):
    """The edge list does not form a connected graph."""


class ConsistencyError(RuntimeError):
    """An internal self-check failed (e.g. a missed breakpoint)."""
