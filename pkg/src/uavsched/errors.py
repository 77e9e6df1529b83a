"""Exception types shared across the package."""


class UavschedError(Exception):
    """Base class for all package-specific errors."""


class ParseError(UavschedError):
    """A map or task document is malformed."""


class TopologyError(UavschedError):
    """A position cannot reach / be reached from any recharge station."""


class UnknownPosition(UavschedError):
    pass


class UnknownTask(UavschedError):
    pass


class UnknownUAV(UavschedError):
    pass


class DanglingPredecessor(ParseError):
    """A task references a predecessor id that does not exist."""


class CyclicPrecedence(ParseError):
    """The precedence digraph contains a cycle."""


class RedundantPrecedence(ParseError):
    """A direct precedence edge is already implied transitively."""


class InvalidWindow(ParseError):
    """release + processing exceeds the due date."""


class NoTimeWindow(UavschedError):
    """Operation requires a time-windowed task."""


class GenerationFailure(UavschedError):
    """Dataset generator exhausted its retry budget."""


class ConfigError(UavschedError):
    pass


class OverlapViolation(UavschedError):
    """A committed occupation fragment overlaps an existing one."""


class InvalidSequence(UavschedError):
    """The task sequence is not a permutation of the task set."""


class MalformedSchedule(UavschedError):
    """A schedule document references unknown entities or is inconsistent."""


class InfeasibleEnergy(UavschedError):
    """Gap structure cannot keep the battery above its reserve."""


class LimitExceeded(UavschedError):
    """Instance is larger than the exhaustive optimizer allows."""


class NoFeasibleFound(UavschedError):
    """Every particle of the swarm ended infeasible."""
