"""Exception types shared by every module."""


class WidthlabError(Exception):
    """Base class; ``kind`` is the machine-readable tag the CLI reports."""

    kind = "error"


class InvalidArgument(WidthlabError, ValueError):
    kind = "invalid-argument"


class ResourceLimit(WidthlabError, RuntimeError):
    """The requested computation exceeds the exhaustive-enumeration caps."""

    kind = "resource-limit"


class SolverFailure(WidthlabError, RuntimeError):
    """The LP backend failed for a reason other than infeasibility."""

    kind = "solver-failure"


class InternalError(WidthlabError, AssertionError):
    kind = "internal-error"
