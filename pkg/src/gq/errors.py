"""Exception hierarchy shared by the engine and the command line."""


class GQError(Exception):
    """Base class for all engine errors."""


class UsageError(GQError, ValueError):
    """Bad input: mismatched rings, wrong degrees, malformed data."""


class UnsupportedError(GQError):
    """The request is well-formed but outside what the engine computes."""


class ConditionFailed(GQError):
    """A requested structural condition does not hold.

    ``witness`` carries whatever the failing check produced, so callers
    (and the CLI report) can show it.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InternalInvariantError(GQError, AssertionError):
    """An assertion the algorithms rely on turned out false."""

    def __init__(self, message, log=None):
        super().__init__(message)
        self.log = log
