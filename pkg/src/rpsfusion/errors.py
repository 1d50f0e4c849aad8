"""Exception types shared across the package.

The CLI maps these onto stable exit codes, so library code should raise
the most specific type that applies.
"""


class RpsFusionError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(RpsFusionError):
    """Input could not be decoded (malformed JSON, bad CSV cell, ...).

    Messages include row/column coordinates where they exist.
    """


class InvariantError(RpsFusionError):
    """A domain invariant or precondition was violated."""


class OverwriteError(RpsFusionError):
    """Refusing to overwrite an existing output file without force."""


class TotalConflictError(RpsFusionError):
    """Two sources are in total conflict; the combination is undefined."""

    def __init__(self, message, conflict):
        super().__init__(message)
        self.conflict = conflict
