"""Exception hierarchy shared across the package.

Exit-code mapping for the CLI lives in `nexlab.cli`; library code raises
these and never calls sys.exit.
"""


class NexlabError(Exception):
    """Base class for all package errors."""


class DomainError(NexlabError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class ResolutionError(NexlabError):
    """A query is finer than the grid can resolve (e.g. r below one cell)."""


class ConsistencyError(NexlabError):
    """A backward orbit fails the per-step forward-consistency check.

    `index` is the first offending backward step.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class StrategyStuckError(NexlabError):
    """A backward-orbit strategy cannot choose a preimage.

    Carries the valid partial orbit built so far and the depth at which
    the strategy failed.
    """

    def __init__(self, message, partial_orbit=None, depth=None):
        super().__init__(message)
        self.partial_orbit = partial_orbit
        self.depth = depth


class ObstructionError(NexlabError):
    """A ray operation was attempted on an inadmissible angle.

    `witness` is a (critical-orbit index, point, distance) triple.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class FitError(NexlabError):
    """Not enough usable data points for a least-squares fit."""


class DerivationError(NexlabError):
    """Bisection bracket failure while deriving a parameter sequence."""


class FormatError(NexlabError):
    """A binary cache file is corrupt. `offset` is the failing byte offset."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class ConfigError(NexlabError):
    """An experiment configuration is invalid."""


class InternalInconsistencyError(NexlabError):
    """An invariant the code relies on was violated (likely a bug)."""
