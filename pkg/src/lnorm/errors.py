"""Exception types shared across the package."""


class LnormError(Exception):
    """Base class for all lnorm-specific failures."""


class InternalConsistencyError(LnormError):
    """A numerically checked inequality that provably holds was violated.

    This always indicates a bug (or broken hardware), never bad user input,
    and maps to exit code 3 in the CLI.
    """


class NoValidEpsilonError(LnormError):
    """No epsilon makes the spectral lower-bound certificate valid at this s."""
