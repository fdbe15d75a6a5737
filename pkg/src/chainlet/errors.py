"""Exception taxonomy shared across the package.

The command line maps DataError to exit code 1 and UsageError to exit
code 2, so library code should pick the base class by who is at fault:
bad input data versus bad parameters.
"""


class ChainletError(Exception):
    """Base class for every error raised by this package."""


class DataError(ChainletError):
    """Input data is malformed or inconsistent."""


class UsageError(ChainletError):
    """Parameters, queries or configuration are invalid."""
