"""Error taxonomy shared across the package.

The CLI maps these onto process exit codes: usage problems exit 1, data
problems exit 2, backend problems exit 3.
"""


class OcwcError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(OcwcError):
    """Caller misused an API: mixed backends, width mismatch, bad argument."""


class DataError(OcwcError):
    """Input data is malformed: bad CSV cell, bad file magic, bad mask."""


class BackendError(OcwcError):
    """An encrypted-bit backend is unavailable or failed mid-computation."""


class GateBudgetExceeded(BackendError):
    """A configured gate limit was hit; the computation was abandoned."""
