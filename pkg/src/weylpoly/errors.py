"""Exception hierarchy shared by the library and the CLI exit codes."""


class WeylPolyError(Exception):
    """Base class for all errors raised by weylpoly."""

    exit_code = 1


class UsageError(WeylPolyError, ValueError):
    """Bad input: wrong shape, a non-vertex where a vertex is required, eta out of range."""

    exit_code = 2


class ConfigurationError(WeylPolyError, ValueError):
    """Bad setup: non-finite Cartan matrix, non-regular base point, degenerate Gram form."""

    exit_code = 2


class ConsistencyError(WeylPolyError, RuntimeError):
    """An internal self-check failed (a theorem-backed invariant did not hold)."""

    exit_code = 3

    def __init__(self, message, evidence=None):
        super().__init__(message)
        self.evidence = evidence
