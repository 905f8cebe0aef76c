"""Exception taxonomy shared across the workbench."""


class WorkbenchError(Exception):
    """Base class for all workbench failures."""


class ConfigError(WorkbenchError, ValueError):
    """Invalid configuration: bad rank, malformed word syntax, bad spec."""


class UsageError(WorkbenchError, ValueError):
    """Structurally valid objects used incorrectly (rank mismatch, arity, range)."""


class ResourceCapError(WorkbenchError, RuntimeError):
    """An enumeration would exceed the configured cap."""
