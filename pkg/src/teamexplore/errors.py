"""Exception types shared across the package."""


class TeamExploreError(Exception):
    """Base class for all package errors."""


class ConfigurationError(TeamExploreError, ValueError):
    """Invalid parameters or configuration values."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(TeamExploreError, ValueError):
    """An operation was called outside its domain (bad geometry, out of bounds, ...)."""


class GenerationError(TeamExploreError, RuntimeError):
    """A world generator could not satisfy its constraints."""


class ScenarioError(TeamExploreError, RuntimeError):
    """Episode setup failed, e.g. spawn poses could not be placed."""


class ExplorationComplete(TeamExploreError):
    """Raised by a planner when no exploration goal remains."""


class LogParseError(TeamExploreError, ValueError):
    """An episode log is malformed or incomplete."""
