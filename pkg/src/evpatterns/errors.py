"""Exceptions shared across the package.

The CLI maps these to exit codes: ConfigError -> 1, DataError -> 2.
"""


class ConfigError(ValueError):
    """Invalid parameter, band scheme, archetype file, or other configuration."""


class DataError(ValueError):
    """Input data cannot be processed (unreadable, malformed, or empty after filtering)."""


class SchemaError(DataError):
    """A required column is missing from the input table."""
