"""
Shared error types for the treesegnet pipeline.

Data problems are ValidationErrors carrying a machine-readable code, so the
management commands can report them as ``kind[code]: message`` lines.
"""

from django.core.exceptions import ValidationError


class DataError(ValidationError):
    """Input data violates a documented precondition."""

    default_code = 'data'

    def __init__(self, message, code=None, params=None):
        super().__init__(message, code=code or self.default_code, params=params)

    def __str__(self):
        return '; '.join(self.messages)


class ShapeError(DataError):
    """Array shapes or dimensions do not match."""

    default_code = 'shape_mismatch'


class LabelError(DataError):
    """A class label is outside the valid range."""

    default_code = 'label_range'


class FormatError(DataError):
    """A file or text document is malformed."""

    default_code = 'format'

    def __init__(self, message, position=None, code=None):
        self.position = position
        if position is not None:
            message = f'{message} (at {position})'
        super().__init__(message, code=code)


class GraphError(DataError):
    """A confusion graph cannot be processed."""

    default_code = 'graph'


class CheckpointError(DataError):
    """A checkpoint file is corrupt or from another format version."""

    default_code = 'checkpoint'


class ConfigError(DataError):
    """A run configuration is invalid."""

    default_code = 'config'


class InvariantViolation(Exception):
    """An internal invariant does not hold."""
