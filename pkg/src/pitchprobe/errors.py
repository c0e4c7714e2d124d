"""Exception types shared across the package."""

from __future__ import annotations


class PitchprobeError(Exception):
    """Base class for package errors."""


class ParameterError(PitchprobeError):
    """Invalid or inconsistent configuration/argument values."""


class DataQualityError(PitchprobeError):
    """Input data unusable for analysis (e.g. silent recording)."""


class ConflictError(PitchprobeError):
    """Operation rejected by the session state machine or a concurrent writer."""


class StreamOverrunError(PitchprobeError):
    """Capture stream fell behind real time beyond the buffering budget."""
