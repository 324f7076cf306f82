"""Exception hierarchy shared across the package."""
from __future__ import annotations


class RadsimpError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(RadsimpError):
    """Bad or missing configuration."""


class DataFormatError(RadsimpError):
    """A data file or payload does not match its schema."""

    def __init__(self, message: str, *, path: object = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = str(path) if path is not None else ""
        if line is not None:
            prefix = f"{prefix}:{line}" if prefix else f"line {line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class BackendError(RadsimpError):
    """A chat backend failed to produce a response."""


class ScriptExhausted(BackendError):
    """The scripted backend has no response for the current request."""


class TranscriptFinalized(RadsimpError):
    """Attempted to record a turn on a finalized transcript."""


class TemplateError(RadsimpError):
    """A prompt template is malformed (bad slots or unknown section)."""


class DegenerateText(RadsimpError):
    """Text statistics cannot support the requested readability formula."""


class AnalyticsError(RadsimpError):
    """Base class for analysis failures."""


class EmptyGroup(AnalyticsError):
    """An aggregate was requested over a group with no data."""


class InsufficientData(AnalyticsError):
    """Too few items or ratings to compute the statistic."""


class PerfectHomogeneity(AnalyticsError):
    """All labels identical: expected disagreement is zero, alpha undefined."""


class MissingExpertLabel(AnalyticsError):
    """A response references a sentence without an expert severity label."""


class SurveyError(RadsimpError):
    """Base class for survey administration failures."""


class UnknownRater(SurveyError):
    pass


class UnknownItem(SurveyError):
    pass


class OutOfSequence(SurveyError):
    """Submission for an item other than the rater's current item."""


class AlreadyAnswered(SurveyError):
    """A different event was already accepted for this (rater, item)."""


class StudyClosed(SurveyError):
    pass


class InvalidAnswers(SurveyError):
    """Submitted answers violate the panel's question schema."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
