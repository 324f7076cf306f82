"""Survey administration: study definitions, durable event log, HTTP service."""

from .store import EventLog, StudyRuntime, StudyStore
from .study import (
    Panel,
    Rater,
    StudyConfig,
    StudyDefinition,
    SurveyItem,
    load_study_config,
)

__all__ = [
    "EventLog",
    "Panel",
    "Rater",
    "StudyConfig",
    "StudyDefinition",
    "StudyRuntime",
    "StudyStore",
    "SurveyItem",
    "load_study_config",
]
