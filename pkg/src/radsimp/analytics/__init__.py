"""Quantitative analyses for the two-pronged human evaluation."""

from .agreement import krippendorff_alpha, masi_distance
from .answers import (
    DEFAULT_ANSWER_MAPS,
    AnswerMaps,
    ExpertRating,
    LaypersonResponse,
    Phase,
    Q1Level,
    Q2Level,
    Q4Level,
)
from .csv_io import load_expert_csv, load_layperson_csv
from .plan import latin_square_plan
from .stats import (
    ErrorStats,
    confidence_distribution,
    confidence_strata,
    expert_aggregates,
    majority_votes,
    preference_counts,
    question_aggregates,
    severity_error,
    vote_distribution,
)

__all__ = [
    "AnswerMaps",
    "DEFAULT_ANSWER_MAPS",
    "ErrorStats",
    "ExpertRating",
    "LaypersonResponse",
    "Phase",
    "Q1Level",
    "Q2Level",
    "Q4Level",
    "confidence_distribution",
    "confidence_strata",
    "expert_aggregates",
    "krippendorff_alpha",
    "latin_square_plan",
    "load_expert_csv",
    "load_layperson_csv",
    "majority_votes",
    "masi_distance",
    "preference_counts",
    "question_aggregates",
    "severity_error",
    "vote_distribution",
]
