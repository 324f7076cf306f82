"""Answer scales, numeric maps, and survey response records.

Numeric endpoints are fixed by the scoring convention (Q1 runs 1..4, Q2 runs
1..3, Q3 uses the severity map Critical=1..Healthy=5, Q4 runs -1..2);
interior labels are evenly spaced. Display wording can be overridden per
study, the numeric maps cannot.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from ..corpus import SeverityLevel, VariantTag


class Q1Level(Enum):
    """Perceived understanding of the sentence."""

    NOT_AT_ALL = "not_at_all"
    SOMEWHAT = "somewhat"
    MOSTLY = "mostly"
    COMPLETELY = "completely"


class Q2Level(Enum):
    """Confidence in guessing the severity."""

    NOT_AT_ALL = "not_at_all"
    LOW_CONFIDENCE = "low_confidence"
    HIGH_CONFIDENCE = "high_confidence"


class Q4Level(Enum):
    """Perceived helpfulness of the simplification."""

    FURTHER_CONFUSED = "further_confused"
    NO_HELP = "no_help"
    SOMEWHAT_BETTER = "somewhat_better"
    MUCH_BETTER = "much_better"


class Phase(Enum):
    """Which reading the layperson answers refer to."""

    ORIGINAL = "original"
    SIMPLIFIED = "simplified"
    BOTH = "both"


_Q1_NUMERIC = {
    Q1Level.NOT_AT_ALL: 1,
    Q1Level.SOMEWHAT: 2,
    Q1Level.MOSTLY: 3,
    Q1Level.COMPLETELY: 4,
}
_Q2_NUMERIC = {
    Q2Level.NOT_AT_ALL: 1,
    Q2Level.LOW_CONFIDENCE: 2,
    Q2Level.HIGH_CONFIDENCE: 3,
}
_Q3_NUMERIC = {level: level.numeric for level in SeverityLevel}
_Q4_NUMERIC = {
    Q4Level.FURTHER_CONFUSED: -1,
    Q4Level.NO_HELP: 0,
    Q4Level.SOMEWHAT_BETTER: 1,
    Q4Level.MUCH_BETTER: 2,
}


def _check_total_injective(name: str, mapping: Mapping, domain: type[Enum]) -> None:
    if set(mapping) != set(domain):
        raise ValueError(f"{name} map must cover every {domain.__name__}")
    if len(set(mapping.values())) != len(mapping):
        raise ValueError(f"{name} map must be injective")


@dataclass(frozen=True)
class AnswerMaps:
    """Total, injective label-to-number maps for the four clarity questions."""

    q1: Mapping[Q1Level, int] = field(default_factory=lambda: dict(_Q1_NUMERIC))
    q2: Mapping[Q2Level, int] = field(default_factory=lambda: dict(_Q2_NUMERIC))
    q3: Mapping[SeverityLevel, int] = field(default_factory=lambda: dict(_Q3_NUMERIC))
    q4: Mapping[Q4Level, int] = field(default_factory=lambda: dict(_Q4_NUMERIC))

    def __post_init__(self) -> None:
        _check_total_injective("q1", self.q1, Q1Level)
        _check_total_injective("q2", self.q2, Q2Level)
        _check_total_injective("q3", self.q3, SeverityLevel)
        _check_total_injective("q4", self.q4, Q4Level)


DEFAULT_ANSWER_MAPS = AnswerMaps()

DISPLAY_LABELS: dict[str, dict[str, str]] = {
    "q1": {
        "not_at_all": "Not at all",
        "somewhat": "Somewhat",
        "mostly": "Mostly",
        "completely": "Completely",
    },
    "q2": {
        "not_at_all": "Not at all",
        "low_confidence": "Low confidence",
        "high_confidence": "High confidence",
    },
    "q3": {level.value: level.label for level in SeverityLevel},
    "q4": {
        "further_confused": "Further confused",
        "no_help": "No help",
        "somewhat_better": "Somewhat better",
        "much_better": "Much better",
    },
}


@dataclass(frozen=True)
class LaypersonResponse:
    """One layperson's answers for one sentence across the three panels.

    Any answer field may be None when that panel has not been completed;
    metrics exclude missing values pairwise rather than imputing them.
    """

    rater_id: str
    sentence_id: str
    assigned_variant: VariantTag
    q1_orig: Q1Level | None = None
    q2_orig: Q2Level | None = None
    q3_orig: SeverityLevel | None = None
    q1_simp: Q1Level | None = None
    q2_simp: Q2Level | None = None
    q3_simp: SeverityLevel | None = None
    q4: Q4Level | None = None
    most_preferred: frozenset[VariantTag] = frozenset()
    least_preferred: frozenset[VariantTag] = frozenset()
    justification: str = ""

    @property
    def has_preferences(self) -> bool:
        return bool(self.most_preferred) and bool(self.least_preferred)


@dataclass(frozen=True)
class ExpertRating:
    """An expert's factuality and simplicity ratings for one simplification."""

    rater_id: str
    sentence_id: str
    variant: VariantTag
    correctness: int
    completeness: int
    hallucination: int
    structure: int
    simplicity: int
    severity: SeverityLevel
    justification: str = ""

    LIKERT_AXES = ("correctness", "completeness", "hallucination", "structure", "simplicity")

    def __post_init__(self) -> None:
        for axis in self.LIKERT_AXES:
            value = getattr(self, axis)
            if not 1 <= value <= 5:
                raise ValueError(f"{axis} must be in 1..5, got {value}")


def validate_preferences(responses) -> list[str]:
    """Flag data-entry anomalies: overlapping most/least selections."""
    warnings = []
    for resp in responses:
        overlap = resp.most_preferred & resp.least_preferred
        if overlap:
            tags = sorted(v.value for v in overlap)
            warnings.append(
                f"rater {resp.rater_id} sentence {resp.sentence_id}: "
                f"variant(s) {tags} marked both most and least preferred"
            )
    return warnings
