"""Study definitions: rosters, assignment plans, item sequencing, validation.

A layperson works through three panels per sentence, in order: questions
about the original sentence alone, the same questions with the assigned
simplification shown (plus a helpfulness question), then a preference panel
listing all four simplifications in a per-rater randomized order. Middle
panel questions are asked only for the one assigned variant. Experts rate
every (sentence, simplification) pair, blinded to the variant tag; the
blind mapping is recorded and exported.

All randomization derives from the study seed, so item sequences are stable
across restarts.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, Sequence

from ..analytics.answers import DISPLAY_LABELS
from ..analytics.plan import latin_square_plan
from ..corpus import (
    ALL_VARIANTS,
    RadiologySentence,
    SeverityLevel,
    SimplificationRecord,
    VariantTag,
    group_by_sentence,
    load_corpus,
    load_simplifications,
    verify_referential_integrity,
)
from ..errors import ConfigError, InvalidAnswers

ROLES = ("layperson", "expert")

SEVERITY_RUBRIC: dict[SeverityLevel, str] = {
    SeverityLevel.CRITICAL: (
        "Describes a medical condition that poses a threat to a person's "
        "life. A critical condition requires urgent care and close monitoring."
    ),
    SeverityLevel.SERIOUS: (
        "Describes a condition that requires medical attention but is not "
        "immediately life-threatening. Treatment may involve hospitalization, "
        "medication, or other interventions."
    ),
    SeverityLevel.MODERATE: (
        "Describes a condition that is not severe but may require medical "
        "attention and treatment. The condition may cause discomfort or "
        "affect a person's ability to carry out normal activities."
    ),
    SeverityLevel.MILD: (
        "Describes a condition that is not serious. The condition may cause "
        "minor discomfort or inconvenience but is unlikely to have a "
        "significant impact on a person's overall health."
    ),
    SeverityLevel.HEALTHY: (
        "Findings that are considered normal or benign with no significant "
        "abnormalities."
    ),
}

DEFAULT_PROMPTS = {
    "q1": "Do you think you understand the sentence?",
    "q2": "Can you guess the severity of the described condition?",
    "q3": "What is the severity of the described condition?",
    "q4": "Does the simplification help you understand the original sentence?",
    "most": "Which simplification(s) do you like the most?",
    "least": "Which simplification(s) do you like the least?",
    "justification": "Why? Briefly explain your selections.",
    "correctness": "Does the simplification correctly interpret the information in the original sentence?",
    "completeness": "Does the simplification retain all critical information from the original sentence?",
    "hallucination": "Is the simplification free of added statements or information not supported by the original sentence?",
    "structure": "Does the simplification mention the relevant body parts, findings, and consequences?",
    "simplicity": "Do you think laypeople can understand the sentence?",
    "severity": "What is the severity of the described condition?",
    "expert_justification": "Optional justification for your ratings.",
}


class Panel(Enum):
    LAY_ORIGINAL = "lay_original"
    LAY_SIMPLIFIED = "lay_simplified"
    LAY_PREFERENCE = "lay_preference"
    EXPERT_RATING = "expert_rating"


class StudyState(Enum):
    DRAFT = "draft"
    OPEN = "open"
    CLOSED = "closed"


@dataclass(frozen=True)
class Rater:
    id: str
    role: str
    token: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ConfigError(f"rater role must be one of {ROLES}, got {self.role!r}")
        if not self.id or not self.token:
            raise ConfigError("rater id and token must be non-empty")


@dataclass(frozen=True)
class StudyConfig:
    study_id: str
    corpus_path: Path
    simplifications_path: Path
    raters: tuple[Rater, ...]
    seed: int = 0
    state: StudyState = StudyState.OPEN
    admin_token: str | None = None
    labels: Mapping[str, Mapping[str, str]] = field(default_factory=dict)
    prompts: Mapping[str, str] = field(default_factory=dict)


def load_study_config(path: str | Path) -> StudyConfig:
    """Read a study config file; relative data paths resolve against its directory."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from exc
    for key in ("study_id", "corpus", "simplifications", "raters"):
        if key not in obj:
            raise ConfigError(f"{path}: missing required key {key!r}")
    raters = tuple(
        Rater(id=r.get("id", ""), role=r.get("role", ""), token=r.get("token", ""))
        for r in obj["raters"]
    )
    if not raters:
        raise ConfigError(f"{path}: roster is empty")
    if len({r.id for r in raters}) != len(raters):
        raise ConfigError(f"{path}: duplicate rater ids")
    if len({r.token for r in raters}) != len(raters):
        raise ConfigError(f"{path}: duplicate rater tokens")
    base = path.parent
    return StudyConfig(
        study_id=obj["study_id"],
        corpus_path=(base / obj["corpus"]).resolve(),
        simplifications_path=(base / obj["simplifications"]).resolve(),
        raters=raters,
        seed=int(obj.get("seed", 0)),
        state=StudyState(obj.get("state", "open")),
        admin_token=obj.get("admin_token"),
        labels=obj.get("labels", {}),
        prompts=obj.get("prompts", {}),
    )


@dataclass(frozen=True)
class SurveyItem:
    """One unit of work served to a rater."""

    item_id: str
    rater_id: str
    panel: Panel
    sentence_id: str
    sentence_text: str
    simplification_text: str | None = None
    candidates: tuple[tuple[str, str], ...] | None = None  # (key, text) in blind order
    variant: VariantTag | None = None  # internal; never serialized to raters


def _likert_options() -> list[dict]:
    return [{"value": str(i), "label": str(i), "numeric": i} for i in range(1, 6)]


class StudyDefinition:
    """Immutable derived state of a study: plans, blind orders, item sequences."""

    def __init__(
        self,
        config: StudyConfig,
        sentences: Sequence[RadiologySentence],
        records: Sequence[SimplificationRecord],
    ):
        self.config = config
        self.sentences = list(sentences)
        self.sentence_by_id = {s.id: s for s in self.sentences}
        verify_referential_integrity(records, sentences)
        self.simplifications = group_by_sentence(records)
        missing = [
            s.id
            for s in self.sentences
            if set(self.simplifications.get(s.id, {})) != set(ALL_VARIANTS)
        ]
        if missing:
            raise ConfigError(
                f"sentences missing a complete variant set: {missing}"
            )

        self.laypeople = [r for r in config.raters if r.role == "layperson"]
        self.experts = [r for r in config.raters if r.role == "expert"]
        self.by_token = {r.token: r for r in config.raters}

        sentence_ids = [s.id for s in self.sentences]
        raw_plan = latin_square_plan(
            max(len(self.laypeople), 1), sentence_ids, ALL_VARIANTS
        )
        self.plan: dict[str, dict[str, VariantTag]] = {
            rater.id: {sid: raw_plan[(idx, sid)] for sid in sentence_ids}
            for idx, rater in enumerate(self.laypeople)
        }
        self.preference_order: dict[str, dict[str, list[VariantTag]]] = {}
        for rater in self.laypeople:
            orders = {}
            for sid in sentence_ids:
                rng = random.Random(f"{config.seed}:pref:{rater.id}:{sid}")
                order = list(ALL_VARIANTS)
                rng.shuffle(order)
                orders[sid] = order
            self.preference_order[rater.id] = orders
        self.expert_order: dict[str, dict[str, list[VariantTag]]] = {}
        for rater in self.experts:
            orders = {}
            for sid in sentence_ids:
                rng = random.Random(f"{config.seed}:expert:{rater.id}:{sid}")
                order = list(ALL_VARIANTS)
                rng.shuffle(order)
                orders[sid] = order
            self.expert_order[rater.id] = orders

        self._items: dict[str, list[SurveyItem]] = {
            rater.id: self._build_items(rater) for rater in config.raters
        }

    def _build_items(self, rater: Rater) -> list[SurveyItem]:
        items: list[SurveyItem] = []
        if rater.role == "layperson":
            for sentence in self.sentences:
                sid = sentence.id
                assigned = self.plan[rater.id][sid]
                items.append(
                    SurveyItem(
                        item_id=f"{rater.id}:{sid}:original",
                        rater_id=rater.id,
                        panel=Panel.LAY_ORIGINAL,
                        sentence_id=sid,
                        sentence_text=sentence.text,
                    )
                )
                items.append(
                    SurveyItem(
                        item_id=f"{rater.id}:{sid}:simplified",
                        rater_id=rater.id,
                        panel=Panel.LAY_SIMPLIFIED,
                        sentence_id=sid,
                        sentence_text=sentence.text,
                        simplification_text=self.simplifications[sid][assigned].text,
                        variant=assigned,
                    )
                )
                order = self.preference_order[rater.id][sid]
                candidates = tuple(
                    (str(i + 1), self.simplifications[sid][variant].text)
                    for i, variant in enumerate(order)
                )
                items.append(
                    SurveyItem(
                        item_id=f"{rater.id}:{sid}:preference",
                        rater_id=rater.id,
                        panel=Panel.LAY_PREFERENCE,
                        sentence_id=sid,
                        sentence_text=sentence.text,
                        candidates=candidates,
                    )
                )
        else:
            for sentence in self.sentences:
                sid = sentence.id
                for i, variant in enumerate(self.expert_order[rater.id][sid]):
                    items.append(
                        SurveyItem(
                            item_id=f"{rater.id}:{sid}:cand{i + 1}",
                            rater_id=rater.id,
                            panel=Panel.EXPERT_RATING,
                            sentence_id=sid,
                            sentence_text=sentence.text,
                            simplification_text=self.simplifications[sid][variant].text,
                            variant=variant,
                        )
                    )
        return items

    def items_for(self, rater_id: str) -> list[SurveyItem]:
        return self._items[rater_id]

    def item(self, rater_id: str, item_id: str) -> SurveyItem | None:
        for item in self._items.get(rater_id, []):
            if item.item_id == item_id:
                return item
        return None

    def expert_item_map(self) -> dict[str, dict[str, str]]:
        """Blind-order mapping recorded in exports: item_id -> sentence/variant."""
        mapping = {}
        for rater in self.experts:
            for item in self._items[rater.id]:
                mapping[item.item_id] = {
                    "sentence_id": item.sentence_id,
                    "variant": item.variant.value,
                }
        return mapping

    # Question schemas -----------------------------------------------------

    def _label(self, scale: str, value: str) -> str:
        override = self.config.labels.get(scale, {})
        return override.get(value, DISPLAY_LABELS[scale][value])

    def _prompt(self, key: str) -> str:
        return self.config.prompts.get(key, DEFAULT_PROMPTS[key])

    def _scale_options(self, scale: str, order: Sequence[str]) -> list[dict]:
        numeric = {
            "q1": {"not_at_all": 1, "somewhat": 2, "mostly": 3, "completely": 4},
            "q2": {"not_at_all": 1, "low_confidence": 2, "high_confidence": 3},
            "q3": {level.value: level.numeric for level in SeverityLevel},
            "q4": {"further_confused": -1, "no_help": 0, "somewhat_better": 1, "much_better": 2},
        }[scale]
        return [
            {"value": value, "label": self._label(scale, value), "numeric": numeric[value]}
            for value in order
        ]

    def questions_for(self, item: SurveyItem) -> list[dict]:
        q1 = {
            "id": "q1",
            "prompt": self._prompt("q1"),
            "kind": "single_choice",
            "required": True,
            "options": self._scale_options(
                "q1", ["not_at_all", "somewhat", "mostly", "completely"]
            ),
        }
        q2 = {
            "id": "q2",
            "prompt": self._prompt("q2"),
            "kind": "single_choice",
            "required": True,
            "options": self._scale_options(
                "q2", ["not_at_all", "low_confidence", "high_confidence"]
            ),
        }
        q3 = {
            "id": "q3",
            "prompt": self._prompt("q3"),
            "kind": "single_choice",
            "required": True,
            "options": self._scale_options("q3", [level.value for level in SeverityLevel]),
        }
        if item.panel is Panel.LAY_ORIGINAL:
            return [q1, q2, q3]
        if item.panel is Panel.LAY_SIMPLIFIED:
            q4 = {
                "id": "q4",
                "prompt": self._prompt("q4"),
                "kind": "single_choice",
                "required": True,
                "options": self._scale_options(
                    "q4", ["further_confused", "no_help", "somewhat_better", "much_better"]
                ),
            }
            return [q1, q2, q3, q4]
        if item.panel is Panel.LAY_PREFERENCE:
            options = [
                {"value": key, "label": f"Simplification {key}", "numeric": None}
                for key, _text in item.candidates or ()
            ]
            return [
                {
                    "id": "most",
                    "prompt": self._prompt("most"),
                    "kind": "multi_choice",
                    "required": True,
                    "options": options,
                },
                {
                    "id": "least",
                    "prompt": self._prompt("least"),
                    "kind": "multi_choice",
                    "required": True,
                    "options": options,
                },
                {
                    "id": "justification",
                    "prompt": self._prompt("justification"),
                    "kind": "text",
                    "required": False,
                    "options": [],
                },
            ]
        questions = [
            {
                "id": axis,
                "prompt": self._prompt(axis),
                "kind": "likert",
                "required": True,
                "options": _likert_options(),
            }
            for axis in ("correctness", "completeness", "hallucination", "structure", "simplicity")
        ]
        questions.append(q3 | {"id": "severity", "prompt": self._prompt("severity")})
        questions.append(
            {
                "id": "justification",
                "prompt": self._prompt("expert_justification"),
                "kind": "text",
                "required": False,
                "options": [],
            }
        )
        return questions

    def severity_rubric(self) -> list[dict]:
        return [
            {
                "level": level.value,
                "label": self._label("q3", level.value),
                "description": SEVERITY_RUBRIC[level],
            }
            for level in SeverityLevel
        ]

    def validate_answers(self, item: SurveyItem, answers: Mapping[str, Any]) -> dict[str, Any]:
        """Check answers against the item's question schema; return them normalized."""
        questions = {q["id"]: q for q in self.questions_for(item)}
        unknown = set(answers) - set(questions)
        if unknown:
            raise InvalidAnswers(sorted(unknown)[0], "not a question on this panel")
        normalized: dict[str, Any] = {}
        for qid, question in questions.items():
            value = answers.get(qid)
            if value is None:
                if question["required"]:
                    raise InvalidAnswers(qid, "answer required")
                normalized[qid] = "" if question["kind"] == "text" else None
                continue
            kind = question["kind"]
            if kind == "single_choice":
                valid = {opt["value"] for opt in question["options"]}
                if not isinstance(value, str) or value not in valid:
                    raise InvalidAnswers(qid, f"must be one of {sorted(valid)}")
                normalized[qid] = value
            elif kind == "likert":
                if isinstance(value, bool) or not isinstance(value, int) or not 1 <= value <= 5:
                    raise InvalidAnswers(qid, "must be an integer in 1..5")
                normalized[qid] = value
            elif kind == "multi_choice":
                valid = {opt["value"] for opt in question["options"]}
                if not isinstance(value, list) or not value:
                    raise InvalidAnswers(qid, "select at least one option")
                if not all(isinstance(v, str) and v in valid for v in value):
                    raise InvalidAnswers(qid, f"choices must be among {sorted(valid)}")
                deduped = sorted(set(value), key=value.index)
                normalized[qid] = deduped
            else:  # text
                if not isinstance(value, str):
                    raise InvalidAnswers(qid, "must be a string")
                normalized[qid] = value
        return normalized


def build_definition(config: StudyConfig) -> StudyDefinition:
    sentences = load_corpus(config.corpus_path)
    records = load_simplifications(config.simplifications_path)
    return StudyDefinition(config, sentences, records)
