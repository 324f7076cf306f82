"""Domain records and line-delimited file IO for corpora and simplifications.

File formats are UTF-8 JSON lines, one record per line (append-friendly and
diffable). A corpus file holds ``{"id", "text", "severity"?}``; a
simplifications file holds ``{"sentence_id", "variant", "text", "iterations",
"transcript_ref"}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataFormatError


class SeverityLevel(Enum):
    """Five-level severity rubric for a radiology finding.

    The numeric scoring map runs Critical=1 up to Healthy=5, matching the
    map used to score layperson severity guesses. Mean squared error on
    severity is invariant under the reversed numbering (x -> 6-x), so
    analyses do not depend on the direction chosen here.
    """

    CRITICAL = "critical"
    SERIOUS = "serious"
    MODERATE = "moderate"
    MILD = "mild"
    HEALTHY = "healthy"

    @property
    def numeric(self) -> int:
        return _SEVERITY_NUMERIC[self]

    @property
    def label(self) -> str:
        return self.value.capitalize()

    @classmethod
    def from_numeric(cls, value: int) -> "SeverityLevel":
        for level, numeric in _SEVERITY_NUMERIC.items():
            if numeric == value:
                return level
        raise ValueError(f"no severity level maps to {value!r}")


_SEVERITY_NUMERIC = {
    SeverityLevel.CRITICAL: 1,
    SeverityLevel.SERIOUS: 2,
    SeverityLevel.MODERATE: 3,
    SeverityLevel.MILD: 4,
    SeverityLevel.HEALTHY: 5,
}


class VariantTag(Enum):
    """The four simplification variants: {plain, CoT} x {baseline, self-corrected}."""

    PLAIN_BS = "plain_bs"
    PLAIN_SC = "plain_sc"
    COT_BS = "cot_bs"
    COT_SC = "cot_sc"

    @property
    def label(self) -> str:
        prompt, kind = self.value.split("_")
        return ("CoT" if prompt == "cot" else "Plain") + "_" + kind.upper()

    @property
    def self_corrected(self) -> bool:
        return self.value.endswith("_sc")


ALL_VARIANTS: tuple[VariantTag, ...] = (
    VariantTag.PLAIN_BS,
    VariantTag.PLAIN_SC,
    VariantTag.COT_BS,
    VariantTag.COT_SC,
)


@dataclass(frozen=True)
class RadiologySentence:
    """One self-contained expert sentence, optionally severity-labeled."""

    id: str
    text: str
    expert_severity: SeverityLevel | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("sentence id must be non-empty")
        if not self.text.strip():
            raise ValueError("sentence text must be non-empty")


@dataclass(frozen=True)
class SimplificationRecord:
    """A generated simplification for one sentence and variant."""

    sentence_id: str
    variant: VariantTag
    text: str
    iterations: int
    transcript_ref: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("simplification text must be non-empty")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if not self.variant.self_corrected and self.iterations != 0:
            raise ValueError(f"{self.variant.value} records must have iterations == 0")


_CORPUS_KEYS = {"id", "text", "severity"}
_SIMPLIFICATION_KEYS = {"sentence_id", "variant", "text", "iterations", "transcript_ref"}


def _parse_json_line(raw: str, path: object, line_no: int) -> dict:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON ({exc.msg})", path=path, line=line_no) from exc
    if not isinstance(obj, dict):
        raise DataFormatError("record must be a JSON object", path=path, line=line_no)
    return obj


def load_corpus(path: str | Path) -> list[RadiologySentence]:
    """Load sentences in file order, validating ids, text, and severity labels.

    Raises :class:`DataFormatError` with the offending line number for
    malformed records and duplicate ids.
    """
    path = Path(path)
    sentences: list[RadiologySentence] = []
    seen: dict[str, int] = {}
    with path.open(encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            obj = _parse_json_line(raw, path, line_no)
            unknown = set(obj) - _CORPUS_KEYS
            if unknown:
                raise DataFormatError(
                    f"unknown field(s) {sorted(unknown)}", path=path, line=line_no
                )
            sid = obj.get("id")
            text = obj.get("text")
            if not isinstance(sid, str) or not sid:
                raise DataFormatError("missing or empty 'id'", path=path, line=line_no)
            if not isinstance(text, str) or not text.strip():
                raise DataFormatError("missing or empty 'text'", path=path, line=line_no)
            severity = None
            if "severity" in obj:
                try:
                    severity = SeverityLevel(obj["severity"])
                except ValueError:
                    raise DataFormatError(
                        f"unknown severity {obj['severity']!r}", path=path, line=line_no
                    ) from None
            if sid in seen:
                raise DataFormatError(
                    f"duplicate id {sid!r} (first seen on line {seen[sid]})",
                    path=path,
                    line=line_no,
                )
            seen[sid] = line_no
            sentences.append(RadiologySentence(id=sid, text=text, expert_severity=severity))
    return sentences


def sentence_map(sentences: Iterable[RadiologySentence]) -> dict[str, RadiologySentence]:
    return {s.id: s for s in sentences}


def record_to_dict(record: SimplificationRecord) -> dict:
    return {
        "sentence_id": record.sentence_id,
        "variant": record.variant.value,
        "text": record.text,
        "iterations": record.iterations,
        "transcript_ref": record.transcript_ref,
    }


def record_from_dict(obj: dict, *, path: object = None, line_no: int | None = None) -> SimplificationRecord:
    unknown = set(obj) - _SIMPLIFICATION_KEYS
    if unknown:
        raise DataFormatError(f"unknown field(s) {sorted(unknown)}", path=path, line=line_no)
    missing = _SIMPLIFICATION_KEYS - set(obj)
    if missing:
        raise DataFormatError(f"missing field(s) {sorted(missing)}", path=path, line=line_no)
    try:
        variant = VariantTag(obj["variant"])
    except ValueError:
        raise DataFormatError(
            f"unknown variant {obj['variant']!r}", path=path, line=line_no
        ) from None
    if not isinstance(obj["iterations"], int) or isinstance(obj["iterations"], bool):
        raise DataFormatError("'iterations' must be an integer", path=path, line=line_no)
    try:
        return SimplificationRecord(
            sentence_id=str(obj["sentence_id"]),
            variant=variant,
            text=str(obj["text"]),
            iterations=obj["iterations"],
            transcript_ref=str(obj["transcript_ref"]),
        )
    except ValueError as exc:
        raise DataFormatError(str(exc), path=path, line=line_no) from exc


def save_simplifications(records: Sequence[SimplificationRecord], path: str | Path) -> None:
    """Write records one JSON object per line; round-trips with :func:`load_simplifications`."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record_to_dict(record), ensure_ascii=False) + "\n")


def append_simplifications(records: Sequence[SimplificationRecord], path: str | Path) -> None:
    path = Path(path)
    with path.open("a", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record_to_dict(record), ensure_ascii=False) + "\n")
        handle.flush()


def load_simplifications(
    path: str | Path, *, drop_partial_tail: bool = False
) -> list[SimplificationRecord]:
    """Load simplification records in file order.

    With ``drop_partial_tail`` a torn final line (for example after an
    interrupted append) is dropped instead of raising; any other malformed
    line still raises.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    records: list[SimplificationRecord] = []
    for line_no, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            obj = _parse_json_line(raw, path, line_no)
            records.append(record_from_dict(obj, path=path, line_no=line_no))
        except DataFormatError:
            if drop_partial_tail and line_no == len(lines):
                break
            raise
    return records


def verify_referential_integrity(
    records: Iterable[SimplificationRecord], sentences: Iterable[RadiologySentence]
) -> None:
    """Require every record's sentence_id to resolve to a loaded sentence."""
    known = {s.id for s in sentences}
    orphans = sorted({r.sentence_id for r in records} - known)
    if orphans:
        raise DataFormatError(f"records reference unknown sentence ids: {orphans}")


def group_by_sentence(
    records: Iterable[SimplificationRecord],
) -> dict[str, dict[VariantTag, SimplificationRecord]]:
    grouped: dict[str, dict[VariantTag, SimplificationRecord]] = {}
    for record in records:
        grouped.setdefault(record.sentence_id, {})[record.variant] = record
    return grouped


def demo_corpus_path() -> Path:
    """Path of the bundled 12-sentence synthetic demo corpus."""
    return Path(str(resources.files(__package__).joinpath("data/demo_corpus.jsonl")))


def demo_script_path() -> Path:
    """Path of the bundled scripted-backend rules used for offline demo runs."""
    return Path(str(resources.files(__package__).joinpath("data/demo_script.jsonl")))
