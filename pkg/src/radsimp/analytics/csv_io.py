"""CSV import for survey responses collected outside the survey service.

Layperson schema (header row required, one row per rater x sentence):

    rater_id, sentence_id, variant,
    q1_orig, q2_orig, q3_orig, q1_simp, q2_simp, q3_simp, q4,
    most, least, justification

``variant`` is the assigned variant tag; answer cells hold the canonical
values (``not_at_all``, ``low_confidence``, ``mild``, ``much_better``, ...)
and may be empty for unanswered questions; ``most``/``least`` are
semicolon-separated variant tags.

Expert schema:

    rater_id, sentence_id, variant,
    correctness, completeness, hallucination, structure, simplicity,
    severity, justification

with integer Likert cells in 1..5 and ``severity`` a severity value.
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

from ..corpus import SeverityLevel, VariantTag
from ..errors import DataFormatError
from .answers import ExpertRating, LaypersonResponse, Q1Level, Q2Level, Q4Level

LAY_COLUMNS = [
    "rater_id", "sentence_id", "variant",
    "q1_orig", "q2_orig", "q3_orig", "q1_simp", "q2_simp", "q3_simp", "q4",
    "most", "least", "justification",
]

EXPERT_COLUMNS = [
    "rater_id", "sentence_id", "variant",
    "correctness", "completeness", "hallucination", "structure", "simplicity",
    "severity", "justification",
]


def _check_header(header: Iterable[str] | None, expected: list[str], path: Path) -> None:
    if header is None or list(header) != expected:
        raise DataFormatError(
            f"header must be exactly {','.join(expected)}", path=path, line=1
        )


def _enum_cell(enum_type, cell: str, column: str, path: Path, line: int):
    if not cell:
        return None
    try:
        return enum_type(cell)
    except ValueError:
        raise DataFormatError(
            f"bad {column} value {cell!r}", path=path, line=line
        ) from None


def _variant_set(cell: str, column: str, path: Path, line: int) -> frozenset[VariantTag]:
    if not cell:
        return frozenset()
    tags = []
    for part in cell.split(";"):
        part = part.strip()
        if not part:
            continue
        tags.append(_enum_cell(VariantTag, part, column, path, line))
    return frozenset(tags)


def load_layperson_csv(path: str | Path) -> list[LaypersonResponse]:
    path = Path(path)
    responses = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        _check_header(next(reader, None), LAY_COLUMNS, path)
        for line_no, row in enumerate(reader, start=2):
            if not any(cell.strip() for cell in row):
                continue
            if len(row) != len(LAY_COLUMNS):
                raise DataFormatError(
                    f"expected {len(LAY_COLUMNS)} columns, got {len(row)}",
                    path=path,
                    line=line_no,
                )
            cells = dict(zip(LAY_COLUMNS, (cell.strip() for cell in row)))
            variant = _enum_cell(VariantTag, cells["variant"], "variant", path, line_no)
            if variant is None:
                raise DataFormatError("missing variant", path=path, line=line_no)
            responses.append(
                LaypersonResponse(
                    rater_id=cells["rater_id"],
                    sentence_id=cells["sentence_id"],
                    assigned_variant=variant,
                    q1_orig=_enum_cell(Q1Level, cells["q1_orig"], "q1_orig", path, line_no),
                    q2_orig=_enum_cell(Q2Level, cells["q2_orig"], "q2_orig", path, line_no),
                    q3_orig=_enum_cell(SeverityLevel, cells["q3_orig"], "q3_orig", path, line_no),
                    q1_simp=_enum_cell(Q1Level, cells["q1_simp"], "q1_simp", path, line_no),
                    q2_simp=_enum_cell(Q2Level, cells["q2_simp"], "q2_simp", path, line_no),
                    q3_simp=_enum_cell(SeverityLevel, cells["q3_simp"], "q3_simp", path, line_no),
                    q4=_enum_cell(Q4Level, cells["q4"], "q4", path, line_no),
                    most_preferred=_variant_set(cells["most"], "most", path, line_no),
                    least_preferred=_variant_set(cells["least"], "least", path, line_no),
                    justification=cells["justification"],
                )
            )
    return responses


def load_expert_csv(path: str | Path) -> list[ExpertRating]:
    path = Path(path)
    ratings = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        _check_header(next(reader, None), EXPERT_COLUMNS, path)
        for line_no, row in enumerate(reader, start=2):
            if not any(cell.strip() for cell in row):
                continue
            if len(row) != len(EXPERT_COLUMNS):
                raise DataFormatError(
                    f"expected {len(EXPERT_COLUMNS)} columns, got {len(row)}",
                    path=path,
                    line=line_no,
                )
            cells = dict(zip(EXPERT_COLUMNS, (cell.strip() for cell in row)))
            variant = _enum_cell(VariantTag, cells["variant"], "variant", path, line_no)
            severity = _enum_cell(SeverityLevel, cells["severity"], "severity", path, line_no)
            if variant is None or severity is None:
                raise DataFormatError("missing variant or severity", path=path, line=line_no)
            likert = {}
            for axis in ("correctness", "completeness", "hallucination", "structure", "simplicity"):
                try:
                    likert[axis] = int(cells[axis])
                except ValueError:
                    raise DataFormatError(
                        f"{axis} must be an integer", path=path, line=line_no
                    ) from None
            try:
                ratings.append(
                    ExpertRating(
                        rater_id=cells["rater_id"],
                        sentence_id=cells["sentence_id"],
                        variant=variant,
                        severity=severity,
                        justification=cells["justification"],
                        **likert,
                    )
                )
            except ValueError as exc:
                raise DataFormatError(str(exc), path=path, line=line_no) from exc
    return ratings
