"""Reference-free readability indices with a deterministic tokenizer.

Tokenization rules (chosen for determinism and documented for
reproducibility; no dictionaries or external models):

* Sentences: the text is split on runs of ``.``, ``!`` or ``?`` followed by
  whitespace or end of text; a segment counts only if it contains at least
  one letter or digit. Text with words but no terminator is one sentence.
* Words: maximal runs of letters, digits and apostrophes; surrounding
  apostrophes are stripped and empty tokens dropped.
* Characters: letters and digits only, summed over words.
* Syllables: vowel-group counting over ``aeiouy``; a silent final ``e`` is
  subtracted unless the word ends in a consonant followed by ``le``;
  a word always counts at least one syllable. Approximate by design.
* Complex words: three or more syllables, no proper-noun or suffix
  exemptions.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import ALL_VARIANTS, RadiologySentence, SimplificationRecord
from .errors import DegenerateText, EmptyGroup

_SENTENCE_SPLIT = re.compile(r"[.!?]+(?:\s+|$)")
_WORD_RUN = re.compile(r"[A-Za-z0-9']+")
_ALNUM = re.compile(r"[A-Za-z0-9]")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")


@dataclass(frozen=True)
class TextStats:
    """Raw counts feeding the readability formulas."""

    sentences: int
    words: int
    syllables: int
    characters: int
    complex_words: int

    def __post_init__(self) -> None:
        counts = (self.sentences, self.words, self.syllables, self.characters, self.complex_words)
        if any(c < 0 for c in counts):
            raise ValueError("counts must be non-negative")
        if self.complex_words > self.words:
            raise ValueError("complex_words cannot exceed words")
        if self.words > 0 and self.syllables < self.words:
            raise ValueError("syllables must be at least one per word")


def tokenize_words(text: str) -> list[str]:
    words = []
    for run in _WORD_RUN.findall(text):
        token = run.strip("'")
        if token:
            words.append(token)
    return words


def count_syllables(word: str) -> int:
    """Heuristic syllable count: vowel groups with silent-e handling, minimum 1."""
    lowered = word.lower()
    count = len(_VOWEL_GROUP.findall(lowered))
    if lowered.endswith("e"):
        ends_consonant_le = (
            len(lowered) >= 3
            and lowered.endswith("le")
            and lowered[-3] not in "aeiouy"
        )
        if not ends_consonant_le:
            count -= 1
    return max(count, 1)


def analyze(text: str) -> TextStats:
    """Deterministic counts for ``text``; degenerate inputs yield zero counts."""
    sentences = sum(
        1 for segment in _SENTENCE_SPLIT.split(text) if _ALNUM.search(segment)
    )
    words = tokenize_words(text)
    syllables = 0
    characters = 0
    complex_words = 0
    for word in words:
        syl = count_syllables(word)
        syllables += syl
        characters += sum(1 for ch in word if ch != "'")
        if syl >= 3:
            complex_words += 1
    if words and sentences == 0:
        sentences = 1
    return TextStats(
        sentences=sentences,
        words=len(words),
        syllables=syllables,
        characters=characters,
        complex_words=complex_words,
    )


def _require_nondegenerate(stats: TextStats) -> None:
    if stats.sentences == 0 or stats.words == 0:
        raise DegenerateText("readability formulas need at least one sentence and one word")


def fkgl(stats: TextStats) -> float:
    """Grade-level estimate from sentence length and syllables per word."""
    _require_nondegenerate(stats)
    return 0.39 * (stats.words / stats.sentences) + 11.8 * (stats.syllables / stats.words) - 15.59


def gfi(stats: TextStats) -> float:
    """Years-of-education estimate from sentence length and complex-word rate."""
    _require_nondegenerate(stats)
    return 0.4 * ((stats.words / stats.sentences) + 100.0 * (stats.complex_words / stats.words))


def ari(stats: TextStats) -> float:
    """Grade-level estimate from characters per word and words per sentence."""
    _require_nondegenerate(stats)
    return 4.71 * (stats.characters / stats.words) + 0.5 * (stats.words / stats.sentences) - 21.43


METRICS = {"fkgl": fkgl, "gfi": gfi, "ari": ari}

ORIGINAL_COLUMN = "original"


def score_text(text: str) -> dict[str, float]:
    stats = analyze(text)
    return {name: fn(stats) for name, fn in METRICS.items()}


def _group_means(texts: Sequence[str], group: str) -> dict[str, float]:
    if not texts:
        raise EmptyGroup(f"no texts in group {group!r}")
    scores = [score_text(t) for t in texts]
    return {name: sum(s[name] for s in scores) / len(scores) for name in METRICS}


def score_table(
    sentences: Iterable[RadiologySentence],
    records: Iterable[SimplificationRecord],
) -> dict[str, dict[str, float]]:
    """Per-group mean FKGL/GFI/ARI for the originals and each variant.

    Returns ``{group: {metric: mean}}`` with groups ``original`` plus the
    four variant tags; raises :class:`EmptyGroup` if any group has no texts.
    """
    table: dict[str, dict[str, float]] = {}
    originals = [s.text for s in sentences]
    table[ORIGINAL_COLUMN] = _group_means(originals, ORIGINAL_COLUMN)
    by_variant: dict[str, list[str]] = {v.value: [] for v in ALL_VARIANTS}
    for record in records:
        by_variant[record.variant.value].append(record.text)
    for variant in ALL_VARIANTS:
        table[variant.value] = _group_means(by_variant[variant.value], variant.value)
    return table


def render_score_table(table: Mapping[str, Mapping[str, float]]) -> str:
    """Aligned-text block with one row per metric and one column per group."""
    columns = [ORIGINAL_COLUMN] + [v.value for v in ALL_VARIANTS]
    headers = ["Metric", "Original"] + [v.label for v in ALL_VARIANTS]
    rows = [headers]
    for metric in METRICS:
        row = [metric.upper()]
        for column in columns:
            row.append(f"{table[column][metric]:.3f}")
        rows.append(row)
    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("-" * len(lines[0]))
    return "\n".join(lines)
