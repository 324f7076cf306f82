"""Aggregate statistics over survey responses.

Missing answers are excluded pairwise per metric, never imputed. Severity
comparisons use the numeric answer maps; MSE is invariant under reversing
the severity numbering on both sides simultaneously.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ..corpus import ALL_VARIANTS, SeverityLevel, VariantTag
from ..errors import EmptyGroup, MissingExpertLabel
from .answers import (
    DEFAULT_ANSWER_MAPS,
    AnswerMaps,
    ExpertRating,
    LaypersonResponse,
    Phase,
    Q2Level,
)

ORIGINAL_SOURCE = "original"


@dataclass(frozen=True)
class ErrorStats:
    """MSE and exact-match accuracy of severity guesses, with sample size."""

    mse: float
    accuracy: float
    n: int


def _severity_pairs(
    responses: Iterable[LaypersonResponse],
    expert: Mapping[str, SeverityLevel],
    phase: Phase,
) -> list[tuple[SeverityLevel, SeverityLevel]]:
    pairs = []
    for resp in responses:
        guesses: list[SeverityLevel | None] = []
        if phase in (Phase.ORIGINAL, Phase.BOTH):
            guesses.append(resp.q3_orig)
        if phase in (Phase.SIMPLIFIED, Phase.BOTH):
            guesses.append(resp.q3_simp)
        for guess in guesses:
            if guess is None:
                continue
            if resp.sentence_id not in expert:
                raise MissingExpertLabel(
                    f"no expert severity for sentence {resp.sentence_id!r}"
                )
            pairs.append((guess, expert[resp.sentence_id]))
    return pairs


def _error_stats(
    pairs: Sequence[tuple[SeverityLevel, SeverityLevel]], maps: AnswerMaps
) -> ErrorStats:
    if not pairs:
        raise EmptyGroup("no severity guesses to score")
    sq = [(maps.q3[guess] - maps.q3[truth]) ** 2 for guess, truth in pairs]
    exact = sum(1 for guess, truth in pairs if guess == truth)
    return ErrorStats(mse=sum(sq) / len(sq), accuracy=exact / len(pairs), n=len(pairs))


def severity_error(
    responses: Iterable[LaypersonResponse],
    expert: Mapping[str, SeverityLevel],
    phase: Phase = Phase.SIMPLIFIED,
    maps: AnswerMaps = DEFAULT_ANSWER_MAPS,
) -> ErrorStats:
    """MSE and accuracy of layperson severity guesses against expert labels."""
    return _error_stats(_severity_pairs(responses, expert, phase), maps)


@dataclass(frozen=True)
class ColumnAggregates:
    """One column of the clarity table: Q1/Q2 means, Q3 error, Q4 mean."""

    q1: float | None
    q2: float | None
    q3: ErrorStats | None
    q4: float | None
    n: int


def _mean(values: list[int]) -> float | None:
    return sum(values) / len(values) if values else None


def _aggregate_column(
    responses: list[LaypersonResponse],
    expert: Mapping[str, SeverityLevel],
    phase: Phase,
    maps: AnswerMaps,
    with_q4: bool,
) -> ColumnAggregates:
    if phase is Phase.ORIGINAL:
        q1_vals = [maps.q1[r.q1_orig] for r in responses if r.q1_orig is not None]
        q2_vals = [maps.q2[r.q2_orig] for r in responses if r.q2_orig is not None]
    else:
        q1_vals = [maps.q1[r.q1_simp] for r in responses if r.q1_simp is not None]
        q2_vals = [maps.q2[r.q2_simp] for r in responses if r.q2_simp is not None]
    q4_vals = [maps.q4[r.q4] for r in responses if r.q4 is not None] if with_q4 else []
    try:
        q3 = severity_error(responses, expert, phase, maps)
    except EmptyGroup:
        q3 = None
    return ColumnAggregates(
        q1=_mean(q1_vals),
        q2=_mean(q2_vals),
        q3=q3,
        q4=_mean(q4_vals) if with_q4 else None,
        n=len(responses),
    )


def question_aggregates(
    responses: Sequence[LaypersonResponse],
    expert: Mapping[str, SeverityLevel],
    maps: AnswerMaps = DEFAULT_ANSWER_MAPS,
    *,
    require_all_groups: bool = True,
) -> dict[str, ColumnAggregates]:
    """Clarity-table columns: the pooled originals plus one column per variant.

    The original column pools every response's original-sentence answers;
    each variant column aggregates the responses assigned that variant.
    With ``require_all_groups`` (the default) an empty variant group raises
    :class:`EmptyGroup`; otherwise the column is reported with n=0 means.
    """
    if not responses:
        raise EmptyGroup("no responses")
    table: dict[str, ColumnAggregates] = {
        ORIGINAL_SOURCE: _aggregate_column(
            list(responses), expert, Phase.ORIGINAL, maps, with_q4=False
        )
    }
    for variant in ALL_VARIANTS:
        group = [r for r in responses if r.assigned_variant is variant]
        if not group and require_all_groups:
            raise EmptyGroup(f"no responses assigned variant {variant.value!r}")
        if group:
            table[variant.value] = _aggregate_column(
                group, expert, Phase.SIMPLIFIED, maps, with_q4=True
            )
        else:
            table[variant.value] = ColumnAggregates(None, None, None, None, 0)
    return table


def confidence_strata(
    responses: Iterable[LaypersonResponse],
    expert: Mapping[str, SeverityLevel],
    phase: Phase = Phase.BOTH,
    maps: AnswerMaps = DEFAULT_ANSWER_MAPS,
) -> dict[Q2Level, ErrorStats]:
    """Severity MSE/accuracy stratified by reported confidence (Q2).

    Original- and simplified-phase (q2, q3) answer pairs are pooled by
    default; empty strata are absent from the result rather than zero.
    """
    pairs_by_level: dict[Q2Level, list[tuple[SeverityLevel, SeverityLevel]]] = defaultdict(list)
    for resp in responses:
        phased: list[tuple[Q2Level | None, SeverityLevel | None]] = []
        if phase in (Phase.ORIGINAL, Phase.BOTH):
            phased.append((resp.q2_orig, resp.q3_orig))
        if phase in (Phase.SIMPLIFIED, Phase.BOTH):
            phased.append((resp.q2_simp, resp.q3_simp))
        for confidence, guess in phased:
            if confidence is None or guess is None:
                continue
            if resp.sentence_id not in expert:
                raise MissingExpertLabel(
                    f"no expert severity for sentence {resp.sentence_id!r}"
                )
            pairs_by_level[confidence].append((guess, expert[resp.sentence_id]))
    return {
        level: _error_stats(pairs, maps)
        for level, pairs in pairs_by_level.items()
        if pairs
    }


def confidence_distribution(
    responses: Iterable[LaypersonResponse],
) -> dict[str, dict[Q2Level, int]]:
    """Histogram of Q2 levels per source: the originals plus each variant."""
    hist: dict[str, Counter] = {ORIGINAL_SOURCE: Counter()}
    for variant in ALL_VARIANTS:
        hist[variant.value] = Counter()
    for resp in responses:
        if resp.q2_orig is not None:
            hist[ORIGINAL_SOURCE][resp.q2_orig] += 1
        if resp.q2_simp is not None:
            hist[resp.assigned_variant.value][resp.q2_simp] += 1
    return {
        source: {level: counts.get(level, 0) for level in Q2Level}
        for source, counts in hist.items()
    }


def preference_counts(
    responses: Iterable[LaypersonResponse],
) -> dict[str, dict[str, dict[VariantTag, int]]]:
    """Per sentence and direction, how many raters selected each variant."""
    counts: dict[str, dict[str, dict[VariantTag, int]]] = {}
    for resp in responses:
        if not resp.most_preferred and not resp.least_preferred:
            continue
        sentence = counts.setdefault(
            resp.sentence_id,
            {"most": {v: 0 for v in ALL_VARIANTS}, "least": {v: 0 for v in ALL_VARIANTS}},
        )
        for variant in resp.most_preferred:
            sentence["most"][variant] += 1
        for variant in resp.least_preferred:
            sentence["least"][variant] += 1
    return counts


@dataclass(frozen=True)
class MajorityVotes:
    """Sentences won per variant, for the most- and least-preferred votes.

    When variants tie for the top count on a sentence, all tied variants are
    credited one win and the sentence is listed in ``ties``; totals may then
    exceed the sentence count.
    """

    most: dict[VariantTag, int]
    least: dict[VariantTag, int]
    ties: dict[str, list[str]]
    n_sentences: int


def majority_votes(
    responses: Iterable[LaypersonResponse],
    sentences: Sequence[str] | None = None,
) -> MajorityVotes:
    """Tally which variant wins the most/least majority per sentence.

    With an explicit ``sentences`` universe, a sentence without preference
    data raises :class:`EmptyGroup`; by default the universe is the set of
    sentences that received preference selections.
    """
    counts = preference_counts(responses)
    if sentences is None:
        universe = sorted(counts)
    else:
        universe = list(sentences)
        missing = [s for s in universe if s not in counts]
        if missing:
            raise EmptyGroup(f"no preference data for sentence(s) {missing}")
    if not universe:
        raise EmptyGroup("no preference data")
    wins = {"most": {v: 0 for v in ALL_VARIANTS}, "least": {v: 0 for v in ALL_VARIANTS}}
    ties: dict[str, list[str]] = {"most": [], "least": []}
    for sentence_id in universe:
        for direction in ("most", "least"):
            tally = counts[sentence_id][direction]
            top = max(tally.values())
            if top == 0:
                continue
            winners = [v for v in ALL_VARIANTS if tally[v] == top]
            for variant in winners:
                wins[direction][variant] += 1
            if len(winners) > 1:
                ties[direction].append(sentence_id)
    return MajorityVotes(
        most=wins["most"], least=wins["least"], ties=ties, n_sentences=len(universe)
    )


def vote_distribution(
    responses: Iterable[LaypersonResponse],
) -> dict[str, dict[VariantTag, Counter]]:
    """Per direction and variant: #sentences receiving each vote count."""
    counts = preference_counts(responses)
    dist: dict[str, dict[VariantTag, Counter]] = {
        "most": {v: Counter() for v in ALL_VARIANTS},
        "least": {v: Counter() for v in ALL_VARIANTS},
    }
    for per_sentence in counts.values():
        for direction in ("most", "least"):
            for variant in ALL_VARIANTS:
                dist[direction][variant][per_sentence[direction][variant]] += 1
    return dist


def expert_aggregates(
    ratings: Sequence[ExpertRating],
) -> dict[str, dict[str, float]]:
    """Mean Likert score per variant for each factuality/simplicity axis."""
    if not ratings:
        raise EmptyGroup("no expert ratings")
    table: dict[str, dict[str, float]] = {}
    for variant in ALL_VARIANTS:
        group = [r for r in ratings if r.variant is variant]
        if not group:
            continue
        column = {
            axis: sum(getattr(r, axis) for r in group) / len(group)
            for axis in ExpertRating.LIKERT_AXES
        }
        column["n"] = len(group)
        table[variant.value] = column
    return table
