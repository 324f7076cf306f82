import random

import pytest

from radsimp.analytics.answers import (
    AnswerMaps,
    ExpertRating,
    LaypersonResponse,
    Phase,
    Q1Level,
    Q2Level,
    Q4Level,
    validate_preferences,
)
from radsimp.analytics.stats import (
    confidence_distribution,
    confidence_strata,
    expert_aggregates,
    majority_votes,
    question_aggregates,
    severity_error,
    vote_distribution,
)
from radsimp.corpus import ALL_VARIANTS, SeverityLevel, VariantTag
from radsimp.errors import EmptyGroup, MissingExpertLabel

SEVERITIES = list(SeverityLevel)


def response(sentence_id, rater_id="r1", variant=VariantTag.COT_SC, **kwargs):
    return LaypersonResponse(
        rater_id=rater_id, sentence_id=sentence_id, assigned_variant=variant, **kwargs
    )


def random_responses(rng, n_sentences=10, n_raters=4):
    expert = {f"s{i}": rng.choice(SEVERITIES) for i in range(n_sentences)}
    responses = []
    for i in range(n_sentences):
        for r in range(n_raters):
            responses.append(
                response(
                    f"s{i}",
                    rater_id=f"r{r}",
                    variant=ALL_VARIANTS[(r + i) % 4],
                    q1_orig=rng.choice(list(Q1Level)),
                    q2_orig=rng.choice(list(Q2Level)),
                    q3_orig=rng.choice(SEVERITIES),
                    q1_simp=rng.choice(list(Q1Level)),
                    q2_simp=rng.choice(list(Q2Level)),
                    q3_simp=rng.choice(SEVERITIES),
                    q4=rng.choice(list(Q4Level)),
                    most_preferred=frozenset({rng.choice(ALL_VARIANTS)}),
                    least_preferred=frozenset({rng.choice(ALL_VARIANTS)}),
                )
            )
    return responses, expert


class TestSeverityError:
    def test_all_correct(self):
        expert = {"s1": SeverityLevel.MILD}
        responses = [response("s1", q3_simp=SeverityLevel.MILD) for _ in range(5)]
        stats = severity_error(responses, expert)
        assert stats.mse == 0.0
        assert stats.accuracy == 1.0

    def test_off_by_two_levels(self):
        expert = {"s1": SeverityLevel.HEALTHY}  # numeric 5
        responses = [response("s1", q3_simp=SeverityLevel.MODERATE)]  # numeric 3
        stats = severity_error(responses, expert)
        assert stats.mse == 4.0
        assert stats.accuracy == 0.0

    def test_matches_brute_force_oracle(self):
        rng = random.Random(42)
        expert = {f"s{i}": rng.choice(SEVERITIES) for i in range(20)}
        responses = [
            response(f"s{i}", q3_simp=rng.choice(SEVERITIES)) for i in range(20)
        ]
        stats = severity_error(responses, expert)
        # independent loop oracle
        errors, hits = [], 0
        for resp in responses:
            guess = resp.q3_simp.numeric
            truth = expert[resp.sentence_id].numeric
            errors.append((guess - truth) ** 2)
            hits += 1 if resp.q3_simp == expert[resp.sentence_id] else 0
        assert stats.mse == pytest.approx(sum(errors) / len(errors), abs=1e-12)
        assert stats.accuracy == pytest.approx(hits / len(responses), abs=1e-12)

    def test_reversal_invariance(self):
        # reversing the numbering on both sides leaves MSE unchanged
        rng = random.Random(9)
        expert = {f"s{i}": rng.choice(SEVERITIES) for i in range(30)}
        responses = [
            response(f"s{i}", q3_simp=rng.choice(SEVERITIES)) for i in range(30)
        ]
        canonical = severity_error(responses, expert)
        reversed_map = AnswerMaps(q3={level: 6 - level.numeric for level in SeverityLevel})
        flipped = severity_error(responses, expert, maps=reversed_map)
        assert flipped.mse == pytest.approx(canonical.mse, abs=1e-12)
        assert flipped.accuracy == pytest.approx(canonical.accuracy, abs=1e-12)

    def test_missing_expert_label(self):
        with pytest.raises(MissingExpertLabel):
            severity_error([response("sX", q3_simp=SeverityLevel.MILD)], {})

    def test_missing_answers_excluded_pairwise(self):
        expert = {"s1": SeverityLevel.MILD}
        responses = [
            response("s1", q3_simp=SeverityLevel.MILD),
            response("s1", q3_simp=None),
        ]
        assert severity_error(responses, expert).n == 1

    def test_empty_group(self):
        with pytest.raises(EmptyGroup):
            severity_error([], {})


class TestQuestionAggregates:
    def test_single_completely_answer(self):
        expert = {"s1": SeverityLevel.MILD}
        responses = [
            response(
                "s1",
                variant=variant,
                q1_simp=Q1Level.COMPLETELY,
                q3_simp=SeverityLevel.MILD,
                q3_orig=SeverityLevel.MILD,
            )
            for variant in ALL_VARIANTS
        ]
        table = question_aggregates(responses, expert)
        assert table["cot_sc"].q1 == 4.0

    def test_q4_mean(self):
        expert = {"s1": SeverityLevel.MILD}
        responses = [
            response("s1", rater_id="r1", q4=Q4Level.MUCH_BETTER, q3_orig=SeverityLevel.MILD),
            response("s1", rater_id="r2", q4=Q4Level.NO_HELP, q3_orig=SeverityLevel.MILD),
        ]
        table = question_aggregates(responses, expert, require_all_groups=False)
        assert table["cot_sc"].q4 == pytest.approx(1.0)

    def test_original_column_pools_everyone(self):
        expert = {"s1": SeverityLevel.MILD}
        responses = [
            response("s1", rater_id="r1", variant=VariantTag.PLAIN_BS, q1_orig=Q1Level.NOT_AT_ALL),
            response("s1", rater_id="r2", variant=VariantTag.COT_SC, q1_orig=Q1Level.MOSTLY),
        ]
        table = question_aggregates(responses, expert, require_all_groups=False)
        assert table["original"].q1 == pytest.approx((1 + 3) / 2)
        assert table["original"].q4 is None

    def test_empty_variant_group_raises_by_default(self):
        expert = {"s1": SeverityLevel.MILD}
        responses = [response("s1", variant=VariantTag.PLAIN_BS)]
        with pytest.raises(EmptyGroup):
            question_aggregates(responses, expert)

    def test_matches_brute_force_on_random_data(self):
        rng = random.Random(77)
        responses, expert = random_responses(rng)
        table = question_aggregates(responses, expert)
        for variant in ALL_VARIANTS:
            group = [r for r in responses if r.assigned_variant is variant]
            q1_vals = [
                {"not_at_all": 1, "somewhat": 2, "mostly": 3, "completely": 4}[r.q1_simp.value]
                for r in group
            ]
            assert table[variant.value].q1 == pytest.approx(sum(q1_vals) / len(q1_vals))
            sq = [(r.q3_simp.numeric - expert[r.sentence_id].numeric) ** 2 for r in group]
            assert table[variant.value].q3.mse == pytest.approx(sum(sq) / len(sq), abs=1e-12)


class TestConfidenceStrata:
    def test_all_high_confidence_correct(self):
        expert = {"s1": SeverityLevel.SERIOUS}
        responses = [
            response(
                "s1",
                rater_id=f"r{i}",
                q2_orig=Q2Level.HIGH_CONFIDENCE,
                q3_orig=SeverityLevel.SERIOUS,
                q2_simp=Q2Level.HIGH_CONFIDENCE,
                q3_simp=SeverityLevel.SERIOUS,
            )
            for i in range(4)
        ]
        strata = confidence_strata(responses, expert)
        assert set(strata) == {Q2Level.HIGH_CONFIDENCE}
        assert strata[Q2Level.HIGH_CONFIDENCE].mse == 0.0
        assert strata[Q2Level.HIGH_CONFIDENCE].accuracy == 1.0
        assert strata[Q2Level.HIGH_CONFIDENCE].n == 8  # both phases pooled

    def test_matches_brute_force_partition_oracle(self):
        rng = random.Random(5)
        responses, expert = random_responses(rng)
        strata = confidence_strata(responses, expert)
        # independent partition oracle over pooled (q2, q3) pairs
        buckets = {}
        for r in responses:
            for q2, q3 in [(r.q2_orig, r.q3_orig), (r.q2_simp, r.q3_simp)]:
                buckets.setdefault(q2, []).append(
                    (q3.numeric - expert[r.sentence_id].numeric) ** 2
                )
        for level, stats in strata.items():
            sq = buckets[level]
            assert stats.mse == pytest.approx(sum(sq) / len(sq), abs=1e-12)
            assert stats.n == len(sq)

    def test_phase_filter(self):
        expert = {"s1": SeverityLevel.MILD}
        responses = [
            response(
                "s1",
                q2_orig=Q2Level.NOT_AT_ALL,
                q3_orig=SeverityLevel.CRITICAL,
                q2_simp=Q2Level.HIGH_CONFIDENCE,
                q3_simp=SeverityLevel.MILD,
            )
        ]
        original_only = confidence_strata(responses, expert, phase=Phase.ORIGINAL)
        assert set(original_only) == {Q2Level.NOT_AT_ALL}

    def test_empty_stratum_absent(self):
        expert = {"s1": SeverityLevel.MILD}
        responses = [
            response("s1", q2_simp=Q2Level.LOW_CONFIDENCE, q3_simp=SeverityLevel.MILD)
        ]
        strata = confidence_strata(responses, expert)
        assert Q2Level.NOT_AT_ALL not in strata
        assert Q2Level.HIGH_CONFIDENCE not in strata


class TestConfidenceDistribution:
    def test_three_not_at_all(self):
        responses = [
            response("s1", rater_id=f"r{i}", q2_orig=Q2Level.NOT_AT_ALL) for i in range(3)
        ]
        hist = confidence_distribution(responses)
        assert hist["original"] == {
            Q2Level.NOT_AT_ALL: 3,
            Q2Level.LOW_CONFIDENCE: 0,
            Q2Level.HIGH_CONFIDENCE: 0,
        }

    def test_row_sums_conserved(self):
        rng = random.Random(3)
        responses, _ = random_responses(rng)
        hist = confidence_distribution(responses)
        assert sum(hist["original"].values()) == len(responses)
        per_variant_total = sum(
            sum(hist[v.value].values()) for v in ALL_VARIANTS
        )
        assert per_variant_total == len(responses)
        assert len(hist) == 5


class TestMajorityVotes:
    def test_unanimous_most(self):
        responses = [
            response(
                "s1",
                rater_id=f"r{i}",
                most_preferred=frozenset({VariantTag.COT_SC}),
                least_preferred=frozenset({VariantTag.PLAIN_BS}),
            )
            for i in range(8)
        ]
        votes = majority_votes(responses)
        assert votes.most[VariantTag.COT_SC] == 1
        assert votes.least[VariantTag.PLAIN_BS] == 1
        assert votes.ties == {"most": [], "least": []}

    def test_tie_credits_both_and_flags(self):
        responses = [
            response(
                "s1",
                rater_id="r1",
                most_preferred=frozenset({VariantTag.COT_SC}),
                least_preferred=frozenset({VariantTag.PLAIN_BS}),
            ),
            response(
                "s1",
                rater_id="r2",
                most_preferred=frozenset({VariantTag.COT_BS}),
                least_preferred=frozenset({VariantTag.PLAIN_BS}),
            ),
        ]
        votes = majority_votes(responses)
        assert votes.most[VariantTag.COT_SC] == 1
        assert votes.most[VariantTag.COT_BS] == 1
        assert votes.ties["most"] == ["s1"]

    def test_missing_sentence_rejected_with_universe(self):
        responses = [
            response("s1", most_preferred=frozenset({VariantTag.COT_SC}),
                     least_preferred=frozenset({VariantTag.PLAIN_BS}))
        ]
        with pytest.raises(EmptyGroup):
            majority_votes(responses, sentences=["s1", "s2"])

    def test_matches_brute_force_argmax_oracle(self):
        rng = random.Random(13)
        responses, _ = random_responses(rng, n_sentences=12, n_raters=5)
        votes = majority_votes(responses)
        # brute-force winner per sentence and direction
        wins = {"most": {v: 0 for v in ALL_VARIANTS}, "least": {v: 0 for v in ALL_VARIANTS}}
        sentences = {r.sentence_id for r in responses}
        for sid in sentences:
            for direction in ("most", "least"):
                tally = {v: 0 for v in ALL_VARIANTS}
                for r in responses:
                    if r.sentence_id != sid:
                        continue
                    chosen = r.most_preferred if direction == "most" else r.least_preferred
                    for v in chosen:
                        tally[v] += 1
                top = max(tally.values())
                for v in ALL_VARIANTS:
                    if tally[v] == top and top > 0:
                        wins[direction][v] += 1
        assert votes.most == wins["most"]
        assert votes.least == wins["least"]

    def test_vote_distribution_conserves_sentences(self):
        rng = random.Random(21)
        responses, _ = random_responses(rng, n_sentences=9, n_raters=4)
        dist = vote_distribution(responses)
        for direction in ("most", "least"):
            for variant in ALL_VARIANTS:
                assert sum(dist[direction][variant].values()) == 9


class TestExpertAggregates:
    def test_means_per_variant(self):
        ratings = [
            ExpertRating(
                rater_id="e1",
                sentence_id=f"s{i}",
                variant=VariantTag.PLAIN_BS,
                correctness=5,
                completeness=4,
                hallucination=5,
                structure=3,
                simplicity=score,
                severity=SeverityLevel.MILD,
            )
            for i, score in enumerate([2, 4])
        ]
        table = expert_aggregates(ratings)
        assert table["plain_bs"]["simplicity"] == pytest.approx(3.0)
        assert table["plain_bs"]["correctness"] == pytest.approx(5.0)
        assert "cot_sc" not in table

    def test_likert_bounds_enforced(self):
        with pytest.raises(ValueError):
            ExpertRating(
                rater_id="e1",
                sentence_id="s1",
                variant=VariantTag.PLAIN_BS,
                correctness=6,
                completeness=4,
                hallucination=5,
                structure=3,
                simplicity=1,
                severity=SeverityLevel.MILD,
            )


class TestPreferenceValidation:
    def test_overlap_flagged(self):
        overlap = response(
            "s1",
            most_preferred=frozenset({VariantTag.COT_SC}),
            least_preferred=frozenset({VariantTag.COT_SC, VariantTag.PLAIN_BS}),
        )
        warnings = validate_preferences([overlap])
        assert len(warnings) == 1
        assert "cot_sc" in warnings[0]
