import random

import pytest

from radsimp.corpus import ALL_VARIANTS, RadiologySentence, SimplificationRecord
from radsimp.errors import DegenerateText, EmptyGroup
from radsimp.readability import (
    TextStats,
    analyze,
    ari,
    count_syllables,
    fkgl,
    gfi,
    render_score_table,
    score_table,
)


# Straight-from-formula recomputation, independent of the module under test.
def oracle_fkgl(s):
    return 0.39 * (s.words / s.sentences) + 11.8 * (s.syllables / s.words) - 15.59


def oracle_gfi(s):
    return 0.4 * ((s.words / s.sentences) + 100 * (s.complex_words / s.words))


def oracle_ari(s):
    return 4.71 * (s.characters / s.words) + 0.5 * (s.words / s.sentences) - 21.43


class TestAnalyze:
    def test_empty_text_all_zeros(self):
        assert analyze("") == TextStats(0, 0, 0, 0, 0)

    def test_hand_counted_cat_sentence(self):
        stats = analyze("The cat sat on the mat.")
        assert stats == TextStats(
            sentences=1, words=6, syllables=6, characters=17, complex_words=0
        )

    def test_hand_syllabified_complex_words(self):
        # hy-po-den-si-ties (5) and vi-si-ble (3) are complex; "are" is not.
        stats = analyze("Hypodensities are visible.")
        assert stats.words == 3
        assert stats.complex_words == 2

    def test_no_terminator_counts_one_sentence(self):
        assert analyze("no terminator here").sentences == 1

    def test_multiple_terminators(self):
        assert analyze("What?! Really...").sentences == 2

    def test_apostrophes_inside_words(self):
        stats = analyze("Don't panic.")
        assert stats.words == 2
        assert stats.characters == 9  # dont + panic, letters/digits only

    def test_additive_over_terminated_texts(self):
        a, b = "The liver is fine.", "No stones were seen!"
        joined = analyze(a + " " + b)
        assert joined.words == analyze(a).words + analyze(b).words
        assert joined.sentences == analyze(a).sentences + analyze(b).sentences

    @pytest.mark.parametrize(
        "word,expected",
        [
            ("the", 1),
            ("are", 1),
            ("visible", 3),
            ("hypodensities", 5),
            ("apple", 2),
            ("mile", 1),
            ("see", 1),
            ("cat", 1),
            ("5mm", 1),
        ],
    )
    def test_syllable_counts(self, word, expected):
        assert count_syllables(word) == expected


class TestFormulas:
    def test_fkgl_example(self):
        stats = TextStats(sentences=1, words=6, syllables=6, characters=17, complex_words=0)
        assert fkgl(stats) == pytest.approx(0.39 * 6 + 11.8 * 1 - 15.59, abs=1e-9)
        assert fkgl(stats) == pytest.approx(-1.45, abs=1e-9)

    def test_gfi_example(self):
        stats = TextStats(sentences=1, words=6, syllables=6, characters=17, complex_words=0)
        assert gfi(stats) == pytest.approx(2.4, abs=1e-9)

    def test_gfi_all_complex_bound(self):
        stats = TextStats(sentences=2, words=8, syllables=24, characters=60, complex_words=8)
        assert gfi(stats) == pytest.approx(0.4 * (8 / 2 + 100), abs=1e-9)

    def test_ari_example(self):
        stats = TextStats(sentences=1, words=6, syllables=6, characters=17, complex_words=0)
        assert ari(stats) == pytest.approx(4.71 * (17 / 6) + 3 - 21.43, abs=1e-9)
        assert ari(stats) == pytest.approx(-5.085, abs=1e-9)

    def test_ari_single_letter_words(self):
        stats = TextStats(sentences=1, words=4, syllables=4, characters=4, complex_words=0)
        assert ari(stats) == pytest.approx(4.71 + 0.5 * 4 - 21.43, abs=1e-9)

    @pytest.mark.parametrize("bad", [TextStats(0, 0, 0, 0, 0), TextStats(1, 0, 0, 0, 0)])
    def test_degenerate_inputs(self, bad):
        for metric in (fkgl, gfi, ari):
            with pytest.raises(DegenerateText):
                metric(bad)

    def test_formulas_match_oracle_on_random_stats(self):
        rng = random.Random(1839)
        for _ in range(500):
            words = rng.randint(1, 400)
            stats = TextStats(
                sentences=rng.randint(1, 30),
                words=words,
                syllables=words + rng.randint(0, 3 * words),
                characters=rng.randint(words, 10 * words),
                complex_words=rng.randint(0, words),
            )
            assert fkgl(stats) == pytest.approx(oracle_fkgl(stats), abs=1e-9)
            assert gfi(stats) == pytest.approx(oracle_gfi(stats), abs=1e-9)
            assert ari(stats) == pytest.approx(oracle_ari(stats), abs=1e-9)

    def test_monotonicity(self):
        base = TextStats(sentences=2, words=20, syllables=30, characters=90, complex_words=4)
        more_syllables = TextStats(2, 20, 60, 90, 4)
        assert fkgl(more_syllables) > fkgl(base)
        more_complex = TextStats(2, 20, 30, 90, 5)
        assert gfi(more_complex) > gfi(base)
        longer_words = TextStats(2, 20, 30, 120, 4)
        assert ari(longer_words) > ari(base)


class TestScoreTable:
    @staticmethod
    def records_for(sentence_ids, text):
        return [
            SimplificationRecord(
                sentence_id=sid,
                variant=variant,
                text=text,
                iterations=0 if not variant.self_corrected else 1,
                transcript_ref="t",
            )
            for sid in sentence_ids
            for variant in ALL_VARIANTS
        ]

    def test_single_text_group_mean_is_score(self):
        sentences = [RadiologySentence("s1", "The cat sat on the mat.")]
        records = self.records_for(["s1"], "The cat sat on the mat.")
        table = score_table(sentences, records)
        assert table["original"]["fkgl"] == pytest.approx(-1.45, abs=1e-9)
        assert table["plain_bs"]["fkgl"] == pytest.approx(-1.45, abs=1e-9)

    def test_two_text_mean(self):
        sentences = [
            RadiologySentence("s1", "The cat sat on the mat."),
            RadiologySentence("s2", "Hypodensities are visible."),
        ]
        table = score_table(sentences, self.records_for(["s1", "s2"], "A dog ran."))
        expected = (
            fkgl(analyze("The cat sat on the mat.")) + fkgl(analyze("Hypodensities are visible."))
        ) / 2
        assert table["original"]["fkgl"] == pytest.approx(expected, abs=1e-9)

    def test_five_columns_three_metrics(self):
        sentences = [RadiologySentence("s1", "The cat sat on the mat.")]
        table = score_table(sentences, self.records_for(["s1"], "A dog ran."))
        assert set(table) == {"original", "plain_bs", "plain_sc", "cot_bs", "cot_sc"}
        assert all(set(col) == {"fkgl", "gfi", "ari"} for col in table.values())
        rendered = render_score_table(table)
        assert "Original" in rendered and "FKGL" in rendered

    def test_empty_group_error(self):
        sentences = [RadiologySentence("s1", "The cat sat on the mat.")]
        with pytest.raises(EmptyGroup):
            score_table(sentences, [])
