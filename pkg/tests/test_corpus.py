from collections import Counter

import pytest

from radsimp.corpus import (
    ALL_VARIANTS,
    RadiologySentence,
    SeverityLevel,
    SimplificationRecord,
    VariantTag,
    demo_corpus_path,
    group_by_sentence,
    load_corpus,
    load_simplifications,
    save_simplifications,
    verify_referential_integrity,
)
from radsimp.errors import DataFormatError


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestSeverity:
    def test_numeric_map_is_bijection(self):
        numerics = [level.numeric for level in SeverityLevel]
        assert sorted(numerics) == [1, 2, 3, 4, 5]
        for level in SeverityLevel:
            assert SeverityLevel.from_numeric(level.numeric) is level

    def test_endpoints(self):
        assert SeverityLevel.CRITICAL.numeric == 1
        assert SeverityLevel.HEALTHY.numeric == 5


class TestVariantTag:
    def test_exactly_four(self):
        assert len(ALL_VARIANTS) == 4
        assert {v.label for v in ALL_VARIANTS} == {
            "Plain_BS",
            "Plain_SC",
            "CoT_BS",
            "CoT_SC",
        }


class TestLoadCorpus:
    def test_single_record(self, tmp_path):
        path = write(tmp_path, "c.jsonl", '{"id": "s1", "text": "Liver is normal."}\n')
        sentences = load_corpus(path)
        assert len(sentences) == 1
        assert sentences[0] == RadiologySentence("s1", "Liver is normal.")

    def test_duplicate_id_names_line(self, tmp_path):
        path = write(
            tmp_path,
            "c.jsonl",
            '{"id": "s1", "text": "a b."}\n'
            '{"id": "s2", "text": "c d."}\n'
            '{"id": "s1", "text": "e f."}\n',
        )
        with pytest.raises(DataFormatError) as excinfo:
            load_corpus(path)
        assert excinfo.value.line == 3
        assert "s1" in str(excinfo.value)

    def test_malformed_json_names_line(self, tmp_path):
        path = write(tmp_path, "c.jsonl", '{"id": "s1", "text": "ok."}\n{oops\n')
        with pytest.raises(DataFormatError) as excinfo:
            load_corpus(path)
        assert excinfo.value.line == 2

    def test_empty_text_rejected(self, tmp_path):
        path = write(tmp_path, "c.jsonl", '{"id": "s1", "text": "   "}\n')
        with pytest.raises(DataFormatError):
            load_corpus(path)

    def test_unknown_severity_rejected(self, tmp_path):
        path = write(tmp_path, "c.jsonl", '{"id": "s1", "text": "x.", "severity": "bad"}\n')
        with pytest.raises(DataFormatError):
            load_corpus(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_corpus(tmp_path / "absent.jsonl")


class TestDemoCorpus:
    def test_twelve_sentences_with_expected_severity_skew(self):
        sentences = load_corpus(demo_corpus_path())
        assert len(sentences) == 12
        distribution = Counter(s.expert_severity for s in sentences)
        assert distribution == {
            SeverityLevel.CRITICAL: 1,
            SeverityLevel.SERIOUS: 1,
            SeverityLevel.MODERATE: 2,
            SeverityLevel.MILD: 5,
            SeverityLevel.HEALTHY: 3,
        }

    def test_ids_unique(self):
        sentences = load_corpus(demo_corpus_path())
        assert len({s.id for s in sentences}) == len(sentences)


def make_record(sentence_id="s1", variant=VariantTag.PLAIN_BS, iterations=0):
    return SimplificationRecord(
        sentence_id=sentence_id,
        variant=variant,
        text=f"simple {sentence_id} {variant.value}",
        iterations=iterations,
        transcript_ref=f"{sentence_id}:{variant.value}",
    )


class TestSimplificationRecords:
    def test_baseline_must_have_zero_iterations(self):
        with pytest.raises(ValueError):
            make_record(variant=VariantTag.COT_BS, iterations=2)

    def test_self_corrected_iterations_allowed(self):
        record = make_record(variant=VariantTag.COT_SC, iterations=3)
        assert record.iterations == 3

    def test_round_trip_empty(self, tmp_path):
        path = tmp_path / "simp.jsonl"
        save_simplifications([], path)
        assert load_simplifications(path) == []

    def test_round_trip_single(self, tmp_path):
        path = tmp_path / "simp.jsonl"
        record = make_record()
        save_simplifications([record], path)
        assert path.read_text(encoding="utf-8").count("\n") == 1
        assert load_simplifications(path) == [record]

    def test_round_trip_forty_by_four(self, tmp_path):
        records = [
            make_record(f"s{i:02d}", variant, iterations=1 if variant.self_corrected else 0)
            for i in range(40)
            for variant in ALL_VARIANTS
        ]
        path = tmp_path / "simp.jsonl"
        save_simplifications(records, path)
        loaded = load_simplifications(path)
        assert loaded == records
        grouped = group_by_sentence(loaded)
        assert len(grouped) == 40
        assert all(set(variants) == set(ALL_VARIANTS) for variants in grouped.values())

    def test_partial_tail_dropped_only_when_asked(self, tmp_path):
        path = tmp_path / "simp.jsonl"
        save_simplifications([make_record()], path)
        with path.open("a", encoding="utf-8") as handle:
            handle.write('{"sentence_id": "s2", "varia')
        with pytest.raises(DataFormatError):
            load_simplifications(path)
        assert len(load_simplifications(path, drop_partial_tail=True)) == 1

    def test_referential_integrity(self):
        sentences = [RadiologySentence("s1", "a b.")]
        verify_referential_integrity([make_record("s1")], sentences)
        with pytest.raises(DataFormatError):
            verify_referential_integrity([make_record("ghost")], sentences)
