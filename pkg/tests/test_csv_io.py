import pytest

from radsimp.analytics.csv_io import (
    EXPERT_COLUMNS,
    LAY_COLUMNS,
    load_expert_csv,
    load_layperson_csv,
)
from radsimp.corpus import SeverityLevel, VariantTag
from radsimp.errors import DataFormatError


def write_csv(tmp_path, name, header, rows):
    path = tmp_path / name
    lines = [",".join(header)] + [",".join(row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestLaypersonCsv:
    def test_full_row(self, tmp_path):
        path = write_csv(
            tmp_path,
            "lay.csv",
            LAY_COLUMNS,
            [
                [
                    "L1", "s1", "cot_sc",
                    "somewhat", "low_confidence", "moderate",
                    "completely", "high_confidence", "mild", "much_better",
                    "cot_sc;cot_bs", "plain_bs", "clear and direct",
                ]
            ],
        )
        (resp,) = load_layperson_csv(path)
        assert resp.assigned_variant is VariantTag.COT_SC
        assert resp.q3_orig is SeverityLevel.MODERATE
        assert resp.q4.value == "much_better"
        assert resp.most_preferred == {VariantTag.COT_SC, VariantTag.COT_BS}
        assert resp.least_preferred == {VariantTag.PLAIN_BS}
        assert resp.justification == "clear and direct"

    def test_empty_cells_become_missing(self, tmp_path):
        path = write_csv(
            tmp_path,
            "lay.csv",
            LAY_COLUMNS,
            [["L1", "s1", "plain_bs", "", "", "", "", "", "", "", "", "", ""]],
        )
        (resp,) = load_layperson_csv(path)
        assert resp.q1_orig is None
        assert resp.most_preferred == frozenset()

    def test_bad_header_rejected(self, tmp_path):
        path = write_csv(tmp_path, "lay.csv", ["rater", "oops"], [])
        with pytest.raises(DataFormatError) as excinfo:
            load_layperson_csv(path)
        assert excinfo.value.line == 1

    def test_bad_value_names_line(self, tmp_path):
        path = write_csv(
            tmp_path,
            "lay.csv",
            LAY_COLUMNS,
            [["L1", "s1", "plain_bs", "kind_of", "", "", "", "", "", "", "", "", ""]],
        )
        with pytest.raises(DataFormatError) as excinfo:
            load_layperson_csv(path)
        assert excinfo.value.line == 2


class TestExpertCsv:
    def test_full_row(self, tmp_path):
        path = write_csv(
            tmp_path,
            "expert.csv",
            EXPERT_COLUMNS,
            [["E1", "s1", "plain_sc", "5", "4", "5", "4", "3", "mild", "solid"]],
        )
        (rating,) = load_expert_csv(path)
        assert rating.variant is VariantTag.PLAIN_SC
        assert rating.simplicity == 3
        assert rating.severity is SeverityLevel.MILD

    def test_likert_out_of_range_rejected(self, tmp_path):
        path = write_csv(
            tmp_path,
            "expert.csv",
            EXPERT_COLUMNS,
            [["E1", "s1", "plain_sc", "6", "4", "5", "4", "3", "mild", ""]],
        )
        with pytest.raises(DataFormatError) as excinfo:
            load_expert_csv(path)
        assert excinfo.value.line == 2
