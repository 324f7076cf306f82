import json

import pytest
from fastapi.testclient import TestClient

from radsimp.analytics.report import (
    build_report,
    expert_severity_map,
    load_export,
    parse_export,
    responses_from_export,
    write_plot_data,
)
from radsimp.corpus import SeverityLevel, VariantTag
from radsimp.errors import DataFormatError
from radsimp.survey.service import create_app
from radsimp.survey.store import StudyStore

from conftest import write_study

HEADER = {
    "kind": "header",
    "study_id": "t",
    "sentences": [{"id": "s1", "text": "x.", "severity": "mild"}],
    "plan": {"L1": {"s1": "cot_sc"}},
}


def lines_for(*events):
    return [json.dumps(HEADER)] + [json.dumps(e) for e in events]


def lay_events(rater="L1", sid="s1", most=("cot_sc",), least=("plain_bs",)):
    return [
        {
            "kind": "response",
            "event_id": f"{rater}-{sid}-o",
            "rater_id": rater,
            "role": "layperson",
            "panel": "lay_original",
            "sentence_id": sid,
            "answers": {"q1": "somewhat", "q2": "low_confidence", "q3": "moderate"},
        },
        {
            "kind": "response",
            "event_id": f"{rater}-{sid}-s",
            "rater_id": rater,
            "role": "layperson",
            "panel": "lay_simplified",
            "sentence_id": sid,
            "variant": "cot_sc",
            "answers": {
                "q1": "completely",
                "q2": "high_confidence",
                "q3": "mild",
                "q4": "much_better",
            },
        },
        {
            "kind": "response",
            "event_id": f"{rater}-{sid}-p",
            "rater_id": rater,
            "role": "layperson",
            "panel": "lay_preference",
            "sentence_id": sid,
            "answers": {"most": ["1"], "least": ["2"], "justification": "clear"},
            "resolved": {"most": list(most), "least": list(least)},
        },
    ]


class TestParseExport:
    def test_header_required(self):
        with pytest.raises(DataFormatError):
            parse_export(['{"kind": "response"}'])

    def test_duplicate_header_rejected(self):
        with pytest.raises(DataFormatError):
            parse_export([json.dumps(HEADER), json.dumps(HEADER)])

    def test_severity_map(self):
        export = parse_export(lines_for())
        assert expert_severity_map(export) == {"s1": SeverityLevel.MILD}

    def test_join_panels(self):
        export = parse_export(lines_for(*lay_events()))
        responses, experts = responses_from_export(export)
        assert experts == []
        (resp,) = responses
        assert resp.assigned_variant is VariantTag.COT_SC
        assert resp.q1_orig.value == "somewhat"
        assert resp.q3_simp is SeverityLevel.MILD
        assert resp.most_preferred == frozenset({VariantTag.COT_SC})

    def test_partial_response_allowed(self):
        export = parse_export(lines_for(lay_events()[0]))
        responses, _ = responses_from_export(export)
        (resp,) = responses
        assert resp.q1_simp is None
        assert resp.assigned_variant is VariantTag.COT_SC  # falls back to the plan


class TestBuildReport:
    def test_empty_report(self):
        report = build_report(parse_export(lines_for()))
        assert report.empty
        assert "No responses recorded" in report.render_text()
        payload = report.to_json_dict()
        assert payload["laypeople"] is None

    def test_single_response_report(self):
        report = build_report(parse_export(lines_for(*lay_events())))
        assert not report.empty
        assert report.laypeople["cot_sc"].q1 == 4.0
        assert report.laypeople["original"].q3.mse == pytest.approx(1.0)  # moderate vs mild
        assert report.votes.most[VariantTag.COT_SC] == 1
        assert report.agreement["most"]["alpha"] is None  # one item, insufficient
        text = report.render_text()
        assert "Layperson clarity evaluation" in text
        assert "Majority votes" in text

    def test_perfect_agreement_alpha_one(self, tmp_path):
        events = []
        for rater in ("L1", "L2"):
            events += lay_events(rater=rater, sid="s1", most=("cot_sc",), least=("plain_bs",))
            events += lay_events(rater=rater, sid="s2", most=("plain_sc",), least=("cot_bs",))
        header = dict(HEADER)
        header["sentences"] = [
            {"id": "s1", "text": "x.", "severity": "mild"},
            {"id": "s2", "text": "y.", "severity": "healthy"},
        ]
        header["plan"] = {
            "L1": {"s1": "cot_sc", "s2": "cot_sc"},
            "L2": {"s1": "cot_sc", "s2": "cot_sc"},
        }
        lines = [json.dumps(header)] + [json.dumps(e) for e in events]
        report = build_report(parse_export(lines))
        assert report.agreement["most"]["alpha"] == pytest.approx(1.0, abs=1e-9)
        assert report.agreement["least"]["alpha"] == pytest.approx(1.0, abs=1e-9)

    def test_homogeneous_selections_noted(self):
        events = []
        header = dict(HEADER)
        header["sentences"] = [
            {"id": "s1", "text": "x.", "severity": "mild"},
            {"id": "s2", "text": "y.", "severity": "healthy"},
        ]
        header["plan"] = {
            "L1": {"s1": "cot_sc", "s2": "cot_sc"},
            "L2": {"s1": "cot_sc", "s2": "cot_sc"},
        }
        for rater in ("L1", "L2"):
            for sid in ("s1", "s2"):
                events += lay_events(rater=rater, sid=sid, most=("cot_sc",), least=("plain_bs",))
        lines = [json.dumps(header)] + [json.dumps(e) for e in events]
        report = build_report(parse_export(lines))
        assert report.agreement["most"]["alpha"] is None
        assert "homogeneity" in report.agreement["most"]["note"]

    def test_plot_data_files(self, tmp_path):
        report = build_report(parse_export(lines_for(*lay_events())))
        paths = write_plot_data(report, tmp_path)
        assert [p.name for p in paths] == [
            "confidence_distribution.csv",
            "vote_distribution.csv",
        ]
        confidence = paths[0].read_text(encoding="utf-8").splitlines()
        assert confidence[0] == "source,confidence,count"
        assert len(confidence) == 1 + 5 * 3  # 5 sources x 3 levels
        votes = paths[1].read_text(encoding="utf-8").splitlines()
        assert votes[0] == "direction,variant,votes,sentences"


class TestExportFileRoundTrip:
    def test_service_export_loads_from_disk(self, tmp_path):
        config_path, sentences, _ = write_study(tmp_path)
        store = StudyStore(tmp_path / "state")
        store.load_study(config_path)
        with TestClient(create_app(store)) as client:
            body = client.get(
                "/api/studies/study-test/export", params={"token": "admin-secret"}
            ).text
        export_path = tmp_path / "export.ndjson"
        export_path.write_text(body, encoding="utf-8")
        export = load_export(export_path)
        assert export.header["study_id"] == "study-test"
        assert len(export.header["sentences"]) == len(sentences)
