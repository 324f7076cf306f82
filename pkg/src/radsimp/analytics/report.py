"""Ingest survey exports and assemble the full analytics report.

The report mirrors the study's result tables: expert Likert means per
variant, the layperson clarity block (Q1/Q2 means, Q3 MSE and accuracy, Q4
mean), confidence strata, majority-vote tallies with tie flags, and
Krippendorff's alpha with MASI distance for the most/least selections.
Histogram data for the confidence and vote distributions is emitted as CSV.
"""
from __future__ import annotations

import csv
import datetime as _dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from ..corpus import ALL_VARIANTS, SeverityLevel, VariantTag
from ..errors import DataFormatError, EmptyGroup, InsufficientData, PerfectHomogeneity
from .agreement import krippendorff_alpha, masi_distance
from .answers import (
    ExpertRating,
    LaypersonResponse,
    Q1Level,
    Q2Level,
    Q4Level,
    validate_preferences,
)
from .stats import (
    ColumnAggregates,
    ErrorStats,
    MajorityVotes,
    confidence_distribution,
    confidence_strata,
    expert_aggregates,
    majority_votes,
    question_aggregates,
    vote_distribution,
)

ORIGINAL = "original"


@dataclass(frozen=True)
class SurveyExport:
    header: dict
    events: list[dict]


def parse_export(lines: Iterable[str], *, source: object = None) -> SurveyExport:
    header: dict | None = None
    events: list[dict] = []
    for line_no, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"invalid JSON ({exc.msg})", path=source, line=line_no) from exc
        kind = obj.get("kind")
        if kind == "header":
            if header is not None:
                raise DataFormatError("duplicate header", path=source, line=line_no)
            header = obj
        elif kind == "response":
            events.append(obj)
        else:
            raise DataFormatError(f"unknown record kind {kind!r}", path=source, line=line_no)
    if header is None:
        raise DataFormatError("export has no header line", path=source)
    return SurveyExport(header=header, events=events)


def load_export(path: str | Path) -> SurveyExport:
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        return parse_export(handle, source=path)


def expert_severity_map(export: SurveyExport) -> dict[str, SeverityLevel]:
    labels = {}
    for sentence in export.header.get("sentences", []):
        severity = sentence.get("severity")
        if severity:
            labels[sentence["id"]] = SeverityLevel(severity)
    return labels


def responses_from_export(
    export: SurveyExport,
) -> tuple[list[LaypersonResponse], list[ExpertRating]]:
    """Join the panel events back into per-(rater, sentence) response records."""
    plan = export.header.get("plan", {})
    partial: dict[tuple[str, str], dict] = {}
    experts: list[ExpertRating] = []
    for event in export.events:
        rater_id = event["rater_id"]
        sid = event["sentence_id"]
        panel = event["panel"]
        answers = event["answers"]
        if panel == "expert_rating":
            experts.append(
                ExpertRating(
                    rater_id=rater_id,
                    sentence_id=sid,
                    variant=VariantTag(event["variant"]),
                    correctness=answers["correctness"],
                    completeness=answers["completeness"],
                    hallucination=answers["hallucination"],
                    structure=answers["structure"],
                    simplicity=answers["simplicity"],
                    severity=SeverityLevel(answers["severity"]),
                    justification=answers.get("justification") or "",
                )
            )
            continue
        key = (rater_id, sid)
        slot = partial.setdefault(key, {})
        if panel == "lay_original":
            slot["q1_orig"] = Q1Level(answers["q1"])
            slot["q2_orig"] = Q2Level(answers["q2"])
            slot["q3_orig"] = SeverityLevel(answers["q3"])
        elif panel == "lay_simplified":
            slot["q1_simp"] = Q1Level(answers["q1"])
            slot["q2_simp"] = Q2Level(answers["q2"])
            slot["q3_simp"] = SeverityLevel(answers["q3"])
            slot["q4"] = Q4Level(answers["q4"])
            slot["variant"] = VariantTag(event["variant"])
        elif panel == "lay_preference":
            resolved = event.get("resolved", {})
            slot["most_preferred"] = frozenset(
                VariantTag(v) for v in resolved.get("most", [])
            )
            slot["least_preferred"] = frozenset(
                VariantTag(v) for v in resolved.get("least", [])
            )
            slot["justification"] = answers.get("justification") or ""
        else:
            raise DataFormatError(f"unknown panel {panel!r} in export")
    responses = []
    for (rater_id, sid), slot in partial.items():
        assigned = slot.get("variant")
        if assigned is None:
            planned = plan.get(rater_id, {}).get(sid)
            if planned is None:
                raise DataFormatError(
                    f"no assigned variant for rater {rater_id!r} sentence {sid!r}"
                )
            assigned = VariantTag(planned)
        slot.pop("variant", None)
        responses.append(
            LaypersonResponse(rater_id=rater_id, sentence_id=sid, assigned_variant=assigned, **slot)
        )
    responses.sort(key=lambda r: (r.rater_id, r.sentence_id))
    return responses, experts


@dataclass
class AnalyticsReport:
    study_id: str
    generated_at: str
    empty: bool
    counts: dict
    warnings: list[str] = field(default_factory=list)
    laypeople: dict[str, ColumnAggregates] | None = None
    expert: dict[str, dict[str, float]] | None = None
    strata: dict[Q2Level, ErrorStats] | None = None
    confidence_hist: dict[str, dict[Q2Level, int]] | None = None
    votes: MajorityVotes | None = None
    votes_hist: dict | None = None
    agreement: dict[str, dict] = field(default_factory=dict)
    readability: dict[str, dict[str, float]] | None = None

    def to_json_dict(self) -> dict:
        def column(agg: ColumnAggregates) -> dict:
            return {
                "q1": agg.q1,
                "q2": agg.q2,
                "q3_mse": agg.q3.mse if agg.q3 else None,
                "q3_acc": agg.q3.accuracy if agg.q3 else None,
                "q3_n": agg.q3.n if agg.q3 else 0,
                "q4": agg.q4,
                "n": agg.n,
            }

        payload: dict = {
            "study_id": self.study_id,
            "generated_at": self.generated_at,
            "empty": self.empty,
            "counts": self.counts,
            "warnings": self.warnings,
            "agreement": self.agreement,
        }
        payload["laypeople"] = (
            {name: column(agg) for name, agg in self.laypeople.items()}
            if self.laypeople
            else None
        )
        payload["expert"] = self.expert
        payload["confidence_strata"] = (
            {
                level.value: {"mse": s.mse, "accuracy": s.accuracy, "n": s.n}
                for level, s in self.strata.items()
            }
            if self.strata is not None
            else None
        )
        payload["confidence_distribution"] = (
            {
                source: {level.value: count for level, count in hist.items()}
                for source, hist in self.confidence_hist.items()
            }
            if self.confidence_hist is not None
            else None
        )
        payload["majority_votes"] = (
            {
                "most": {v.value: self.votes.most[v] for v in ALL_VARIANTS},
                "least": {v.value: self.votes.least[v] for v in ALL_VARIANTS},
                "ties": self.votes.ties,
                "n_sentences": self.votes.n_sentences,
            }
            if self.votes is not None
            else None
        )
        payload["vote_distribution"] = (
            {
                direction: {
                    variant.value: {str(k): n for k, n in sorted(counter.items())}
                    for variant, counter in per_variant.items()
                }
                for direction, per_variant in self.votes_hist.items()
            }
            if self.votes_hist is not None
            else None
        )
        payload["readability"] = self.readability
        return payload

    def render_text(self) -> str:
        lines = [f"Analytics report for study {self.study_id!r}"]
        lines.append(
            "responses: {responses}  laypeople: {laypeople}  experts: {experts}".format(
                **self.counts
            )
        )
        if self.empty:
            lines.append("")
            lines.append("No responses recorded; nothing to analyze.")
            return "\n".join(lines)
        for warning in self.warnings:
            lines.append(f"warning: {warning}")

        def table(rows: list[list[str]]) -> list[str]:
            widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
            out = []
            for i, row in enumerate(rows):
                out.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
                if i == 0:
                    out.append("-" * len(out[-1]))
            return out

        def fmt(value, pattern="{:.3f}") -> str:
            return pattern.format(value) if value is not None else "N/A"

        if self.readability:
            lines += ["", "Readability (means, lower is simpler)"]
            header = ["Metric", "Original"] + [v.label for v in ALL_VARIANTS]
            rows = [header]
            for metric in ("fkgl", "gfi", "ari"):
                rows.append(
                    [metric.upper()]
                    + [
                        fmt(self.readability.get(col, {}).get(metric))
                        for col in [ORIGINAL] + [v.value for v in ALL_VARIANTS]
                    ]
                )
            lines += table(rows)

        if self.expert:
            lines += ["", "Expert evaluation (Likert 1-5 means)"]
            header = ["Axis"] + [v.label for v in ALL_VARIANTS]
            rows = [header]
            for axis in ("correctness", "completeness", "hallucination", "structure", "simplicity"):
                rows.append(
                    [axis.capitalize()]
                    + [
                        fmt(self.expert.get(v.value, {}).get(axis))
                        for v in ALL_VARIANTS
                    ]
                )
            lines += table(rows)

        if self.laypeople:
            lines += ["", "Layperson clarity evaluation"]
            columns = [ORIGINAL] + [v.value for v in ALL_VARIANTS]
            header = ["Question"] + ["Original"] + [v.label for v in ALL_VARIANTS]
            rows = [header]
            get = lambda col: self.laypeople.get(col)
            rows.append(["Q1 (1 to 4)"] + [fmt(get(c).q1 if get(c) else None) for c in columns])
            rows.append(["Q2 (1 to 3)"] + [fmt(get(c).q2 if get(c) else None) for c in columns])
            rows.append(
                ["Q3 (MSE)"]
                + [fmt(get(c).q3.mse if get(c) and get(c).q3 else None) for c in columns]
            )
            rows.append(
                ["Q3 (ACC)"]
                + [
                    fmt(get(c).q3.accuracy if get(c) and get(c).q3 else None, "{:.1%}")
                    for c in columns
                ]
            )
            rows.append(["Q4 (-1 to 2)"] + [fmt(get(c).q4 if get(c) else None) for c in columns])
            lines += table(rows)

        if self.strata is not None:
            lines += ["", "Confidence vs severity error (phases pooled)"]
            levels = [Q2Level.NOT_AT_ALL, Q2Level.LOW_CONFIDENCE, Q2Level.HIGH_CONFIDENCE]
            header = [""] + ["Not at all", "Low confidence", "High confidence"]
            rows = [header]
            rows.append(
                ["MSE"] + [fmt(self.strata[l].mse if l in self.strata else None) for l in levels]
            )
            rows.append(
                ["Accuracy"]
                + [
                    fmt(self.strata[l].accuracy if l in self.strata else None, "{:.1%}")
                    for l in levels
                ]
            )
            rows.append(
                ["n"] + [str(self.strata[l].n) if l in self.strata else "0" for l in levels]
            )
            lines += table(rows)

        if self.votes is not None:
            lines += ["", f"Majority votes over {self.votes.n_sentences} sentences"]
            rows = [[""] + [v.label for v in ALL_VARIANTS]]
            rows.append(["Most"] + [str(self.votes.most[v]) for v in ALL_VARIANTS])
            rows.append(["Least"] + [str(self.votes.least[v]) for v in ALL_VARIANTS])
            lines += table(rows)
            for direction in ("most", "least"):
                if self.votes.ties[direction]:
                    lines.append(
                        f"ties ({direction}): {', '.join(self.votes.ties[direction])}"
                    )

        if self.agreement:
            lines += ["", "Inter-annotator agreement (Krippendorff alpha, MASI distance)"]
            for direction in ("most", "least"):
                info = self.agreement.get(direction)
                if not info:
                    continue
                alpha = info.get("alpha")
                note = f" ({info['note']})" if info.get("note") else ""
                lines.append(
                    f"{direction}: alpha={fmt(alpha)}{note} "
                    f"[{info['n_items']} items, {info['n_ratings']} ratings]"
                )
        return "\n".join(lines)


def _alpha_block(responses: list[LaypersonResponse], direction: str) -> dict:
    ratings = []
    for resp in responses:
        label = resp.most_preferred if direction == "most" else resp.least_preferred
        if label:
            ratings.append((resp.sentence_id, resp.rater_id, label))
    block: dict = {
        "n_items": len({item for item, _, _ in ratings}),
        "n_ratings": len(ratings),
        "alpha": None,
        "note": None,
    }
    try:
        block["alpha"] = krippendorff_alpha(ratings, masi_distance)
    except PerfectHomogeneity:
        block["note"] = "perfect homogeneity: all selections identical"
    except InsufficientData as exc:
        block["note"] = str(exc)
    return block


def assemble_report(
    study_id: str,
    responses: list[LaypersonResponse],
    expert_ratings: list[ExpertRating],
    labels: Mapping[str, SeverityLevel],
    n_events: int,
) -> AnalyticsReport:
    """Compute every analysis the data supports; absent data stays absent."""
    counts = {
        "responses": n_events,
        "laypeople": len({r.rater_id for r in responses}),
        "experts": len({r.rater_id for r in expert_ratings}),
    }
    report = AnalyticsReport(
        study_id=study_id,
        generated_at=_dt.datetime.now(_dt.timezone.utc).isoformat(),
        empty=n_events == 0,
        counts=counts,
    )
    if report.empty:
        return report
    report.warnings = validate_preferences(responses)
    if responses:
        report.laypeople = question_aggregates(
            responses, labels, require_all_groups=False
        )
        report.strata = confidence_strata(responses, labels)
        report.confidence_hist = confidence_distribution(responses)
        with_preferences = [r for r in responses if r.most_preferred or r.least_preferred]
        if with_preferences:
            report.votes = majority_votes(responses)
            report.votes_hist = vote_distribution(responses)
            report.agreement = {
                "most": _alpha_block(responses, "most"),
                "least": _alpha_block(responses, "least"),
            }
    if expert_ratings:
        try:
            report.expert = expert_aggregates(expert_ratings)
        except EmptyGroup:
            report.expert = None
    return report


def build_report(
    export: SurveyExport,
    expert_labels: Mapping[str, SeverityLevel] | None = None,
) -> AnalyticsReport:
    responses, expert_ratings = responses_from_export(export)
    labels = dict(expert_severity_map(export))
    if expert_labels:
        labels.update(expert_labels)
    return assemble_report(
        export.header.get("study_id", "unknown"),
        responses,
        expert_ratings,
        labels,
        len(export.events),
    )


def build_report_from_responses(
    study_id: str,
    responses: list[LaypersonResponse],
    expert_ratings: list[ExpertRating],
    expert_labels: Mapping[str, SeverityLevel],
) -> AnalyticsReport:
    """Report over CSV-imported (or otherwise assembled) response records."""
    n_events = len(responses) + len(expert_ratings)
    return assemble_report(study_id, responses, expert_ratings, expert_labels, n_events)


def write_plot_data(report: AnalyticsReport, outdir: str | Path) -> list[Path]:
    """Emit CSV data for the confidence and vote distribution figures."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    confidence_path = outdir / "confidence_distribution.csv"
    with confidence_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["source", "confidence", "count"])
        if report.confidence_hist:
            for source in [ORIGINAL] + [v.value for v in ALL_VARIANTS]:
                for level in Q2Level:
                    writer.writerow(
                        [source, level.value, report.confidence_hist[source][level]]
                    )
    written.append(confidence_path)

    votes_path = outdir / "vote_distribution.csv"
    with votes_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["direction", "variant", "votes", "sentences"])
        if report.votes_hist:
            for direction in ("most", "least"):
                for variant in ALL_VARIANTS:
                    counter = report.votes_hist[direction][variant]
                    for votes_count in sorted(counter):
                        writer.writerow(
                            [direction, variant.value, votes_count, counter[votes_count]]
                        )
    written.append(votes_path)
    return written
