"""Shared fixtures: synthetic studies and a scripted rater for HTTP sessions."""
from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from radsimp.corpus import (
    ALL_VARIANTS,
    SimplificationRecord,
    demo_corpus_path,
    load_corpus,
    save_simplifications,
)


def synth_records(sentences):
    records = []
    for sentence in sentences:
        for variant in ALL_VARIANTS:
            records.append(
                SimplificationRecord(
                    sentence_id=sentence.id,
                    variant=variant,
                    text=f"Plain words for {sentence.id} via {variant.value}.",
                    iterations=1 if variant.self_corrected else 0,
                    transcript_ref=f"{sentence.id}:{variant.value}",
                )
            )
    return records


def write_study(
    tmp_path: Path,
    *,
    study_id="study-test",
    n_sentences=4,
    n_laypeople=2,
    n_experts=1,
    seed=5,
    admin_token="admin-secret",
    records=None,
):
    """Materialize corpus/simplifications/config files for a small study."""
    sentences = load_corpus(demo_corpus_path())[:n_sentences]
    corpus_path = tmp_path / "corpus.jsonl"
    with corpus_path.open("w", encoding="utf-8") as handle:
        for s in sentences:
            obj = {"id": s.id, "text": s.text, "severity": s.expert_severity.value}
            handle.write(json.dumps(obj) + "\n")
    if records is None:
        records = synth_records(sentences)
    simp_path = tmp_path / "simplifications.jsonl"
    save_simplifications(records, simp_path)
    raters = [
        {"id": f"L{i + 1}", "role": "layperson", "token": f"tok-l{i + 1}"}
        for i in range(n_laypeople)
    ] + [
        {"id": f"E{i + 1}", "role": "expert", "token": f"tok-e{i + 1}"}
        for i in range(n_experts)
    ]
    config = {
        "study_id": study_id,
        "corpus": corpus_path.name,
        "simplifications": simp_path.name,
        "seed": seed,
        "raters": raters,
        "admin_token": admin_token,
    }
    config_path = tmp_path / "study.json"
    config_path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return config_path, sentences, records


def answer_item(item: dict, rng: random.Random) -> dict:
    """Deterministic plausible answers for a served item."""
    answers = {}
    for question in item["questions"]:
        kind = question["kind"]
        if kind == "single_choice":
            answers[question["id"]] = rng.choice(question["options"])["value"]
        elif kind == "likert":
            answers[question["id"]] = rng.randint(1, 5)
        elif kind == "multi_choice":
            values = [opt["value"] for opt in question["options"]]
            take = rng.randint(1, max(1, len(values) - 2))
            answers[question["id"]] = rng.sample(values, take)
        else:
            answers[question["id"]] = f"note {rng.randint(0, 999)}"
    return answers


def run_rater_session(client, study_id: str, token: str, rng: random.Random, limit=10_000):
    """Drive one rater through the whole study over HTTP; returns items answered."""
    answered = 0
    for _ in range(limit):
        response = client.get(f"/api/studies/{study_id}/next", params={"rater": token})
        assert response.status_code == 200, response.text
        payload = response.json()
        if payload["done"]:
            return answered
        item = payload["item"]
        submit = client.post(
            f"/api/studies/{study_id}/responses",
            json={
                "event_id": f"evt-{item['item_id']}",
                "rater": token,
                "item_id": item["item_id"],
                "answers": answer_item(item, rng),
            },
        )
        assert submit.status_code == 200, submit.text
        assert submit.json()["status"] == "accepted"
        answered += 1
    raise AssertionError("rater session did not terminate")


@pytest.fixture
def small_study(tmp_path):
    config_path, sentences, records = write_study(tmp_path)
    return config_path, sentences, records
