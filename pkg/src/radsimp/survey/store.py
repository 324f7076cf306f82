"""Durable study state: append-only event log plus an in-memory index.

Every accepted submission is appended to the study's log file, flushed, and
fsynced before it is acknowledged, so acknowledged events survive a hard
kill. On startup the log is replayed to rebuild the index; a torn final
line (an unacknowledged partial write) is dropped.
"""
from __future__ import annotations

import datetime as _dt
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator, Mapping

from ..errors import (
    AlreadyAnswered,
    ConfigError,
    DataFormatError,
    OutOfSequence,
    StudyClosed,
    UnknownItem,
    UnknownRater,
)
from .study import (
    Panel,
    StudyConfig,
    StudyDefinition,
    StudyState,
    SurveyItem,
    build_definition,
    load_study_config,
)

ADMIN_TOKEN_ENV = "RADSIMP_ADMIN_TOKEN"


def _utcnow() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


@dataclass(frozen=True)
class ResponseEvent:
    """A client submission; ``event_id`` is the idempotency key."""

    event_id: str
    rater_token: str
    item_id: str
    answers: Mapping[str, Any]
    submitted_at: str | None = None


class EventLog:
    """Append-only JSON-lines log with fsync-before-acknowledge semantics."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False) + "\n"
        with self._lock:
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(line)
                handle.flush()
                os.fsync(handle.fileno())

    def replay(self) -> list[dict]:
        """Read back all complete records; a torn final line is dropped."""
        if not self.path.exists():
            return []
        lines = self.path.read_text(encoding="utf-8").splitlines()
        records: list[dict] = []
        for line_no, raw in enumerate(lines, start=1):
            if not raw.strip():
                continue
            try:
                records.append(json.loads(raw))
            except json.JSONDecodeError as exc:
                if line_no == len(lines):
                    break
                raise DataFormatError(
                    f"corrupt event log ({exc.msg})", path=self.path, line=line_no
                ) from exc
        return records


class StudyRuntime:
    """One study's definition, log, and submission index."""

    def __init__(self, definition: StudyDefinition, log: EventLog):
        self.definition = definition
        self.log = log
        self.state = definition.config.state
        self._lock = threading.Lock()
        self._by_event: dict[str, dict] = {}
        self._by_item: dict[tuple[str, str], dict] = {}
        self._responses: list[dict] = []
        for record in log.replay():
            kind = record.get("kind", "response")
            if kind == "state":
                self.state = StudyState(record["state"])
            else:
                self._index(record)

    @property
    def study_id(self) -> str:
        return self.definition.config.study_id

    def _index(self, record: dict) -> None:
        self._by_event[record["event_id"]] = record
        self._by_item[(record["rater_id"], record["item_id"])] = record
        self._responses.append(record)

    def _resolve_rater(self, token: str):
        rater = self.definition.by_token.get(token)
        if rater is None:
            raise UnknownRater("unknown rater token")
        return rater

    def progress(self, rater_id: str) -> tuple[int, int]:
        items = self.definition.items_for(rater_id)
        done = sum(1 for item in items if (rater_id, item.item_id) in self._by_item)
        return done, len(items)

    def next_item(self, rater_token: str) -> SurveyItem | None:
        """First unanswered item in the rater's fixed sequence, or None when done."""
        if self.state is not StudyState.OPEN:
            raise StudyClosed(f"study {self.study_id!r} is {self.state.value}")
        rater = self._resolve_rater(rater_token)
        with self._lock:
            for item in self.definition.items_for(rater.id):
                if (rater.id, item.item_id) not in self._by_item:
                    return item
        return None

    def submit(self, event: ResponseEvent) -> str:
        """Validate, durably append, and index one submission.

        Returns "accepted", or "duplicate" when the same event was already
        recorded (nothing is double-recorded).
        """
        if self.state is not StudyState.OPEN:
            raise StudyClosed(f"study {self.study_id!r} is {self.state.value}")
        rater = self._resolve_rater(event.rater_token)
        item = self.definition.item(rater.id, event.item_id)
        if item is None:
            raise UnknownItem(f"no item {event.item_id!r} for this rater")
        with self._lock:
            existing = self._by_event.get(event.event_id)
            if existing is not None:
                if (
                    existing["item_id"] == event.item_id
                    and existing["rater_id"] == rater.id
                ):
                    return "duplicate"
                raise OutOfSequence("event_id was already used for a different item")
            if (rater.id, event.item_id) in self._by_item:
                raise AlreadyAnswered("a different event already answered this item")
            current = next(
                (
                    candidate
                    for candidate in self.definition.items_for(rater.id)
                    if (rater.id, candidate.item_id) not in self._by_item
                ),
                None,
            )
            if current is None or current.item_id != event.item_id:
                raise OutOfSequence(
                    f"expected submission for {current.item_id if current else 'nothing'}"
                )
            answers = self.definition.validate_answers(item, event.answers)
            record = {
                "kind": "response",
                "event_id": event.event_id,
                "rater_id": rater.id,
                "role": rater.role,
                "item_id": item.item_id,
                "panel": item.panel.value,
                "sentence_id": item.sentence_id,
                "answers": answers,
                "submitted_at": event.submitted_at,
                "accepted_at": _utcnow(),
            }
            self.log.append(record)  # durable before acknowledgement
            self._index(record)
            return "accepted"

    def close(self) -> None:
        with self._lock:
            self.state = StudyState.CLOSED
            self.log.append({"kind": "state", "state": "closed", "at": _utcnow()})

    # Export ---------------------------------------------------------------

    def _resolved_fields(self, record: dict) -> dict:
        """Attach variant resolution so the export is self-describing."""
        definition = self.definition
        rater_id = record["rater_id"]
        sid = record["sentence_id"]
        panel = record["panel"]
        extra: dict[str, Any] = {}
        if panel == Panel.LAY_SIMPLIFIED.value:
            extra["variant"] = definition.plan[rater_id][sid].value
        elif panel == Panel.LAY_PREFERENCE.value:
            order = definition.preference_order[rater_id][sid]
            resolve = lambda keys: [order[int(k) - 1].value for k in keys]
            extra["resolved"] = {
                "most": resolve(record["answers"]["most"]),
                "least": resolve(record["answers"]["least"]),
            }
        elif panel == Panel.EXPERT_RATING.value:
            extra["variant"] = definition.expert_item_map()[record["item_id"]]["variant"]
        return extra

    def export_header(self) -> dict:
        definition = self.definition
        config = definition.config
        return {
            "kind": "header",
            "study_id": config.study_id,
            "state": self.state.value,
            "exported_at": _utcnow(),
            "seed": config.seed,
            "sentences": [
                {
                    "id": s.id,
                    "text": s.text,
                    "severity": s.expert_severity.value if s.expert_severity else None,
                }
                for s in definition.sentences
            ],
            "simplifications": {
                sid: {variant.value: record.text for variant, record in by_variant.items()}
                for sid, by_variant in definition.simplifications.items()
            },
            "roster": [{"id": r.id, "role": r.role} for r in config.raters],
            "plan": {
                rater_id: {sid: variant.value for sid, variant in assignments.items()}
                for rater_id, assignments in definition.plan.items()
            },
            "preference_order": {
                rater_id: {sid: [v.value for v in order] for sid, order in orders.items()}
                for rater_id, orders in definition.preference_order.items()
            },
            "expert_items": definition.expert_item_map(),
        }

    def export_lines(self) -> Iterator[str]:
        """Lossless export: header line, then one line per accepted event."""
        yield json.dumps(self.export_header(), ensure_ascii=False)
        with self._lock:
            records = list(self._responses)
        for record in records:
            enriched = dict(record) | self._resolved_fields(record)
            enriched["kind"] = "response"
            yield json.dumps(enriched, ensure_ascii=False)


class StudyStore:
    """Loads studies and owns their event logs under one state directory."""

    def __init__(self, study_dir: str | Path):
        self.study_dir = Path(study_dir)
        self.study_dir.mkdir(parents=True, exist_ok=True)
        self.studies: dict[str, StudyRuntime] = {}

    def log_path(self, study_id: str) -> Path:
        return self.study_dir / f"{study_id}.events.jsonl"

    def load_study(self, config_path: str | Path) -> StudyRuntime:
        config = load_study_config(config_path)
        definition = build_definition(config)
        runtime = StudyRuntime(definition, EventLog(self.log_path(config.study_id)))
        self.studies[config.study_id] = runtime
        return runtime

    def add(self, definition: StudyDefinition) -> StudyRuntime:
        runtime = StudyRuntime(
            definition, EventLog(self.log_path(definition.config.study_id))
        )
        self.studies[definition.config.study_id] = runtime
        return runtime

    def get(self, study_id: str) -> StudyRuntime:
        if study_id not in self.studies:
            raise KeyError(study_id)
        return self.studies[study_id]

    def admin_token(self, study_id: str) -> str:
        env_token = os.environ.get(ADMIN_TOKEN_ENV)
        if env_token:
            return env_token
        config_token = self.get(study_id).definition.config.admin_token
        if config_token:
            return config_token
        raise ConfigError(
            f"no admin token configured (set {ADMIN_TOKEN_ENV} or 'admin_token' in the study config)"
        )
