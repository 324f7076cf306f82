"""Chat messages, model parameters, and append-only session transcripts.

Transcripts are immutable: recording a turn returns a new transcript value,
so a transcript handed to a caller can never change underneath it. The
store keeps one JSON object per line and accepts concurrent writers of
distinct transcripts.
"""
from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterator, Sequence

from ..errors import DataFormatError, TranscriptFinalized

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")
        if not self.content:
            raise ValueError("message content must be non-empty")


def system(content: str) -> ChatMessage:
    return ChatMessage("system", content)


def user(content: str) -> ChatMessage:
    return ChatMessage("user", content)


def assistant(content: str) -> ChatMessage:
    return ChatMessage("assistant", content)


@dataclass(frozen=True)
class ModelParams:
    """Sampling and transport parameters for one completion call."""

    model_name: str = "gpt-3.5-turbo"
    temperature: float = 0.8
    max_output_tokens: int = 1024
    request_timeout: float = 60.0
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")


@dataclass(frozen=True)
class TranscriptTurn:
    agent: str
    request: tuple[ChatMessage, ...]
    response: ChatMessage
    timestamp: float
    params: ModelParams


@dataclass(frozen=True)
class Transcript:
    """Ordered prompt/response turns of one simplification session."""

    id: str
    session_label: str
    turns: tuple[TranscriptTurn, ...] = ()
    finalized: bool = False


def record_turn(
    transcript: Transcript,
    agent: str,
    request: Sequence[ChatMessage],
    response: ChatMessage,
    *,
    params: ModelParams,
    timestamp: float,
) -> Transcript:
    """Return a transcript with exactly one appended turn; prior turns untouched."""
    if transcript.finalized:
        raise TranscriptFinalized(f"transcript {transcript.id!r} is finalized")
    turn = TranscriptTurn(
        agent=agent,
        request=tuple(request),
        response=response,
        timestamp=timestamp,
        params=params,
    )
    return replace(transcript, turns=transcript.turns + (turn,))


def finalize(transcript: Transcript) -> Transcript:
    return replace(transcript, finalized=True)


class LogicalClock:
    """Deterministic per-session clock: 0, 1, 2, ... instead of wall time."""

    def __init__(self) -> None:
        self._next = 0

    def __call__(self) -> float:
        value = self._next
        self._next += 1
        return float(value)


Clock = Callable[[], float]

wall_clock: Clock = time.time


def _message_to_dict(message: ChatMessage) -> dict:
    return {"role": message.role, "content": message.content}


def _params_to_dict(params: ModelParams) -> dict:
    return {
        "model_name": params.model_name,
        "temperature": params.temperature,
        "max_output_tokens": params.max_output_tokens,
        "request_timeout": params.request_timeout,
        "seed": params.seed,
    }


def transcript_to_dict(transcript: Transcript) -> dict:
    return {
        "id": transcript.id,
        "session_label": transcript.session_label,
        "finalized": transcript.finalized,
        "turns": [
            {
                "agent": turn.agent,
                "request": [_message_to_dict(m) for m in turn.request],
                "response": _message_to_dict(turn.response),
                "timestamp": turn.timestamp,
                "params": _params_to_dict(turn.params),
            }
            for turn in transcript.turns
        ],
    }


def transcript_from_dict(obj: dict) -> Transcript:
    try:
        turns = tuple(
            TranscriptTurn(
                agent=t["agent"],
                request=tuple(ChatMessage(**m) for m in t["request"]),
                response=ChatMessage(**t["response"]),
                timestamp=t["timestamp"],
                params=ModelParams(**t["params"]),
            )
            for t in obj["turns"]
        )
        return Transcript(
            id=obj["id"],
            session_label=obj["session_label"],
            turns=turns,
            finalized=obj.get("finalized", False),
        )
    except (KeyError, TypeError) as exc:
        raise DataFormatError(f"malformed transcript record: {exc}") from exc


class TranscriptStore:
    """Line-delimited transcript file with serialized appends."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def save(self, transcript: Transcript) -> None:
        line = json.dumps(transcript_to_dict(transcript), ensure_ascii=False) + "\n"
        with self._lock:
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(line)
                handle.flush()

    def __iter__(self) -> Iterator[Transcript]:
        if not self.path.exists():
            return
        with self.path.open(encoding="utf-8") as handle:
            for line_no, raw in enumerate(handle, start=1):
                if not raw.strip():
                    continue
                try:
                    obj = json.loads(raw)
                except json.JSONDecodeError as exc:
                    raise DataFormatError(
                        f"invalid JSON ({exc.msg})", path=self.path, line=line_no
                    ) from exc
                yield transcript_from_dict(obj)

    def load(self, transcript_id: str) -> Transcript:
        for transcript in self:
            if transcript.id == transcript_id:
                return transcript
        raise KeyError(transcript_id)
