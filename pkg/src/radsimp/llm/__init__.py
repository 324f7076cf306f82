"""Pluggable chat-model backends with transcripts, caching, and rate limiting."""

from .backends import (
    CachingBackend,
    ChatBackend,
    HttpChatBackend,
    ScriptedBackend,
    TokenBucket,
    load_script_rules,
)
from .messages import (
    ChatMessage,
    LogicalClock,
    ModelParams,
    Transcript,
    TranscriptStore,
    TranscriptTurn,
    record_turn,
)

__all__ = [
    "CachingBackend",
    "ChatBackend",
    "ChatMessage",
    "HttpChatBackend",
    "LogicalClock",
    "ModelParams",
    "ScriptedBackend",
    "TokenBucket",
    "Transcript",
    "TranscriptStore",
    "TranscriptTurn",
    "load_script_rules",
    "record_turn",
]
