"""Chat backends: live HTTP client, deterministic scripted backend, cache.

All backends are safe for concurrent ``complete()`` calls. The live client
retries transient failures (timeouts, 429, 5xx) with exponential backoff and
can share a token-bucket rate limiter across sessions. The cache is an
on-disk content-addressed store keyed by a SHA-256 hash of exactly
(model_name, full message history, temperature, seed).
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from pathlib import Path
from typing import Callable, Protocol, Sequence

import httpx

from ..errors import BackendError, ConfigError, DataFormatError, ScriptExhausted
from .messages import ChatMessage, ModelParams, assistant

API_KEY_ENV = "RADSIMP_API_KEY"
BASE_URL_ENV = "RADSIMP_BASE_URL"
DEFAULT_RESPONSE_PATH = "choices.0.message.content"


class ChatBackend(Protocol):
    def complete(self, history: Sequence[ChatMessage], params: ModelParams) -> ChatMessage:
        """Return one assistant message for the given history."""
        ...


class TokenBucket:
    """Blocking token bucket; ``requests_per_minute <= 0`` disables limiting."""

    def __init__(self, requests_per_minute: float = 0.0, clock=time.monotonic, sleep=time.sleep):
        self.rate = requests_per_minute / 60.0
        self.capacity = max(requests_per_minute, 1.0)
        self._tokens = self.capacity
        self._updated = clock()
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self.enabled = requests_per_minute > 0

    def acquire(self) -> None:
        if not self.enabled:
            return
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._updated) * self.rate)
                self._updated = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.rate
            self._sleep(wait)


Rule = tuple[tuple[str, ...], str]


def load_script_rules(path: str | Path) -> list[Rule]:
    """Read keyed-response rules, one ``{"match", "response"}`` object per line."""
    path = Path(path)
    rules: list[Rule] = []
    with path.open(encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise DataFormatError(
                    f"invalid JSON ({exc.msg})", path=path, line=line_no
                ) from exc
            match = obj.get("match")
            response = obj.get("response")
            if isinstance(match, str):
                needles: tuple[str, ...] = (match,)
            elif isinstance(match, list) and match and all(isinstance(m, str) for m in match):
                needles = tuple(match)
            else:
                raise DataFormatError(
                    "'match' must be a string or non-empty list of strings",
                    path=path,
                    line=line_no,
                )
            if not isinstance(response, str) or not response:
                raise DataFormatError(
                    "'response' must be a non-empty string", path=path, line=line_no
                )
            rules.append((needles, response))
    return rules


class ScriptedBackend:
    """Deterministic offline backend for tests and demo runs.

    Responses come from keyed rules (every listed substring must appear in
    the last user message; first matching rule wins) or from a FIFO queue.
    Rules are consulted first; with no matching rule the queue is popped;
    with neither, :class:`ScriptExhausted` is raised.
    """

    def __init__(
        self,
        queue: Sequence[str] | None = None,
        rules: Sequence[Rule] | None = None,
    ):
        self._queue = list(queue or [])
        self._rules = list(rules or [])
        self._lock = threading.Lock()
        self.calls = 0

    @classmethod
    def from_script(cls, path: str | Path) -> "ScriptedBackend":
        return cls(rules=load_script_rules(path))

    def complete(self, history: Sequence[ChatMessage], params: ModelParams) -> ChatMessage:
        if not history:
            raise BackendError("history must be non-empty")
        last_user = next((m.content for m in reversed(history) if m.role == "user"), "")
        with self._lock:
            self.calls += 1
            for needles, response in self._rules:
                if all(needle in last_user for needle in needles):
                    return assistant(response)
            if self._queue:
                return assistant(self._queue.pop(0))
        detail = "no rule matches the prompt" if self._rules else "response queue is empty"
        raise ScriptExhausted(f"scripted backend exhausted: {detail}")


def _dig(payload: object, path: str) -> object:
    current = payload
    for part in path.split("."):
        if isinstance(current, list):
            current = current[int(part)]
        elif isinstance(current, dict):
            current = current[part]
        else:
            raise KeyError(part)
    return current


class HttpChatBackend:
    """Chat-completions client over HTTP+JSON.

    Sends ``{model, messages, temperature, max_tokens}`` (plus ``seed`` when
    set) to ``{base_url}/chat/completions`` and extracts the assistant text
    at ``response_path``. Retries timeouts, 429 and 5xx responses with
    exponential backoff up to ``max_retries``, then raises
    :class:`BackendError` carrying the provider message.
    """

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        *,
        max_retries: int = 3,
        backoff_initial: float = 1.0,
        rate_limiter: TokenBucket | None = None,
        response_path: str = DEFAULT_RESPONSE_PATH,
        sleep: Callable[[float], None] = time.sleep,
        transport: httpx.BaseTransport | None = None,
    ):
        base_url = base_url or os.environ.get(BASE_URL_ENV)
        if not base_url:
            raise ConfigError(f"no base URL configured (set {BASE_URL_ENV} or pass base_url)")
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.max_retries = max_retries
        self.backoff_initial = backoff_initial
        self.rate_limiter = rate_limiter or TokenBucket(0)
        self.response_path = response_path
        self._sleep = sleep
        self._client = httpx.Client(transport=transport)

    def complete(self, history: Sequence[ChatMessage], params: ModelParams) -> ChatMessage:
        if not history:
            raise BackendError("history must be non-empty")
        body = {
            "model": params.model_name,
            "messages": [{"role": m.role, "content": m.content} for m in history],
            "temperature": params.temperature,
            "max_tokens": params.max_output_tokens,
        }
        if params.seed is not None:
            body["seed"] = params.seed
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self.backoff_initial * 2 ** (attempt - 1))
            self.rate_limiter.acquire()
            try:
                response = self._client.post(
                    f"{self.base_url}/chat/completions",
                    json=body,
                    headers=headers,
                    timeout=params.request_timeout,
                )
            except httpx.TimeoutException as exc:
                last_error = exc
                continue
            except httpx.HTTPError as exc:
                raise BackendError(f"network failure: {exc}") from exc
            if response.status_code == 429 or response.status_code >= 500:
                last_error = BackendError(
                    f"provider status {response.status_code}: {response.text[:500]}"
                )
                continue
            if response.status_code != 200:
                raise BackendError(
                    f"provider status {response.status_code}: {response.text[:500]}"
                )
            try:
                content = _dig(response.json(), self.response_path)
            except (KeyError, IndexError, ValueError) as exc:
                raise BackendError(
                    f"response missing field path {self.response_path!r}"
                ) from exc
            if not isinstance(content, str) or not content:
                raise BackendError("provider returned empty content")
            return assistant(content)
        raise BackendError(
            f"gave up after {self.max_retries} retries: {last_error}"
        ) from last_error


class CachingBackend:
    """Content-addressed response cache wrapped around another backend.

    The key hashes exactly (model_name, full message history, temperature,
    seed); changing any one component is a cache miss. Hits never touch the
    inner backend.
    """

    def __init__(self, inner: ChatBackend, cache_dir: str | Path):
        self.inner = inner
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    @staticmethod
    def cache_key(history: Sequence[ChatMessage], params: ModelParams) -> str:
        payload = json.dumps(
            {
                "model": params.model_name,
                "messages": [[m.role, m.content] for m in history],
                "temperature": params.temperature,
                "seed": params.seed,
            },
            ensure_ascii=False,
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def _path(self, key: str) -> Path:
        return self.cache_dir / key[:2] / f"{key}.json"

    def complete(self, history: Sequence[ChatMessage], params: ModelParams) -> ChatMessage:
        path = self._path(self.cache_key(history, params))
        if path.exists():
            self.hits += 1
            content = json.loads(path.read_text(encoding="utf-8"))["content"]
            return assistant(content)
        self.misses += 1
        response = self.inner.complete(history, params)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(f".tmp.{os.getpid()}.{threading.get_ident()}")
        tmp.write_text(
            json.dumps({"content": response.content}, ensure_ascii=False), encoding="utf-8"
        )
        tmp.replace(path)
        return response
