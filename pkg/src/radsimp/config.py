"""Run configuration for generation commands, loaded from a JSON file."""
from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .llm.backends import DEFAULT_RESPONSE_PATH

BACKEND_KINDS = ("live", "scripted", "cached")


@dataclass
class RunConfig:
    """Model, retry, cache, and loop settings; CLI flags override per field."""

    model_name: str = "gpt-3.5-turbo"
    temperature: float = 0.8
    max_output_tokens: int = 1024
    request_timeout: float = 60.0
    seed: int | None = None
    rate_limit_per_minute: float = 0.0
    cache_dir: str = ".radsimp_cache"
    max_retries: int = 3
    backoff_initial: float = 1.0
    max_refine_rounds: int = 5
    stop_prefix: str = "No"
    worker_count: int = 1
    backend: str = "scripted"
    script_path: str | None = None
    templates_path: str | None = None
    base_url: str | None = None
    response_path: str = DEFAULT_RESPONSE_PATH
    trim_cot: bool = False

    def __post_init__(self) -> None:
        if self.backend not in BACKEND_KINDS:
            raise ConfigError(f"backend must be one of {BACKEND_KINDS}, got {self.backend!r}")
        if self.worker_count < 1:
            raise ConfigError("worker_count must be >= 1")


def load_run_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(obj) - known
    if unknown:
        raise ConfigError(f"{path}: unknown config key(s) {sorted(unknown)}")
    try:
        config = RunConfig(**obj)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    # resolve file paths relative to the config file
    base = path.parent
    if config.script_path:
        config.script_path = str((base / config.script_path).resolve())
    if config.templates_path:
        config.templates_path = str((base / config.templates_path).resolve())
    return config
