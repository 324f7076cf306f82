"""Prompt strategies and the four-agent self-correction loop."""

from .loop import (
    AGENT_GENERATOR,
    AGENT_PATIENT,
    AGENT_PROCESSOR_PATIENT,
    AGENT_PROCESSOR_RADIOLOGIST,
    AGENT_RADIOLOGIST,
    LoopAborted,
    LoopConfig,
    LoopOutcome,
    StopReason,
    Strategy,
    extract_final_paragraph,
    generate_variant_set,
    matches_stop,
    replay_backend,
    run_self_correction,
    simplify_baseline,
)
from .templates import DEFAULT_TEMPLATES, PromptTemplateSet, load_template_file

__all__ = [
    "AGENT_GENERATOR",
    "AGENT_PATIENT",
    "AGENT_PROCESSOR_PATIENT",
    "AGENT_PROCESSOR_RADIOLOGIST",
    "AGENT_RADIOLOGIST",
    "DEFAULT_TEMPLATES",
    "LoopAborted",
    "LoopConfig",
    "LoopOutcome",
    "PromptTemplateSet",
    "StopReason",
    "Strategy",
    "extract_final_paragraph",
    "generate_variant_set",
    "load_template_file",
    "matches_stop",
    "replay_backend",
    "run_self_correction",
    "simplify_baseline",
]
