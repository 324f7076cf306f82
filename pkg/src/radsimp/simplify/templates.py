"""Prompt templates and personas for the simplification agents.

Templates carry literal slots (``<RADIOLOGY SENTENCE>`` etc.) that must
appear exactly once. A template file overrides individual sections; missing
sections fall back to the shipped defaults. File format: named sections,
one ``[section_name]`` header per line followed by the section text.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from ..errors import TemplateError

SENTENCE_SLOT = "<RADIOLOGY SENTENCE>"
FEEDBACK_SLOT = "<FEEDBACK>"
RADIOLOGIST_FEEDBACK_SLOT = "<PROCESSED RADIOLOGIST FEEDBACK>"
PATIENT_FEEDBACK_SLOT = "<PROCESSED PATIENT FEEDBACK>"

DEFAULT_PLAIN = f"Simplify the sentence: {SENTENCE_SLOT}."

DEFAULT_COT = (
    f"Sentence: {SENTENCE_SLOT}.\n"
    "Can you list all the complicated medical terms and provide explanations "
    "that are understandable by laypeople? Finally, write a simplification of "
    "the original sentence that laypeople can understand."
)

DEFAULT_PROCESSOR = (
    f"Feedback: {FEEDBACK_SLOT}\n"
    "Are there any critical comments or improvement suggestions in Feedback? "
    'If so, extract them starting with "Yes". Otherwise, say "No".'
)

DEFAULT_REFINE = (
    f"Radiologist's feedback: {RADIOLOGIST_FEEDBACK_SLOT}\n"
    f"Patient's feedback: {PATIENT_FEEDBACK_SLOT}\n"
    "Can you improve your simplification while keeping it concise?"
)

DEFAULT_RADIOLOGIST_PERSONA = (
    "Pretend to have the persona of a radiologist. You have years of "
    "experience reading and writing radiology reports, deep knowledge of "
    "medical terminology and anatomy, and a clear sense of the clinical "
    "significance of imaging findings."
)

DEFAULT_RADIOLOGIST_INSTRUCTION = (
    "Review the simplification of the original radiology sentence below. "
    "Comment on whether it is factually correct, whether it leaves out "
    "important information, whether it adds anything not supported by the "
    "original sentence, and whether it mentions the relevant body parts, "
    "findings, and consequences. If the simplification is acceptable, say so."
)

DEFAULT_PATIENT_PERSONA = (
    "Act as a layperson patient with no medical training. You lack medical "
    "knowledge and cannot understand complex medical concepts or "
    "terminology. Do not pretend to understand medical jargon, and do not "
    "give feedback that would require medical expertise."
)

DEFAULT_PATIENT_INSTRUCTION = (
    "Read the simplification of the radiology sentence below. Point out any "
    "words or phrases that are confusing or too technical, and say whether "
    "it tells you clearly what was found and what it means for you. If "
    "everything is clear, say so."
)


@dataclass(frozen=True)
class PromptTemplateSet:
    """The complete prompt wiring for the generator, reviewers, and processor."""

    plain: str = DEFAULT_PLAIN
    cot: str = DEFAULT_COT
    radiologist_persona: str = DEFAULT_RADIOLOGIST_PERSONA
    patient_persona: str = DEFAULT_PATIENT_PERSONA
    radiologist_instruction: str = DEFAULT_RADIOLOGIST_INSTRUCTION
    patient_instruction: str = DEFAULT_PATIENT_INSTRUCTION
    processor_prompt: str = DEFAULT_PROCESSOR
    refine_prompt: str = DEFAULT_REFINE

    def __post_init__(self) -> None:
        self._require_slot("plain", self.plain, SENTENCE_SLOT)
        self._require_slot("cot", self.cot, SENTENCE_SLOT)
        self._require_slot("processor_prompt", self.processor_prompt, FEEDBACK_SLOT)
        self._require_slot("refine_prompt", self.refine_prompt, RADIOLOGIST_FEEDBACK_SLOT)
        self._require_slot("refine_prompt", self.refine_prompt, PATIENT_FEEDBACK_SLOT)

    @staticmethod
    def _require_slot(name: str, template: str, slot: str) -> None:
        count = template.count(slot)
        if count != 1:
            raise TemplateError(
                f"template {name!r} must contain slot {slot} exactly once (found {count})"
            )

    def render_plain(self, sentence_text: str) -> str:
        return self.plain.replace(SENTENCE_SLOT, sentence_text)

    def render_cot(self, sentence_text: str) -> str:
        return self.cot.replace(SENTENCE_SLOT, sentence_text)

    def render_processor(self, feedback: str) -> str:
        return self.processor_prompt.replace(FEEDBACK_SLOT, feedback)

    def render_refine(self, radiologist_feedback: str, patient_feedback: str) -> str:
        return self.refine_prompt.replace(
            RADIOLOGIST_FEEDBACK_SLOT, radiologist_feedback
        ).replace(PATIENT_FEEDBACK_SLOT, patient_feedback)

    @staticmethod
    def reviewer_message(instruction: str, original: str, candidate: str) -> str:
        return f"{instruction}\n\nOriginal sentence: {original}\nSimplification: {candidate}"


DEFAULT_TEMPLATES = PromptTemplateSet()

_SECTION_NAMES = {f.name for f in fields(PromptTemplateSet)}


def parse_template_sections(text: str, *, source: object = None) -> dict[str, str]:
    sections: dict[str, str] = {}
    current: str | None = None
    buffer: list[str] = []

    def flush() -> None:
        if current is not None:
            sections[current] = "\n".join(buffer).strip()

    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            name = stripped[1:-1].strip()
            if name not in _SECTION_NAMES:
                raise TemplateError(
                    f"{source or 'template file'}: unknown section [{name}]"
                )
            flush()
            current = name
            buffer = []
        elif current is not None:
            buffer.append(line)
        elif stripped:
            raise TemplateError(
                f"{source or 'template file'}: text before the first section header"
            )
    flush()
    return sections


def load_template_file(path: str | Path) -> PromptTemplateSet:
    """Build a template set from a sectioned file; absent sections keep defaults."""
    path = Path(path)
    sections = parse_template_sections(path.read_text(encoding="utf-8"), source=path)
    empty = [name for name, value in sections.items() if not value]
    if empty:
        raise TemplateError(f"{path}: empty section(s) {empty}")
    return PromptTemplateSet(**sections)
