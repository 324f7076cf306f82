"""Baseline prompting and the four-agent self-correction loop.

One loop round runs the agents in a fixed order: the Generator produces or
refines a candidate, the Radiologist and Patient reviewers critique it, and
the Processor condenses each feedback stream independently. When both
processed streams start with the stop prefix ("No"), the loop ends and the
Generator's last response is the simplification. The Generator keeps its
conversation history across rounds; the reviewers and the Processor are
memoryless and receive a fresh history on every invocation.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from ..corpus import ALL_VARIANTS, RadiologySentence, SimplificationRecord, VariantTag
from ..errors import BackendError
from ..llm.backends import ChatBackend, ScriptedBackend
from ..llm.messages import (
    ChatMessage,
    ModelParams,
    Transcript,
    finalize,
    record_turn,
    system,
    user,
    wall_clock,
)
from .templates import DEFAULT_TEMPLATES, PromptTemplateSet

AGENT_GENERATOR = "generator"
AGENT_RADIOLOGIST = "radiologist"
AGENT_PATIENT = "patient"
AGENT_PROCESSOR_RADIOLOGIST = "processor_radiologist"
AGENT_PROCESSOR_PATIENT = "processor_patient"

NO_CRITICAL_COMMENTS = "No critical comments."

# Leading characters ignored by the stop rule: whitespace plus common
# quoting/punctuation the model may prepend.
_STOP_TRIM = re.compile(r"^[\s\"'“”‘’*\-–—:;.,!()\[\]]+")


class Strategy(Enum):
    PLAIN = "plain"
    COT = "cot"


class StopReason(Enum):
    PROCESSOR_SAID_NO = "processor_said_no"
    ROUND_CAP_REACHED = "round_cap_reached"


@dataclass(frozen=True)
class LoopConfig:
    """Knobs for the self-correction loop."""

    params: ModelParams = ModelParams()
    max_refine_rounds: int = 5
    stop_prefix: str = "No"

    def __post_init__(self) -> None:
        if self.max_refine_rounds < 1:
            raise ValueError("max_refine_rounds must be >= 1")
        if not self.stop_prefix:
            raise ValueError("stop_prefix must be non-empty")


@dataclass(frozen=True)
class LoopOutcome:
    final_text: str
    rounds_used: int
    stop_reason: StopReason
    transcript: Transcript

    @property
    def transcript_ref(self) -> str:
        return self.transcript.id


class LoopAborted(BackendError):
    """A backend failure aborted a session; the partial transcript is preserved."""

    def __init__(self, message: str, transcripts: Sequence[Transcript]):
        super().__init__(message)
        self.transcripts = tuple(transcripts)


def matches_stop(text: str, stop_prefix: str = "No") -> bool:
    """Case-insensitive prefix test after trimming leading whitespace/punctuation."""
    trimmed = _STOP_TRIM.sub("", text)
    return trimmed.lower().startswith(stop_prefix.lower())


def extract_final_paragraph(text: str) -> str:
    """Optional post-processing for chain-of-thought output: keep the last paragraph."""
    paragraphs = [p.strip() for p in re.split(r"\n\s*\n", text) if p.strip()]
    return paragraphs[-1] if paragraphs else text


Clock = Callable[[], float]


class _Session:
    """Runs agent calls against one transcript, recording every turn."""

    def __init__(
        self,
        backend: ChatBackend,
        transcript_id: str,
        session_label: str,
        params: ModelParams,
        clock: Clock,
    ):
        self.backend = backend
        self.params = params
        self.clock = clock
        self.transcript = Transcript(id=transcript_id, session_label=session_label)

    def call(self, agent: str, history: Sequence[ChatMessage]) -> ChatMessage:
        response = self.backend.complete(history, self.params)
        self.transcript = record_turn(
            self.transcript,
            agent,
            history,
            response,
            params=self.params,
            timestamp=self.clock(),
        )
        return response


def _initial_prompt(templates: PromptTemplateSet, strategy: Strategy, text: str) -> str:
    if strategy is Strategy.PLAIN:
        return templates.render_plain(text)
    return templates.render_cot(text)


def simplify_baseline(
    sentence: RadiologySentence,
    strategy: Strategy,
    backend: ChatBackend,
    templates: PromptTemplateSet = DEFAULT_TEMPLATES,
    params: ModelParams = ModelParams(),
    clock: Clock | None = None,
    *,
    trim_cot: bool = False,
) -> tuple[SimplificationRecord, Transcript]:
    """Single-shot simplification: one Generator call, iterations = 0.

    Chain-of-thought responses are stored in full (term list plus
    simplification); pass ``trim_cot`` to keep only the final paragraph.
    """
    variant = VariantTag.PLAIN_BS if strategy is Strategy.PLAIN else VariantTag.COT_BS
    session = _Session(
        backend,
        transcript_id=f"{sentence.id}:{variant.value}",
        session_label=f"{sentence.id}/{variant.value}",
        params=params,
        clock=clock or wall_clock,
    )
    try:
        response = session.call(
            AGENT_GENERATOR, [user(_initial_prompt(templates, strategy, sentence.text))]
        )
    except BackendError as exc:
        raise LoopAborted(
            f"backend error while simplifying sentence {sentence.id!r}: {exc}",
            [finalize(session.transcript)],
        ) from exc
    text = response.content
    if trim_cot and strategy is Strategy.COT:
        text = extract_final_paragraph(text)
    record = SimplificationRecord(
        sentence_id=sentence.id,
        variant=variant,
        text=text,
        iterations=0,
        transcript_ref=session.transcript.id,
    )
    return record, finalize(session.transcript)


def run_self_correction(
    sentence: RadiologySentence,
    initial_strategy: Strategy,
    backend: ChatBackend,
    templates: PromptTemplateSet = DEFAULT_TEMPLATES,
    config: LoopConfig = LoopConfig(),
    clock: Clock | None = None,
) -> LoopOutcome:
    """Run the Generator / Radiologist / Patient / Processor loop to completion.

    The Generator is seeded with the plain or chain-of-thought prompt and
    asked to refine via the refine prompt built from the two processed
    feedback streams (a stream whose processor said "No" contributes the
    literal text "No critical comments."). The loop stops when both
    processed streams match the stop prefix, or after ``max_refine_rounds``
    refinements with feedback still outstanding.
    """
    variant = VariantTag.PLAIN_SC if initial_strategy is Strategy.PLAIN else VariantTag.COT_SC
    session = _Session(
        backend,
        transcript_id=f"{sentence.id}:{variant.value}",
        session_label=f"{sentence.id}/{variant.value}",
        params=config.params,
        clock=clock or wall_clock,
    )
    generator_history: list[ChatMessage] = [
        user(_initial_prompt(templates, initial_strategy, sentence.text))
    ]

    try:
        reply = session.call(AGENT_GENERATOR, generator_history)
        generator_history.append(reply)
        rounds_used = 0
        while True:
            candidate = generator_history[-1].content
            radiologist_feedback = session.call(
                AGENT_RADIOLOGIST,
                [
                    system(templates.radiologist_persona),
                    user(
                        templates.reviewer_message(
                            templates.radiologist_instruction, sentence.text, candidate
                        )
                    ),
                ],
            )
            patient_feedback = session.call(
                AGENT_PATIENT,
                [
                    system(templates.patient_persona),
                    user(
                        templates.reviewer_message(
                            templates.patient_instruction, sentence.text, candidate
                        )
                    ),
                ],
            )
            processed_rad = session.call(
                AGENT_PROCESSOR_RADIOLOGIST,
                [user(templates.render_processor(radiologist_feedback.content))],
            )
            processed_pat = session.call(
                AGENT_PROCESSOR_PATIENT,
                [user(templates.render_processor(patient_feedback.content))],
            )
            rad_done = matches_stop(processed_rad.content, config.stop_prefix)
            pat_done = matches_stop(processed_pat.content, config.stop_prefix)
            if rad_done and pat_done:
                stop_reason = StopReason.PROCESSOR_SAID_NO
                break
            if rounds_used >= config.max_refine_rounds:
                stop_reason = StopReason.ROUND_CAP_REACHED
                break
            generator_history.append(
                user(
                    templates.render_refine(
                        NO_CRITICAL_COMMENTS if rad_done else processed_rad.content,
                        NO_CRITICAL_COMMENTS if pat_done else processed_pat.content,
                    )
                )
            )
            reply = session.call(AGENT_GENERATOR, generator_history)
            generator_history.append(reply)
            rounds_used += 1
    except BackendError as exc:
        raise LoopAborted(
            f"backend error in self-correction for sentence {sentence.id!r}: {exc}",
            [finalize(session.transcript)],
        ) from exc

    return LoopOutcome(
        final_text=generator_history[-1].content,
        rounds_used=rounds_used,
        stop_reason=stop_reason,
        transcript=finalize(session.transcript),
    )


def generate_variant_set(
    sentence: RadiologySentence,
    backend: ChatBackend,
    templates: PromptTemplateSet = DEFAULT_TEMPLATES,
    config: LoopConfig = LoopConfig(),
    clock_factory: Callable[[], Clock] | None = None,
    *,
    trim_cot: bool = False,
) -> tuple[list[SimplificationRecord], list[Transcript]]:
    """Produce all four variants for one sentence, in canonical variant order.

    The set is atomic: any backend failure aborts the whole sentence with
    :class:`LoopAborted` carrying the transcripts accumulated so far (the
    failing session's partial transcript included); no records are returned.
    """
    make_clock = clock_factory or (lambda: wall_clock)
    records: list[SimplificationRecord] = []
    transcripts: list[Transcript] = []
    try:
        for variant in ALL_VARIANTS:
            strategy = Strategy.PLAIN if variant.value.startswith("plain") else Strategy.COT
            if variant.self_corrected:
                outcome = run_self_correction(
                    sentence, strategy, backend, templates, config, clock=make_clock()
                )
                records.append(
                    SimplificationRecord(
                        sentence_id=sentence.id,
                        variant=variant,
                        text=outcome.final_text,
                        iterations=outcome.rounds_used,
                        transcript_ref=outcome.transcript_ref,
                    )
                )
                transcripts.append(outcome.transcript)
            else:
                record, transcript = simplify_baseline(
                    sentence,
                    strategy,
                    backend,
                    templates,
                    config.params,
                    clock=make_clock(),
                    trim_cot=trim_cot,
                )
                records.append(record)
                transcripts.append(transcript)
    except LoopAborted as exc:
        raise LoopAborted(str(exc), list(transcripts) + list(exc.transcripts)) from exc
    return records, transcripts


def replay_backend(transcript: Transcript) -> ScriptedBackend:
    """Queue backend that replays a finalized transcript's responses in order."""
    return ScriptedBackend(queue=[turn.response.content for turn in transcript.turns])
