"""Pydantic request/response models for the survey HTTP API."""
from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field


class QuestionOption(BaseModel):
    value: str
    label: str
    numeric: int | None = None


class QuestionModel(BaseModel):
    id: str
    prompt: str
    kind: Literal["single_choice", "multi_choice", "likert", "text"]
    required: bool
    options: list[QuestionOption] = Field(default_factory=list)


class CandidateModel(BaseModel):
    key: str
    text: str


class RubricEntry(BaseModel):
    level: str
    label: str
    description: str


class ProgressModel(BaseModel):
    done: int
    total: int


class ItemModel(BaseModel):
    item_id: str
    rater_id: str
    panel: Literal["lay_original", "lay_simplified", "lay_preference", "expert_rating"]
    sentence_id: str
    sentence_text: str
    simplification_text: str | None = None
    candidates: list[CandidateModel] | None = None
    severity_rubric: list[RubricEntry] | None = None
    questions: list[QuestionModel]
    progress: ProgressModel


class NextItemResponse(BaseModel):
    done: bool
    item: ItemModel | None = None


class SubmitRequest(BaseModel):
    event_id: str = Field(min_length=1)
    rater: str = Field(min_length=1, description="rater capability token")
    item_id: str = Field(min_length=1)
    answers: dict[str, Any]
    submitted_at: str | None = None


class SubmitResponse(BaseModel):
    status: Literal["accepted", "duplicate"]


class StudyStatus(BaseModel):
    study_id: str
    state: str


class HealthResponse(BaseModel):
    status: Literal["ok"]
    studies: list[StudyStatus]
