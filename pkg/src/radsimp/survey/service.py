"""FastAPI application serving the survey API.

Endpoints:

* ``GET /api/health`` -- liveness plus loaded studies.
* ``GET /api/studies/{study_id}/next?rater={token}`` -- the rater's next
  item, or ``{"done": true}`` when the study is finished for them.
* ``POST /api/studies/{study_id}/responses`` -- submit answers for the
  current item; idempotent on ``event_id``.
* ``GET /api/studies/{study_id}/export`` -- NDJSON export (admin token via
  ``X-Admin-Token`` header or ``token`` query parameter).

When a built frontend directory is supplied it is mounted at ``/``.
"""
from __future__ import annotations

import hmac
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..errors import (
    AlreadyAnswered,
    InvalidAnswers,
    OutOfSequence,
    StudyClosed,
    SurveyError,
    UnknownItem,
    UnknownRater,
)
from .schemas import (
    HealthResponse,
    ItemModel,
    NextItemResponse,
    StudyStatus,
    SubmitRequest,
    SubmitResponse,
)
from .store import ResponseEvent, StudyRuntime, StudyStore
from .study import Panel, SurveyItem


def _item_model(runtime: StudyRuntime, item: SurveyItem, rater_id: str) -> ItemModel:
    definition = runtime.definition
    done, total = runtime.progress(rater_id)
    rubric_panels = (Panel.LAY_ORIGINAL, Panel.LAY_SIMPLIFIED, Panel.EXPERT_RATING)
    return ItemModel(
        item_id=item.item_id,
        rater_id=item.rater_id,
        panel=item.panel.value,
        sentence_id=item.sentence_id,
        sentence_text=item.sentence_text,
        simplification_text=item.simplification_text,
        candidates=(
            [{"key": key, "text": text} for key, text in item.candidates]
            if item.candidates
            else None
        ),
        severity_rubric=(
            definition.severity_rubric() if item.panel in rubric_panels else None
        ),
        questions=definition.questions_for(item),
        progress={"done": done, "total": total},
    )


def _get_runtime(store: StudyStore, study_id: str) -> StudyRuntime:
    try:
        return store.get(study_id)
    except KeyError:
        raise HTTPException(status_code=404, detail=f"unknown study {study_id!r}") from None


_ERROR_STATUS = {
    UnknownRater: 403,
    UnknownItem: 404,
    OutOfSequence: 409,
    AlreadyAnswered: 409,
    StudyClosed: 409,
    InvalidAnswers: 422,
}


def _raise_http(exc: SurveyError) -> None:
    status = _ERROR_STATUS.get(type(exc), 400)
    detail: object = str(exc)
    if isinstance(exc, InvalidAnswers):
        detail = {"field": exc.field, "message": str(exc)}
    raise HTTPException(status_code=status, detail=detail) from exc


def create_app(store: StudyStore, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="radsimp survey service", version="0.1.0")

    @app.get("/api/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(
            status="ok",
            studies=[
                StudyStatus(study_id=sid, state=runtime.state.value)
                for sid, runtime in sorted(store.studies.items())
            ],
        )

    @app.get("/api/studies/{study_id}/next", response_model=NextItemResponse)
    def next_item(study_id: str, rater: str = Query(...)) -> NextItemResponse:
        runtime = _get_runtime(store, study_id)
        try:
            item = runtime.next_item(rater)
        except SurveyError as exc:
            _raise_http(exc)
        if item is None:
            return NextItemResponse(done=True)
        rater_id = runtime.definition.by_token[rater].id
        return NextItemResponse(done=False, item=_item_model(runtime, item, rater_id))

    @app.post("/api/studies/{study_id}/responses", response_model=SubmitResponse)
    def submit(study_id: str, request: SubmitRequest) -> SubmitResponse:
        runtime = _get_runtime(store, study_id)
        event = ResponseEvent(
            event_id=request.event_id,
            rater_token=request.rater,
            item_id=request.item_id,
            answers=request.answers,
            submitted_at=request.submitted_at,
        )
        try:
            status = runtime.submit(event)
        except SurveyError as exc:
            _raise_http(exc)
        return SubmitResponse(status=status)

    @app.get("/api/studies/{study_id}/export")
    def export(
        study_id: str,
        request: Request,
        token: str | None = Query(default=None),
    ) -> PlainTextResponse:
        runtime = _get_runtime(store, study_id)
        supplied = request.headers.get("x-admin-token") or token or ""
        expected = store.admin_token(study_id)
        if not hmac.compare_digest(supplied, expected):
            raise HTTPException(status_code=403, detail="admin token required")
        body = "\n".join(runtime.export_lines()) + "\n"
        return PlainTextResponse(body, media_type="application/x-ndjson")

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
