"""Local HTTP service for the two-annotator sanity-check workflow."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import jsonl
from .agreement import AnnotationRecord
from .corpus import sample_to_record
from .store import (
    AnnotationStore,
    DuplicateAnnotation,
    InvalidField,
    NotInConflict,
    StoreError,
    UnknownAnnotator,
    UnknownSample,
    dimension_to_json,
    labels_from_payload,
)


def create_app(store: AnnotationStore, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="annotation service", docs_url=None, redoc_url=None)

    def error(status: int, message: str, field: str | None = None) -> JSONResponse:
        detail: dict = {"error": message}
        if field is not None:
            detail["field"] = field
        return JSONResponse(status_code=status, content=detail)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/api/session")
    def session() -> dict:
        return {
            "annotators": list(store.annotators),
            "total": len(store.corpus),
            "remaining": {a: store.remaining(a) for a in store.annotators},
        }

    @app.get("/api/samples/next")
    def next_sample(annotator: str = Query(...)):
        try:
            sample = store.next_sample(annotator)
            remaining = store.remaining(annotator)
        except UnknownAnnotator as exc:
            return error(404, str(exc))
        return {
            "sample": sample_to_record(sample) if sample else None,
            "remaining": remaining,
        }

    @app.post("/api/annotations")
    async def post_annotation(request: Request):
        try:
            payload = await request.json()
        except Exception:
            return error(400, "request body must be JSON", field="body")
        if not isinstance(payload, dict):
            return error(400, "request body must be a JSON object", field="body")
        sample_id = payload.get("sample_id")
        annotator_id = payload.get("annotator_id")
        if not isinstance(sample_id, str):
            return error(400, "sample_id is required", field="sample_id")
        if not isinstance(annotator_id, str):
            return error(400, "annotator_id is required", field="annotator_id")
        note = payload.get("note", "")
        if not isinstance(note, str):
            return error(400, "note must be a string", field="note")
        try:
            labels = labels_from_payload(payload.get("labels"))
            store.add_annotation(
                AnnotationRecord(
                    sample_id=sample_id, annotator_id=annotator_id, labels=labels, note=note
                )
            )
        except InvalidField as exc:
            return error(400, str(exc), field=exc.field)
        except (UnknownSample, UnknownAnnotator) as exc:
            return error(404, str(exc))
        except DuplicateAnnotation as exc:
            return error(409, str(exc))
        return JSONResponse(status_code=201, content={"status": "accepted"})

    @app.get("/api/conflicts")
    def conflicts() -> dict:
        return {
            "conflicts": [
                {
                    "sample_id": c.sample_id,
                    "dimension": c.dimension,
                    "values": {
                        store.annotators[0]: dimension_to_json(c.dimension, c.value_a),
                        store.annotators[1]: dimension_to_json(c.dimension, c.value_b),
                    },
                }
                for c in store.conflicts()
            ]
        }

    @app.post("/api/resolutions")
    async def post_resolution(request: Request):
        try:
            payload = await request.json()
        except Exception:
            return error(400, "request body must be JSON", field="body")
        if not isinstance(payload, dict):
            return error(400, "request body must be a JSON object", field="body")
        sample_id = payload.get("sample_id")
        dimension = payload.get("dimension")
        if not isinstance(sample_id, str):
            return error(400, "sample_id is required", field="sample_id")
        if not isinstance(dimension, str):
            return error(400, "dimension is required", field="dimension")
        note = payload.get("note", "")
        if not isinstance(note, str):
            return error(400, "note must be a string", field="note")
        try:
            store.add_resolution(sample_id, dimension, payload.get("value"), note)
        except InvalidField as exc:
            return error(400, str(exc), field=exc.field)
        except NotInConflict as exc:
            return error(404, str(exc))
        except StoreError as exc:
            return error(400, str(exc))
        return JSONResponse(status_code=201, content={"status": "accepted"})

    @app.get("/api/export")
    def export() -> PlainTextResponse:
        body = "".join(jsonl.dumps_record(line) + "\n" for line in store.export_records())
        return PlainTextResponse(content=body, media_type="application/x-ndjson")

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def serve(store: AnnotationStore, host: str, port: int, static_dir: str | Path | None = None) -> None:
    import uvicorn

    app = create_app(store, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
