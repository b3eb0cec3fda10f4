"""HTTP/JSON boundary over the service core.

POST /v1/events ingests chat events; GET /v1/actions streams the action
feed as newline-delimited JSON with cursor resume via ?since=. The
remaining endpoints are read-only inspection views.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse

from .errors import (
    DocumentNotFound,
    IllegalTransition,
    MalformedEvent,
    NoManagersConfigured,
    NotAManager,
    NotAMember,
    SelectionNotOffered,
)
from .service import Service

_ERROR_STATUS = {
    MalformedEvent: 400,
    NotAManager: 403,
    NotAMember: 403,
    IllegalTransition: 409,
    SelectionNotOffered: 409,
    NoManagersConfigured: 409,
    DocumentNotFound: 404,
}


def create_app(service: Service) -> FastAPI:
    app = FastAPI(title="choir", docs_url=None, redoc_url=None)
    app.state.service = service

    def error_response(exc: Exception) -> JSONResponse:
        status = _ERROR_STATUS.get(type(exc), 500)
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.post("/v1/events")
    async def post_event(request: Request):
        try:
            data = await request.json()
        except json.JSONDecodeError:
            return error_response(MalformedEvent("body is not valid JSON"))
        try:
            return service.ingest_event(data)
        except tuple(_ERROR_STATUS) as exc:
            return error_response(exc)

    @app.get("/v1/actions")
    async def get_actions(since: int = 0, once: bool = False):
        if once:
            return {"actions": service.actions_since(since)}

        def generate():
            for action in service.stream_actions(since):
                if action:
                    yield json.dumps(action, ensure_ascii=False) + "\n"
                else:
                    yield "\n"  # keepalive

        return StreamingResponse(generate(), media_type="application/x-ndjson")

    @app.get("/v1/documents")
    async def get_documents():
        return {"documents": service.view_documents()}

    @app.get("/v1/documents/{path:path}/history")
    async def get_history(path: str):
        try:
            return {"path": path, "history": service.view_history(path)}
        except DocumentNotFound as exc:
            return error_response(exc)

    @app.get("/v1/documents/{path:path}")
    async def get_document(path: str):
        try:
            return service.view_document(path)
        except DocumentNotFound as exc:
            return error_response(exc)

    @app.get("/v1/flows/{flow_id}")
    async def get_flow(flow_id: str):
        try:
            return service.view_flow(flow_id)
        except Exception as exc:
            return error_response(MalformedEvent(f"unknown flow {flow_id}"))

    @app.get("/healthz")
    async def healthz():
        return {"ok": True, "seq": service.seq}

    return app
