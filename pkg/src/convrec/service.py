"""HTTP session service.

One engine, many sessions: the engine's tables are immutable and shared, each
session has its own lock so concurrent clients interleave safely, and idle
sessions expire after a configurable timeout (expired ids are gone for good).
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .dialogue import Session


@dataclass
class SessionHandle:
    session: Session
    created: float
    last_activity: float
    lock: threading.Lock = field(default_factory=threading.Lock)
    responses: list[dict] = field(default_factory=list)


class SessionTable:
    def __init__(self, timeout_seconds: float, clock):
        self._entries: dict[str, SessionHandle] = {}
        self._lock = threading.Lock()
        self.timeout = timeout_seconds
        self.clock = clock

    def create(self, session: Session) -> SessionHandle:
        now = self.clock()
        handle = SessionHandle(session=session, created=now, last_activity=now)
        with self._lock:
            self._entries[session.id] = handle
        return handle

    def get(self, session_id: str) -> SessionHandle | None:
        """Look up a live session; expired entries are dropped, not refreshed."""
        now = self.clock()
        with self._lock:
            handle = self._entries.get(session_id)
            if handle is None:
                return None
            if now - handle.last_activity > self.timeout:
                del self._entries[session_id]
                return None
            handle.last_activity = now
            return handle

    def delete(self, session_id: str) -> bool:
        with self._lock:
            return self._entries.pop(session_id, None) is not None


def _session_state(handle: SessionHandle) -> dict:
    s = handle.session
    return {
        "id": s.id,
        "mode": s.mode,
        "mentioned": list(s.mentioned),
        "turns": [
            {
                "speaker": t.speaker,
                "text": t.text,
                "mentions": list(t.mentions),
                "turn_index": t.turn_index,
            }
            for t in s.turns
        ],
        "responses": list(handle.responses),
    }


def create_app(engine, session_timeout_seconds: float | None = None, clock=None) -> FastAPI:
    if session_timeout_seconds is None:
        session_timeout_seconds = engine.config.session_timeout_minutes * 60.0
    table = SessionTable(session_timeout_seconds, clock or time.monotonic)
    app = FastAPI(title="convrec", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.sessions = table
    app.state.engine = engine

    def _bad_request(detail: str) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": detail})

    def _not_found(session_id: str) -> JSONResponse:
        return JSONResponse(
            status_code=404, content={"detail": f"unknown or expired session {session_id!r}"}
        )

    async def _json_body(request: Request) -> dict | None:
        try:
            body = await request.json()
        except Exception:
            return None
        return body if isinstance(body, dict) else None

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "entities": len(engine.graph.entities),
            "items": len(engine.graph.item_ids()),
            "categories": len(engine.hierarchy.categories()),
            "mode_default": engine.config.mode,
        }

    @app.post("/session", status_code=201)
    async def create_session(request: Request):
        body = await _json_body(request)
        if body is None:
            body = {}
        mode = body.get("mode", engine.config.mode)
        if mode not in ("baseline", "hierarchical"):
            return _bad_request(f"mode must be 'baseline' or 'hierarchical', got {mode!r}")
        session = engine.new_session(mode=mode, session_id=uuid.uuid4().hex)
        table.create(session)
        return {"id": session.id, "mode": mode}

    @app.post("/session/{session_id}/utterance")
    async def utterance(session_id: str, request: Request):
        body = await _json_body(request)
        if body is None or not isinstance(body.get("text"), str):
            return _bad_request("body must be JSON with a string 'text' field")
        handle = table.get(session_id)
        if handle is None:
            return _not_found(session_id)
        with handle.lock:
            response = engine.advance(handle.session, body["text"])
            payload = response.to_json_dict()
            payload["session_id"] = session_id
            payload["turn_index"] = len(handle.session.turns) - 1
            handle.responses.append(payload)
        return payload

    @app.get("/session/{session_id}/state")
    def state(session_id: str):
        handle = table.get(session_id)
        if handle is None:
            return _not_found(session_id)
        with handle.lock:
            return _session_state(handle)

    @app.delete("/session/{session_id}")
    def delete(session_id: str):
        if not table.delete(session_id):
            return _not_found(session_id)
        return Response(status_code=204)

    return app
