"""HTTP shell over interactive sessions for the analyst UI.

The service holds in-memory sessions keyed by opaque ids, serializes
mutating requests per session, and never changes state on a 4xx response.
Every response carries the cycle number it describes; error bodies are
``{"code": ..., "message": ...}``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .corpus import Corpus, Denylist, LabelSet
from .engine import (
    InvalidChoiceError,
    SeedResolutionError,
    Session,
    SessionFinishedError,
)

__all__ = ["ApiError", "CorpusBundle", "create_app"]


@dataclass
class CorpusBundle:
    corpus: Corpus
    labels: LabelSet
    denylist: Denylist | None = None


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class CreateSessionRequest(BaseModel):
    initial_seed: str
    corpus_id: str = "default"
    criterion: str = "hindex"
    top_k: int | None = None
    max_cycles: int = 30
    rng_seed: int | None = None


class SeedChoiceRequest(BaseModel):
    url: str


class _SessionBox:
    def __init__(self, session: Session, corpus_id: str):
        self.session = session
        self.corpus_id = corpus_id
        self.lock = threading.Lock()


def _descriptor(box: _SessionBox) -> dict:
    session = box.session
    return {
        "session_id": session.session_id,
        "corpus_id": box.corpus_id,
        "criterion": session.criterion,
        "status": session.status,
        "current_cycle": session.current_cycle,
    }


def _candidate_payload(box: _SessionBox) -> dict:
    session = box.session
    index = session.pending_index()
    ranked = {score.website: score for score in session.pending_ranking()}
    items = []
    for website, urls in session.pending_candidates():
        score = ranked[website]
        stats = index.url_stats(website)
        items.append(
            {
                "website": website,
                "label": session.labels.lookup(website),
                "h_index": score.h_index,
                "most_pop_share_count": score.most_pop_share_count,
                "total_shares": score.total_shares,
                "total_distinct_sharers": score.total_distinct_sharers,
                "h_zero_fallback": score.h_index == 0,
                "urls": [
                    {
                        "url": url,
                        "total_shares": stats[url].total_shares,
                        "distinct_sharers": stats[url].distinct_sharers,
                        "sample_post_ids": session.corpus.url_posts.get(url, [])[:3],
                    }
                    for url in urls
                ],
            }
        )
    return {
        "session_id": session.session_id,
        "status": session.status,
        "cycle_no": session.current_cycle,
        "candidates": items,
    }


def create_app(
    bundles: dict[str, CorpusBundle],
    record_dir: str | None = None,
    default_top_k: int = 10,
) -> FastAPI:
    app = FastAPI(title="snowrank session service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, _SessionBox] = {}
    registry_lock = threading.Lock()

    @app.exception_handler(ApiError)
    async def _api_error(_: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=422, content={"code": "invalid_request", "message": str(exc)}
        )

    def _get_box(session_id: str) -> _SessionBox:
        box = sessions.get(session_id)
        if box is None:
            raise ApiError(404, "not_found", f"unknown session {session_id!r}")
        return box

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "sessions": len(sessions)}

    @app.post("/sessions", status_code=201)
    def create_session(request: CreateSessionRequest) -> dict:
        bundle = bundles.get(request.corpus_id)
        if bundle is None:
            raise ApiError(404, "not_found", f"unknown corpus {request.corpus_id!r}")
        top_k = request.top_k if request.top_k is not None else default_top_k
        if top_k < 1:
            raise ApiError(400, "invalid_request", "top_k must be >= 1")
        try:
            session = Session(
                bundle.corpus,
                bundle.labels,
                bundle.denylist,
                request.initial_seed,
                criterion=request.criterion,
                max_cycles=request.max_cycles,
                top_k=top_k,
                rng_seed=request.rng_seed,
                record_dir=record_dir,
            )
        except (SeedResolutionError, ValueError) as exc:
            raise ApiError(400, "invalid_request", str(exc)) from None
        box = _SessionBox(session, request.corpus_id)
        with registry_lock:
            sessions[session.session_id] = box
        return _descriptor(box)

    @app.get("/sessions/{session_id}/candidates")
    def get_candidates(session_id: str) -> dict:
        box = _get_box(session_id)
        with box.lock:
            if box.session.status != "awaiting_choice":
                raise ApiError(
                    409, "session_finished", f"session is {box.session.status}; no candidates"
                )
            return _candidate_payload(box)

    @app.post("/sessions/{session_id}/seed")
    def post_seed_choice(session_id: str, request: SeedChoiceRequest) -> dict:
        box = _get_box(session_id)
        with box.lock:
            session = box.session
            if session.status != "awaiting_choice":
                raise ApiError(409, "session_finished", f"session is {session.status}")
            try:
                record = session.choose(request.url)
            except InvalidChoiceError as exc:
                raise ApiError(400, "invalid_choice", str(exc)) from None
            except SessionFinishedError as exc:
                raise ApiError(409, "session_finished", str(exc)) from None
            return {
                "session_id": session.session_id,
                "status": session.status,
                "cycle_no": record.cycle_no,
                "completed_cycle": record.to_dict(),
            }

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str) -> dict:
        box = _get_box(session_id)
        with box.lock:
            record = box.session.record().to_dict()
        record["session_id"] = session_id
        record["cycle_no"] = box.session.current_cycle
        return record

    @app.get("/sessions/{session_id}/export")
    def export_discovered(session_id: str) -> dict:
        box = _get_box(session_id)
        with box.lock:
            discovered = box.session.discovered()
            return {
                "session_id": session_id,
                "status": box.session.status,
                "cycle_no": box.session.current_cycle,
                "discovered_websites": [
                    {"website": s.website, "label": s.label_at_selection, "cycle_no": s.cycle_added}
                    for s in discovered
                ],
            }

    return app
