"""HTTP surface for the substitution service.

POST /substitute {"tokens", "mask_index", "top_k"} -> {"candidates": [...]}
GET  /health -> 200 {"status": "ok", "model": name} once loaded, 503 before.

All client errors, including body-shape validation, answer 400 with
{"error": reason}; model failures answer 500 the same way.
"""

from __future__ import annotations

import threading
from contextlib import asynccontextmanager
from typing import Callable

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .model import load_model


class SubstituteRequest(BaseModel):
    tokens: list[str]
    mask_index: int
    top_k: int


def create_app(loader: Callable[[], object] | None = None) -> FastAPI:
    """Build the app; ``loader`` is swappable so tests can gate readiness."""
    resolve = loader or load_model

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        def fill():
            app.state.model = resolve()

        app.state.model = None
        thread = threading.Thread(target=fill, daemon=True)
        thread.start()
        yield

    app = FastAPI(lifespan=lifespan)

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors())})

    @app.get("/health")
    async def health():
        model = app.state.model
        if model is None:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {"status": "ok", "model": model.name}

    @app.post("/substitute")
    async def substitute(request: SubstituteRequest):
        model = app.state.model
        if model is None:
            return JSONResponse(status_code=503, content={"error": "model is loading"})
        if not 0 <= request.mask_index < len(request.tokens):
            return JSONResponse(
                status_code=400,
                content={"error": f"mask_index {request.mask_index} out of range "
                                  f"for {len(request.tokens)} tokens"})
        if request.top_k < 0:
            return JSONResponse(
                status_code=400,
                content={"error": f"top_k must be >= 0, got {request.top_k}"})
        try:
            candidates = model.predict(request.tokens, request.mask_index,
                                       request.top_k)
        except Exception as exc:  # model crash -> 500, not a FastAPI traceback
            return JSONResponse(status_code=500, content={"error": str(exc)})
        return {"candidates": [{"token": c.token, "score": c.score}
                               for c in candidates]}

    return app
