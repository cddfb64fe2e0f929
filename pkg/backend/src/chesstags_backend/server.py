"""FastAPI app exposing the generation and score wire contracts.

POST /generate  {"input": str, "max_tokens": int?} -> {"text": str}
POST /score     {"prompt": str, "continuations": [str, ...]} -> {"logprobs": [float, ...]}
GET  /health    -> {"status": "ready" | "loading"}

Malformed requests get a 400; requests arriving before the model has
loaded get a 503.
"""

from __future__ import annotations

import math
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from .config import BackendConfig
from .model import load_model


def create_app(config: BackendConfig | None = None) -> FastAPI:
    config = config or BackendConfig()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.model = load_model(config.model, seed=config.seed, device=config.device)
        yield
        app.state.model = None

    app = FastAPI(title="chesstags reference backend", lifespan=lifespan)
    app.state.model = None
    app.state.config = config

    def model_or_503(request: Request):
        model = request.app.state.model
        if model is None:
            raise HTTPException(status_code=503, detail="model is still loading")
        return model

    async def json_or_400(request: Request) -> dict:
        try:
            payload = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="request body must be JSON")
        if not isinstance(payload, dict):
            raise HTTPException(status_code=400, detail="request body must be an object")
        return payload

    @app.get("/health")
    async def health(request: Request):
        status = "ready" if request.app.state.model is not None else "loading"
        return {"status": status}

    @app.post("/generate")
    async def generate(request: Request):
        model = model_or_503(request)
        payload = await json_or_400(request)
        if "input" not in payload or not isinstance(payload["input"], str):
            raise HTTPException(status_code=400, detail="'input' must be a string")
        max_tokens = payload.get("max_tokens", config.max_tokens)
        if not isinstance(max_tokens, int) or isinstance(max_tokens, bool) or max_tokens < 1:
            raise HTTPException(status_code=400, detail="'max_tokens' must be a positive integer")
        text = model.generate(payload["input"], max_tokens)
        return {"text": text}

    @app.post("/score")
    async def score(request: Request):
        model = model_or_503(request)
        payload = await json_or_400(request)
        if "prompt" not in payload or not isinstance(payload["prompt"], str):
            raise HTTPException(status_code=400, detail="'prompt' must be a string")
        continuations = payload.get("continuations")
        if (
            not isinstance(continuations, list)
            or not continuations
            or not all(isinstance(c, str) for c in continuations)
        ):
            raise HTTPException(
                status_code=400, detail="'continuations' must be a non-empty list of strings"
            )
        logprobs = model.score(payload["prompt"], continuations)
        if any(not math.isfinite(lp) for lp in logprobs):
            return JSONResponse(
                status_code=500, content={"detail": "model produced a non-finite score"}
            )
        return {"logprobs": logprobs}

    return app
