"""HTTP front end for the relevance scorer.

POST /v1/score, POST /v1/score_batch, GET /health. Errors: 400 malformed
request, 422 empty field, 503 model unavailable.
"""

from __future__ import annotations

import logging
import os

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from neural_scorer.model import ENV_PORT, EmptyFieldError, RelevanceScorer

logger = logging.getLogger("neural_scorer")


class ScoreRequest(BaseModel):
    query: str
    document: str


class BatchRequest(BaseModel):
    pairs: list[ScoreRequest]


class ScoreResponse(BaseModel):
    score: float
    model_name: str
    truncated: bool


class BatchResponse(BaseModel):
    results: list[ScoreResponse]


def create_app(scorer: RelevanceScorer | None = None) -> FastAPI:
    app = FastAPI(title="neural-scorer")
    state = {"scorer": scorer, "load_error": None}

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc.errors()[:3])})

    def get_scorer() -> RelevanceScorer:
        if state["scorer"] is None:
            if state["load_error"] is not None:
                raise HTTPException(status_code=503, detail="model unavailable")
            try:
                state["scorer"] = RelevanceScorer()
            except Exception as exc:
                state["load_error"] = exc
                logger.exception("model load failed")
                raise HTTPException(status_code=503, detail="model unavailable") from exc
        return state["scorer"]

    def score_one(scorer: RelevanceScorer, request: ScoreRequest) -> ScoreResponse:
        try:
            result = scorer.score_pair(request.query, request.document)
        except EmptyFieldError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except RuntimeError as exc:
            # Out-of-memory or other inference failure: the request fails,
            # the service lives.
            logger.exception("inference failed")
            raise HTTPException(status_code=503, detail=f"inference failed: {exc}") from exc
        return ScoreResponse(
            score=result.score, model_name=result.model_name, truncated=result.truncated
        )

    @app.post("/v1/score", response_model=ScoreResponse)
    def score(request: ScoreRequest):
        return score_one(get_scorer(), request)

    @app.post("/v1/score_batch", response_model=BatchResponse)
    def score_batch(request: BatchRequest):
        scorer = get_scorer()
        return BatchResponse(results=[score_one(scorer, pair) for pair in request.pairs])

    @app.get("/health")
    def health():
        if state["scorer"] is None and state["load_error"] is not None:
            raise HTTPException(status_code=503, detail="model unavailable")
        scorer = get_scorer()
        return {"status": "ok", "model_name": scorer.model_name}

    return app


def main() -> None:
    import uvicorn

    logging.basicConfig(level=logging.INFO)
    port = int(os.environ.get(ENV_PORT, 8321))
    uvicorn.run(create_app(), host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
