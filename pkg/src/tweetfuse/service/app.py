"""FastAPI application wrapping the pipeline.

Every pipeline error maps to a structured body {detail, kind} whose kind
mirrors the CLI exit-code families: usage -> 400, data -> 422, io -> 500.
Responses are rendered with a JSON encoder that permits infinities, since
a calibrated gate threshold of -inf is a legitimate model value.
"""

from __future__ import annotations

import json
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..config import RunConfig
from ..corpus import CorpusStore, ingest_stream
from ..errors import TweetFuseError
from ..pipeline import (
    detect_pipeline,
    evaluate_pipeline,
    keywords_pipeline,
    load_bundle,
    save_bundle,
    train_pipeline,
)
from ..synth import generate
from .schemas import (
    DetectRequest,
    DetectResponse,
    DetectRow,
    ErrorBody,
    EvaluateRequest,
    EvaluateResponse,
    HealthResponse,
    IngestRequest,
    IngestResponse,
    KeywordEntry,
    KeywordsRequest,
    KeywordsResponse,
    SynthRequest,
    SynthResponse,
    TrainRequest,
    TrainResponse,
)

_STATUS_BY_KIND = {"usage": 400, "data": 422, "io": 500}


class AnyFloatJSONResponse(JSONResponse):
    """JSON rendering that tolerates +/-inf (model thresholds)."""

    def render(self, content: Any) -> bytes:
        return json.dumps(
            content,
            ensure_ascii=False,
            allow_nan=True,
            separators=(",", ":"),
        ).encode("utf-8")


def _config_from_request(doc: dict, store: str | None = None) -> RunConfig:
    merged = dict(doc)
    if store is not None:
        merged["store"] = store
    return RunConfig.from_dict(merged)


def create_app() -> FastAPI:
    app = FastAPI(
        title="tweetfuse",
        description="Batch multimodal tweet event detection",
        default_response_class=AnyFloatJSONResponse,
    )

    @app.exception_handler(TweetFuseError)
    async def _domain_error(_request: Request, exc: TweetFuseError):
        body = ErrorBody(detail=str(exc), kind=exc.kind)
        return AnyFloatJSONResponse(
            status_code=_STATUS_BY_KIND[exc.kind], content=body.model_dump()
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        body = ErrorBody(detail=str(exc.errors()), kind="usage")
        return AnyFloatJSONResponse(status_code=400, content=body.model_dump())

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse()

    @app.post("/ingest", response_model=IngestResponse)
    def ingest(req: IngestRequest) -> IngestResponse:
        report = ingest_stream(req.lines, CorpusStore(req.store))
        return IngestResponse(
            accepted=report.accepted,
            rejected_filter=report.rejected_filter,
            rejected_parse=report.rejected_parse,
        )

    @app.post("/synth", response_model=SynthResponse)
    def synth(req: SynthRequest) -> SynthResponse:
        written = generate(
            req.store,
            n=req.n,
            seed=req.seed,
            text_noise=req.text_noise,
            image_noise=req.image_noise,
        )
        return SynthResponse(written=written, store=req.store)

    @app.post("/keywords", response_model=KeywordsResponse)
    def keywords(req: KeywordsRequest) -> KeywordsResponse:
        cfg = _config_from_request(req.config, req.store)
        report = keywords_pipeline(cfg, req.store, k=req.k)
        return KeywordsResponse(
            keywords=[KeywordEntry(term=t, weight=w) for t, w in report.ranked],
            csv=report.to_csv(),
        )

    @app.post("/train", response_model=TrainResponse)
    def train(req: TrainRequest) -> TrainResponse:
        cfg = _config_from_request(req.config, req.store)
        bundle, summary = train_pipeline(cfg, req.store)
        save_bundle(bundle, req.out)
        return TrainResponse(
            fingerprint=summary["fingerprint"],
            model_path=req.out,
            fusion_mode=summary["fusion_mode"],
            tau=summary["tau"],
            n_train=summary["n_train"],
            n_validation=summary["n_validation"],
            validation_accuracy=summary["validation_accuracy"],
        )

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate(req: EvaluateRequest) -> EvaluateResponse:
        bundle = load_bundle(req.model)
        report = evaluate_pipeline(bundle, req.store, workers=req.workers)
        return EvaluateResponse(
            report=report.to_dict(),
            report_json=report.to_json(),
            table=report.render_table(),
        )

    @app.post("/detect", response_model=DetectResponse)
    def detect(req: DetectRequest) -> DetectResponse:
        bundle = load_bundle(req.model)
        rows = detect_pipeline(
            bundle, req.lines, req.image_root, workers=req.workers
        )
        return DetectResponse(
            rows=[DetectRow(id=rid, label=lab, channel=ch) for rid, lab, ch in rows]
        )

    return app


app = create_app()
