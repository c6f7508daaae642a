import logging

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from app.annotations.parser import build_dataset
from app.config import Settings, get_settings, normalize_config, settings_from
from app.errors import CenterKitError
from app.heatmap.models import Heatmap
from app.metrics.evaluate import evaluate_dataset
from app.models.api import PeaksRequest, ScoreRequest
from app.peaks.extract import peaks_per_class
from app.peaks.models import PointRecord
from app.peaks.records import sort_points

logger = logging.getLogger(__name__)
settings = get_settings()

app = FastAPI(
    title="CenterKit Scoring Service",
    version="0.1.0",
)


@app.exception_handler(RequestValidationError)
async def invalid_body(_: Request, exc: RequestValidationError) -> JSONResponse:
    logger.info("rejected request errors=%s", len(exc.errors()))
    return JSONResponse(status_code=400, content={"detail": "invalid payload"})


def _request_settings(overrides: dict) -> Settings:
    if not overrides:
        return settings
    return settings_from({**settings.model_dump(), **normalize_config(overrides, source="request")})


@app.api_route("/", methods=["GET", "HEAD"])
async def root() -> dict[str, str]:
    return {"status": "ok"}


@app.get("/health")
async def health() -> dict[str, str]:
    return {"status": "ok"}


@app.post("/score")
def score(request: ScoreRequest) -> JSONResponse:
    try:
        run = _request_settings(request.config)
        dataset = build_dataset(request.coco)
        report = evaluate_dataset(
            dataset,
            [record.to_point() for record in request.points],
            params=run.match_params,
            aggregation=run.aggregation,
            band=run.band,
            threads=run.threads,
        )
    except CenterKitError as exc:
        logger.info("score rejected error=%s", exc)
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    logger.info("scored images=%s points=%s cas=%.6f", len(dataset.images), len(request.points), report.cas)
    return JSONResponse(report.model_dump(mode="json", by_alias=True))


@app.post("/peaks")
def peaks(request: PeaksRequest) -> list[PointRecord]:
    try:
        run = _request_settings(request.config)
        try:
            data = np.asarray(request.heatmap, dtype=np.float32)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail="heatmap rows must have equal lengths") from exc
        if data.ndim != 3:
            raise HTTPException(status_code=400, detail="heatmap must be a [channels][height][width] array")
        heatmap = Heatmap(data, request.stride)
        points = peaks_per_class(heatmap, request.category_ids, run.peak_params, image_id=request.image_id)
    except CenterKitError as exc:
        logger.info("peaks rejected error=%s", exc)
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return [PointRecord.from_point(point) for point in sort_points(points)]
