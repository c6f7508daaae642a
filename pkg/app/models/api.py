from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from app.peaks.models import PointRecord


class ScoreRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    coco: dict[str, Any]
    points: list[PointRecord] = Field(default_factory=list)
    config: dict[str, Any] = Field(default_factory=dict)


class PeaksRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    heatmap: list[list[list[float]]]
    stride: float = Field(gt=0)
    category_ids: list[int]
    image_id: int = 0
    config: dict[str, Any] = Field(default_factory=dict)
