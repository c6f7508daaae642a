from dataclasses import dataclass

from pydantic import BaseModel, Field

from app.errors import DomainError


@dataclass(frozen=True)
class PeakParams:
    prob_threshold: float = 0.5
    min_distance: float = 3.0
    window_radius: int = 1

    def __post_init__(self) -> None:
        # thresholds above 1 are allowed and simply reject every peak
        if self.prob_threshold < 0:
            raise DomainError(f"prob_threshold must be non-negative, got {self.prob_threshold}")
        if self.min_distance < 0:
            raise DomainError(f"min_distance must be non-negative, got {self.min_distance}")
        if self.window_radius < 1:
            raise DomainError(f"window_radius must be at least 1, got {self.window_radius}")


@dataclass(frozen=True)
class CenterPoint:
    x: float
    y: float
    score: float
    category_id: int
    image_id: int = 0


class PointRecord(BaseModel):
    image_id: int
    category_id: int
    x: float
    y: float
    score: float = Field(ge=0, le=1)

    @classmethod
    def from_point(cls, point: CenterPoint) -> "PointRecord":
        return cls(
            image_id=point.image_id,
            category_id=point.category_id,
            x=point.x,
            y=point.y,
            score=point.score,
        )

    def to_point(self) -> CenterPoint:
        return CenterPoint(x=self.x, y=self.y, score=self.score, category_id=self.category_id, image_id=self.image_id)
