from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

from app.errors import DomainError, ShapeMismatchError


@dataclass(frozen=True)
class GcParams:
    eta: float = 0.5
    phi: float = 0.5

    def __post_init__(self) -> None:
        for name in ("eta", "phi"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be finite and non-negative, got {value}")


@dataclass(frozen=True, eq=False)
class Heatmap:
    """Channel-major float32 raster of probabilities sampled every `stride` image pixels."""

    data: np.ndarray
    stride: float

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.ndim != 3:
            raise ShapeMismatchError(f"heatmap data must be (channels, height, width), got shape {data.shape}")
        if not self.stride > 0:
            raise DomainError(f"stride must be positive, got {self.stride}")
        if data.size and not bool(np.all((data >= 0.0) & (data <= 1.0))):
            raise DomainError("heatmap values must lie in [0, 1]")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "stride", float(self.stride))

    @classmethod
    def zeros(cls, channels: int, height: int, width: int, stride: float) -> "Heatmap":
        return cls(np.zeros((channels, height, width), dtype=np.float32), stride)

    @property
    def channels(self) -> int:
        return int(self.data.shape[0])

    @property
    def height(self) -> int:
        return int(self.data.shape[1])

    @property
    def width(self) -> int:
        return int(self.data.shape[2])

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.channels, self.height, self.width

    def channel(self, index: int) -> "Heatmap":
        return Heatmap(self.data[index : index + 1], self.stride)

    @classmethod
    def stack(cls, maps: list["Heatmap"], stride: float) -> "Heatmap":
        if not maps:
            raise ShapeMismatchError("cannot stack an empty list of heatmaps")
        return cls(np.concatenate([m.data for m in maps], axis=0), stride)


class HeatmapSidecar(BaseModel):
    image_id: int
    category_ids: list[int]
    stride: float = Field(gt=0)
    gt_kind: str | None = None
    eta: float | None = None
    phi: float | None = None
    sigma: float | None = None
