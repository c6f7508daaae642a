from dataclasses import dataclass, field
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

SizeBand = Literal["small", "medium", "large"]
SIZE_BANDS: tuple[SizeBand, ...] = ("small", "medium", "large")


class CocoImage(BaseModel):
    model_config = ConfigDict(extra="ignore")

    id: int
    width: int = Field(gt=0)
    height: int = Field(gt=0)
    file_name: str = ""


class CocoAnnotation(BaseModel):
    model_config = ConfigDict(extra="ignore")

    id: int | None = None
    image_id: int
    category_id: int
    bbox: tuple[float, float, float, float]


class CocoCategory(BaseModel):
    model_config = ConfigDict(extra="ignore")

    id: int
    name: str = ""


class CocoDocument(BaseModel):
    model_config = ConfigDict(extra="ignore")

    images: list[CocoImage]
    annotations: list[CocoAnnotation]
    categories: list[CocoCategory]


@dataclass(frozen=True)
class ImageInfo:
    id: int
    width: int
    height: int
    file_name: str = ""


@dataclass(frozen=True)
class BoundingBox:
    x: float
    y: float
    w: float
    h: float
    category_id: int
    image_id: int

    @property
    def x1(self) -> float:
        return self.x + self.w

    @property
    def y1(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    def contains(self, x: float, y: float) -> bool:
        return self.x <= x <= self.x1 and self.y <= y <= self.y1


@dataclass(frozen=True)
class Dataset:
    images: tuple[ImageInfo, ...]
    boxes: tuple[BoundingBox, ...]
    categories: dict[int, str]
    _by_unit: dict[tuple[int, int], tuple[BoundingBox, ...]] = field(
        default_factory=dict, repr=False, compare=False
    )
    _by_image: dict[int, ImageInfo] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        grouped: dict[tuple[int, int], list[BoundingBox]] = {}
        for box in self.boxes:
            grouped.setdefault((box.image_id, box.category_id), []).append(box)
        self._by_unit.update({key: tuple(value) for key, value in grouped.items()})
        self._by_image.update({image.id: image for image in self.images})

    @property
    def category_ids(self) -> list[int]:
        return sorted(self.categories)

    @property
    def image_ids(self) -> list[int]:
        return sorted(self._by_image)

    def image(self, image_id: int) -> ImageInfo:
        return self._by_image[image_id]

    def has_image(self, image_id: int) -> bool:
        return image_id in self._by_image

    def boxes_for(self, image_id: int, category_id: int) -> tuple[BoundingBox, ...]:
        return self._by_unit.get((image_id, category_id), ())
