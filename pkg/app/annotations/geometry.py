import math

from app.annotations.models import BoundingBox, SizeBand
from app.matching.models import GroundTruthCenter

SMALL_AREA = 32.0**2
MEDIUM_AREA = 96.0**2


def box_center(box: BoundingBox) -> tuple[float, float]:
    return box.x + box.w / 2.0, box.y + box.h / 2.0


def box_diagonal_threshold(box: BoundingBox) -> float:
    return 0.5 * math.hypot(box.w, box.h)


def size_band(box: BoundingBox) -> SizeBand:
    area = box.area
    if area < SMALL_AREA:
        return "small"
    if area < MEDIUM_AREA:
        return "medium"
    return "large"


def ground_truth_centers(boxes: tuple[BoundingBox, ...] | list[BoundingBox]) -> list[GroundTruthCenter]:
    centers: list[GroundTruthCenter] = []
    for box in boxes:
        cx, cy = box_center(box)
        centers.append(
            GroundTruthCenter(
                x=cx,
                y=cy,
                gc=1.0,
                D=box_diagonal_threshold(box),
                band=size_band(box),
                box=box,
            )
        )
    return centers
