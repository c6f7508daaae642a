import logging
import math
from collections.abc import Iterable, Sequence

import numpy as np

from app.annotations.geometry import box_center
from app.annotations.models import BoundingBox, Dataset, ImageInfo
from app.errors import DomainError, ShapeMismatchError
from app.heatmap.models import GcParams, Heatmap, HeatmapSidecar

logger = logging.getLogger(__name__)


def grid_shape(image: ImageInfo, stride: float) -> tuple[int, int]:
    return max(math.ceil(image.height / stride), 1), max(math.ceil(image.width / stride), 1)


def sample_coords(count: int, stride: float) -> np.ndarray:
    return (np.arange(count, dtype=np.float64) + 0.5) * stride


def nearest_cell(x: float, y: float, stride: float, height: int, width: int) -> tuple[int, int]:
    row = min(max(int(math.floor(y / stride)), 0), height - 1)
    col = min(max(int(math.floor(x / stride)), 0), width - 1)
    return row, col


def gc_value(l: float, r: float, t: float, b: float, params: GcParams) -> float:
    if min(l, r, t, b) < 0:
        raise DomainError(f"edge distances must be non-negative, got l={l} r={r} t={t} b={b}")
    if l + r <= 0 or t + b <= 0:
        raise DomainError("degenerate box axis: point has zero extent on one axis")
    horizontal = min(l, r) / max(l, r)
    vertical = min(t, b) / max(t, b)
    # 0**0 == 1: a zero exponent spreads the axis fully.
    return horizontal**params.eta * vertical**params.phi


def _axis_profile(coords: np.ndarray, lo: float, hi: float, exponent: float) -> np.ndarray:
    near = np.minimum(coords - lo, hi - coords)
    far = np.maximum(coords - lo, hi - coords)
    return np.power(near / far, exponent)


def _interior(coords: np.ndarray, lo: float, hi: float) -> slice:
    start = int(np.searchsorted(coords, lo, side="right"))
    stop = int(np.searchsorted(coords, hi, side="left"))
    return slice(start, max(start, stop))


def render_gc(
    boxes: Iterable[BoundingBox],
    image: ImageInfo,
    stride: float,
    params: GcParams,
) -> Heatmap:
    height, width = grid_shape(image, stride)
    xs = sample_coords(width, stride)
    ys = sample_coords(height, stride)
    out = np.zeros((height, width), dtype=np.float64)

    for box in boxes:
        cols = _interior(xs, box.x, box.x1)
        rows = _interior(ys, box.y, box.y1)
        if cols.start == cols.stop or rows.start == rows.stop:
            cx, cy = box_center(box)
            out[nearest_cell(cx, cy, stride, height, width)] = 1.0
            continue
        fx = _axis_profile(xs[cols], box.x, box.x1, params.eta)
        fy = _axis_profile(ys[rows], box.y, box.y1, params.phi)
        np.maximum(out[rows, cols], np.outer(fy, fx), out=out[rows, cols])

    return Heatmap(out[np.newaxis], stride)


def render_gaussian(
    centers: Iterable[tuple[float, float]],
    image: ImageInfo,
    stride: float,
    sigma: float = 2.0,
) -> Heatmap:
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    height, width = grid_shape(image, stride)
    cols = np.arange(width, dtype=np.float64)
    rows = np.arange(height, dtype=np.float64)
    out = np.zeros((height, width), dtype=np.float64)

    for cx, cy in centers:
        # grid position of the center in cell-index units
        gx = cx / stride - 0.5
        gy = cy / stride - 0.5
        dx2 = (cols - gx) ** 2
        dy2 = (rows - gy) ** 2
        np.maximum(out, np.exp(-(dy2[:, None] + dx2[None, :]) / (2.0 * sigma * sigma)), out=out)

    return Heatmap(out[np.newaxis], stride)


def render_ellipse(boxes: Iterable[BoundingBox], image: ImageInfo, stride: float) -> Heatmap:
    height, width = grid_shape(image, stride)
    xs = sample_coords(width, stride)
    ys = sample_coords(height, stride)
    out = np.zeros((height, width), dtype=np.float64)

    for box in boxes:
        cx, cy = box_center(box)
        if box.w > 0 and box.h > 0:
            u = (2.0 * (xs - cx) / box.w) ** 2
            v = (2.0 * (ys - cy) / box.h) ** 2
            values = np.clip(1.0 - (v[:, None] + u[None, :]), 0.0, None)
            if values.max() > 0:
                np.maximum(out, values, out=out)
                continue
        out[nearest_cell(cx, cy, stride, height, width)] = 1.0

    return Heatmap(out[np.newaxis], stride)


def merge_max(a: Heatmap, b: Heatmap) -> Heatmap:
    if a.shape != b.shape or a.stride != b.stride:
        raise ShapeMismatchError(
            f"cannot merge heatmaps of shape {a.shape}/stride {a.stride} and {b.shape}/stride {b.stride}"
        )
    return Heatmap(np.maximum(a.data, b.data), a.stride)


def render_dataset_image(
    dataset: Dataset,
    image: ImageInfo,
    *,
    stride: float,
    gt_kind: str,
    params: GcParams,
    sigma: float,
    category_ids: Sequence[int] | None = None,
) -> tuple[Heatmap, HeatmapSidecar]:
    scope = list(category_ids) if category_ids is not None else dataset.category_ids
    height, width = grid_shape(image, stride)
    channels: list[Heatmap] = []
    for category_id in scope:
        boxes = dataset.boxes_for(image.id, category_id)
        if gt_kind == "gc":
            channels.append(render_gc(boxes, image, stride, params))
        elif gt_kind == "gaussian":
            channels.append(render_gaussian([box_center(box) for box in boxes], image, stride, sigma))
        elif gt_kind == "ellipse":
            channels.append(render_ellipse(boxes, image, stride))
        else:
            raise DomainError(f"unknown ground-truth kind {gt_kind!r}")

    heatmap = Heatmap.stack(channels, stride) if channels else Heatmap.zeros(0, height, width, stride)
    sidecar = HeatmapSidecar(
        image_id=image.id,
        category_ids=scope,
        stride=stride,
        gt_kind=gt_kind,
        eta=params.eta if gt_kind == "gc" else None,
        phi=params.phi if gt_kind == "gc" else None,
        sigma=sigma if gt_kind == "gaussian" else None,
    )
    logger.debug("rendered image_id=%s channels=%s shape=%s", image.id, heatmap.channels, heatmap.shape)
    return heatmap, sidecar


def render_gc_shape(width: int, height: int, stride: float, params: GcParams) -> Heatmap:
    image = ImageInfo(id=0, width=width, height=height)
    box = BoundingBox(x=0.0, y=0.0, w=float(width), h=float(height), category_id=0, image_id=0)
    return render_gc([box], image, stride, params)
