import logging
from collections.abc import Sequence

import numpy as np
from scipy.ndimage import maximum_filter

from app.errors import ShapeMismatchError
from app.heatmap.models import Heatmap
from app.peaks.models import CenterPoint, PeakParams

logger = logging.getLogger(__name__)


def local_maxima(grid: np.ndarray, window_radius: int) -> np.ndarray:
    """Cells that are >= every cell in their window, keeping only the row-major first cell of a plateau."""
    size = 2 * window_radius + 1
    values = grid.astype(np.float64)
    is_max = values >= maximum_filter(values, size=size, mode="constant", cval=-np.inf)

    height, width = values.shape
    r = window_radius
    padded = np.pad(values, r, mode="constant", constant_values=-np.inf)
    padded_max = np.pad(is_max, r, mode="constant", constant_values=False)
    # only an earlier cell that is itself a maximum can claim the plateau
    earlier_tie = np.zeros_like(is_max)
    for di in range(-r, 1):
        for dj in range(-r, r + 1):
            if di == 0 and dj >= 0:
                break
            rows = slice(r + di, r + di + height)
            cols = slice(r + dj, r + dj + width)
            earlier_tie |= padded_max[rows, cols] & (padded[rows, cols] == values)
    return is_max & ~earlier_tie


def find_peaks(
    channel: Heatmap,
    params: PeakParams,
    *,
    category_id: int = 0,
    image_id: int = 0,
) -> list[CenterPoint]:
    if channel.channels != 1:
        raise ShapeMismatchError(f"find_peaks expects a single channel, got {channel.channels}")
    grid = channel.data[0]
    if grid.size == 0:
        return []

    candidates = local_maxima(grid, params.window_radius) & (grid >= params.prob_threshold)
    rows, cols = np.nonzero(candidates)
    scores = grid[rows, cols].astype(np.float64)
    order = np.argsort(-scores, kind="stable")

    kept: list[int] = []
    kept_rc = np.empty((0, 2), dtype=np.float64)
    min_distance = params.min_distance
    for index in order:
        rc = np.array([rows[index], cols[index]], dtype=np.float64)
        if kept_rc.size and np.min(np.hypot(*(kept_rc - rc).T)) < min_distance:
            continue
        kept.append(int(index))
        kept_rc = np.vstack([kept_rc, rc])

    stride = channel.stride
    return [
        CenterPoint(
            x=(float(cols[i]) + 0.5) * stride,
            y=(float(rows[i]) + 0.5) * stride,
            score=float(scores[i]),
            category_id=category_id,
            image_id=image_id,
        )
        for i in kept
    ]


def peaks_per_class(
    heatmap: Heatmap,
    category_ids: Sequence[int] | None,
    params: PeakParams,
    *,
    image_id: int = 0,
) -> list[CenterPoint]:
    if category_ids is None or len(category_ids) != heatmap.channels:
        raise ShapeMismatchError(
            f"need one category id per channel: {heatmap.channels} channels, "
            f"{0 if category_ids is None else len(category_ids)} category ids"
        )
    points: list[CenterPoint] = []
    for index, category_id in enumerate(category_ids):
        points.extend(find_peaks(heatmap.channel(index), params, category_id=category_id, image_id=image_id))
    logger.debug("extracted peaks image_id=%s points=%s", image_id, len(points))
    return points
