"""Slow, direct reference implementations used to cross-check the fast paths."""

import itertools
import math
from collections.abc import Callable, Sequence

import numpy as np

from app.annotations.models import BoundingBox, ImageInfo
from app.errors import OracleSizeError
from app.matching.models import GroundTruthCenter, MatchCostParams
from app.peaks.models import CenterPoint

EXHAUSTIVE_LIMIT = 7


def gc_reference(x: float, y: float, box: BoundingBox, eta: float, phi: float) -> float:
    """Scalar GC at (x, y); zero on or outside the box border."""
    left = x - box.x
    right = box.x + box.w - x
    top = y - box.y
    bottom = box.y + box.h - y
    if left <= 0 or right <= 0 or top <= 0 or bottom <= 0:
        return 0.0
    return (min(left, right) / max(left, right)) ** eta * (min(top, bottom) / max(top, bottom)) ** phi


def centerness_reference(x: float, y: float, box: BoundingBox) -> float:
    left = x - box.x
    right = box.x + box.w - x
    top = y - box.y
    bottom = box.y + box.h - y
    if left <= 0 or right <= 0 or top <= 0 or bottom <= 0:
        return 0.0
    return math.sqrt((min(left, right) * min(top, bottom)) / (max(left, right) * max(top, bottom)))


def finite_diff(f: Callable[[np.ndarray], np.ndarray], p: float | np.ndarray, h: float | np.ndarray) -> float | np.ndarray:
    """Central difference (f(p+h) - f(p-h)) / 2h, elementwise for arrays."""
    p_arr = np.asarray(p, dtype=np.float64)
    h_arr = np.asarray(h, dtype=np.float64)
    estimate = (np.asarray(f(p_arr + h_arr), dtype=np.float64) - np.asarray(f(p_arr - h_arr), dtype=np.float64)) / (
        2.0 * h_arr
    )
    return float(estimate) if estimate.ndim == 0 else estimate


def _pair_cost(gt: GroundTruthCenter, pred: CenterPoint, params: MatchCostParams, image: ImageInfo) -> float:
    dx = (gt.x - pred.x) / image.width
    dy = (gt.y - pred.y) / image.height
    return params.lam * math.sqrt(dx * dx + dy * dy) + params.mu * abs(gt.gc - pred.score)


def _injective_assignments(rows: int, cols: int):
    if rows <= cols:
        for perm in itertools.permutations(range(cols), rows):
            yield tuple(enumerate(perm))
    else:
        for perm in itertools.permutations(range(rows), cols):
            yield tuple(sorted((r, c) for c, r in enumerate(perm)))


def exhaustive_cas(
    gts: Sequence[GroundTruthCenter],
    preds: Sequence[CenterPoint],
    params: MatchCostParams,
    image: ImageInfo,
) -> float:
    """Unit CAS from an enumerated optimal assignment followed by D refinement."""
    if len(gts) > EXHAUSTIVE_LIMIT or len(preds) > EXHAUSTIVE_LIMIT:
        raise OracleSizeError(f"exhaustive CAS supports at most {EXHAUSTIVE_LIMIT} points per side")
    n = max(len(gts), len(preds))
    if n == 0:
        raise OracleSizeError("exhaustive CAS needs at least one point")

    best: tuple[tuple[int, int], ...] = ()
    best_total = math.inf
    if gts and preds:
        for pairs in _injective_assignments(len(gts), len(preds)):
            total = math.fsum(_pair_cost(gts[g], preds[p], params, image) for g, p in pairs)
            if total < best_total:
                best_total = total
                best = pairs

    md = 0.0
    kept = 0
    for g, p in best:
        distance = math.sqrt((gts[g].x - preds[p].x) ** 2 + (gts[g].y - preds[p].y) ** 2)
        if distance > gts[g].D:
            continue
        kept += 1
        if gts[g].D > 0:
            md += distance / gts[g].D
    cp = max(len(gts) - kept, len(preds) - kept)
    return 1.0 - (cp + md) / n
