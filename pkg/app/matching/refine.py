import math
from collections.abc import Sequence

import numpy as np

from app.annotations.models import ImageInfo
from app.matching.hungarian import hungarian
from app.matching.models import GroundTruthCenter, MatchCostParams, MatchedPair, MatchSet
from app.peaks.models import CenterPoint


def match_cost(gt: GroundTruthCenter, pred: CenterPoint, params: MatchCostParams, image: ImageInfo) -> float:
    # distance on coordinates normalized by image size, so both terms are dimensionless
    distance = math.hypot((gt.x - pred.x) / image.width, (gt.y - pred.y) / image.height)
    return params.lam * distance + params.mu * abs(gt.gc - pred.score)


def cost_matrix(
    gts: Sequence[GroundTruthCenter],
    preds: Sequence[CenterPoint],
    params: MatchCostParams,
    image: ImageInfo,
) -> np.ndarray:
    if not gts or not preds:
        return np.zeros((len(gts), len(preds)), dtype=np.float64)
    g = np.array([[gt.x, gt.y, gt.gc] for gt in gts], dtype=np.float64)
    p = np.array([[pred.x, pred.y, pred.score] for pred in preds], dtype=np.float64)
    dx = (g[:, None, 0] - p[None, :, 0]) / image.width
    dy = (g[:, None, 1] - p[None, :, 1]) / image.height
    return params.lam * np.hypot(dx, dy) + params.mu * np.abs(g[:, None, 2] - p[None, :, 2])


def pixel_distance(gt: GroundTruthCenter, pred: CenterPoint) -> float:
    return math.hypot(gt.x - pred.x, gt.y - pred.y)


def match_and_refine(
    gts: Sequence[GroundTruthCenter],
    preds: Sequence[CenterPoint],
    params: MatchCostParams,
    image: ImageInfo,
) -> MatchSet:
    deficient = "gt" if len(gts) < len(preds) else "pred" if len(preds) < len(gts) else "none"
    costs = cost_matrix(gts, preds, params, image)
    assignment = hungarian(costs)

    pairs: list[MatchedPair] = []
    matched_gt: set[int] = set()
    matched_pred: set[int] = set()
    for g, p in assignment.pairs:
        distance = pixel_distance(gts[g], preds[p])
        # pairs farther apart than the half-diagonal of the gt box count as unmatched
        if distance > gts[g].D:
            continue
        pairs.append(MatchedPair(gt=g, pred=p, cost=float(costs[g, p]), distance=distance))
        matched_gt.add(g)
        matched_pred.add(p)

    return MatchSet(
        pairs=tuple(pairs),
        unmatched_gt=tuple(i for i in range(len(gts)) if i not in matched_gt),
        unmatched_pred=tuple(j for j in range(len(preds)) if j not in matched_pred),
        deficient_side=deficient,
        total_cost=assignment.total,
    )
