import math
from collections.abc import Iterable, Sequence

from app.annotations.models import SizeBand
from app.errors import EmptyInputError
from app.matching.models import GroundTruthCenter, MatchedPair, MatchSet
from app.metrics.models import UnitScore
from app.peaks.models import CenterPoint


def _normalized_distance(pair: MatchedPair, gt: GroundTruthCenter) -> float:
    if gt.D == 0:
        # refinement only keeps zero-distance pairs when D == 0
        return 0.0
    return pair.distance / gt.D


def _is_true_positive(pair: MatchedPair, gts: Sequence[GroundTruthCenter], preds: Sequence[CenterPoint]) -> bool:
    gt = gts[pair.gt]
    pred = preds[pair.pred]
    if gt.box is None:
        return pair.distance <= gt.D
    return gt.box.contains(pred.x, pred.y)


def score_unit(
    match: MatchSet,
    gts: Sequence[GroundTruthCenter],
    preds: Sequence[CenterPoint],
    *,
    image_id: int = 0,
    category_id: int = 0,
) -> UnitScore:
    n = max(len(gts), len(preds))
    if n == 0:
        raise EmptyInputError("an evaluation unit needs at least one ground truth or prediction")
    md_sum = math.fsum(_normalized_distance(pair, gts[pair.gt]) for pair in match.pairs)
    return UnitScore(
        image_id=image_id,
        category_id=category_id,
        md_sum=md_sum,
        cp=max(len(match.unmatched_gt), len(match.unmatched_pred)),
        n=n,
        matched=len(match.pairs),
        tp=sum(1 for pair in match.pairs if _is_true_positive(pair, gts, preds)),
        gt_count=len(gts),
        pred_count=len(preds),
    )


def score_band_unit(
    match: MatchSet,
    gts: Sequence[GroundTruthCenter],
    preds: Sequence[CenterPoint],
    band: SizeBand,
    *,
    image_id: int = 0,
    category_id: int = 0,
) -> UnitScore | None:
    """Restrict a unit to in-band ground truths; unmatched predictions have no band and are left out."""
    in_band = {i for i, gt in enumerate(gts) if gt.band == band}
    if not in_band:
        return None
    pairs = [pair for pair in match.pairs if pair.gt in in_band]
    return UnitScore(
        image_id=image_id,
        category_id=category_id,
        md_sum=math.fsum(_normalized_distance(pair, gts[pair.gt]) for pair in pairs),
        cp=len(in_band) - len(pairs),
        n=len(in_band),
        matched=len(pairs),
        tp=sum(1 for pair in pairs if _is_true_positive(pair, gts, preds)),
        gt_count=len(in_band),
        pred_count=len(pairs),
    )


def _ordered(units: Iterable[UnitScore]) -> list[UnitScore]:
    return sorted(units, key=lambda unit: (unit.image_id, unit.category_id))


def cas(units: Iterable[UnitScore]) -> tuple[float, float, float]:
    """Return (cas, cp_term, md_term) averaged over units."""
    ordered = _ordered(units)
    if not ordered:
        raise EmptyInputError("CAS needs at least one scored unit")
    count = len(ordered)
    cp_term = math.fsum(unit.cp / unit.n for unit in ordered) / count
    md_term = math.fsum(unit.md_sum / unit.n for unit in ordered) / count
    return 1.0 - cp_term - md_term, cp_term, md_term


def cas_stratified(units: Iterable[UnitScore]) -> float | None:
    """CAS over band-restricted units, or None when the band has no ground truths."""
    ordered = _ordered(units)
    if not ordered:
        return None
    return cas(ordered)[0]


def precision_recall_f1(units: Iterable[UnitScore]) -> tuple[float, float, float]:
    ordered = _ordered(units)
    if not ordered:
        raise EmptyInputError("precision/recall need at least one scored unit")
    tp = sum(unit.tp for unit in ordered)
    preds = sum(unit.pred_count for unit in ordered)
    gts = sum(unit.gt_count for unit in ordered)
    precision = tp / preds if preds else 0.0
    recall = tp / gts if gts else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1
