import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass

from app.annotations.geometry import ground_truth_centers
from app.annotations.models import SIZE_BANDS, Dataset, SizeBand
from app.errors import EmptyInputError, UnresolvedReferenceError
from app.matching.models import MatchCostParams
from app.matching.refine import match_and_refine
from app.metrics.models import CasReport, CategoryReport, UnitScore
from app.metrics.scoring import cas, cas_stratified, precision_recall_f1, score_band_unit, score_unit
from app.parallel import ordered_map
from app.peaks.models import CenterPoint

logger = logging.getLogger(__name__)

UnitKey = tuple[int, int]


@dataclass(frozen=True)
class UnitResult:
    overall: UnitScore
    bands: dict[SizeBand, UnitScore | None]


def group_points(dataset: Dataset, points: Iterable[CenterPoint]) -> dict[UnitKey, list[CenterPoint]]:
    grouped: dict[UnitKey, list[CenterPoint]] = {}
    offenders: set[str] = set()
    for point in points:
        if not dataset.has_image(point.image_id):
            offenders.add(f"image_id={point.image_id}")
        elif point.category_id not in dataset.categories:
            offenders.add(f"category_id={point.category_id}")
        else:
            grouped.setdefault((point.image_id, point.category_id), []).append(point)
    if offenders:
        raise UnresolvedReferenceError(sorted(offenders))
    return grouped


def _unit_keys(dataset: Dataset, grouped: dict[UnitKey, list[CenterPoint]]) -> list[UnitKey]:
    keys = {(box.image_id, box.category_id) for box in dataset.boxes}
    keys.update(grouped)
    return sorted(keys)


def evaluate_unit(
    dataset: Dataset,
    key: UnitKey,
    preds: list[CenterPoint],
    params: MatchCostParams,
) -> UnitResult:
    image_id, category_id = key
    image = dataset.image(image_id)
    gts = ground_truth_centers(dataset.boxes_for(image_id, category_id))
    match = match_and_refine(gts, preds, params, image)
    overall = score_unit(match, gts, preds, image_id=image_id, category_id=category_id)
    bands = {
        band: score_band_unit(match, gts, preds, band, image_id=image_id, category_id=category_id)
        for band in SIZE_BANDS
    }
    return UnitResult(overall=overall, bands=bands)


def _headline(results: list[UnitResult], band: str) -> list[UnitScore]:
    if band == "all":
        return [result.overall for result in results]
    return [unit for result in results if (unit := result.bands[band]) is not None]


def _band_units(results: list[UnitResult], band: SizeBand) -> list[UnitScore]:
    return [unit for result in results if (unit := result.bands[band]) is not None]


def _category_report(dataset: Dataset, category_id: int, results: list[UnitResult], band: str) -> CategoryReport | None:
    units = _headline(results, band)
    if not units:
        return None
    score, cp_term, md_term = cas(units)
    precision, recall, f1 = _detection_rates(units, band)
    return CategoryReport(
        category_id=category_id,
        name=dataset.categories.get(category_id, ""),
        cas=score,
        cp_term=cp_term,
        md_term=md_term,
        precision=precision,
        recall=recall,
        f1=f1,
        units=len(units),
    )


def _detection_rates(units: list[UnitScore], band: str) -> tuple[float | None, float | None, float | None]:
    # band views hold no unmatched predictions
    if band != "all":
        return None, None, None
    return precision_recall_f1(units)


def _mean(values: list[float | None]) -> float | None:
    values = [value for value in values if value is not None]
    return math.fsum(values) / len(values) if values else None


def evaluate_dataset(
    dataset: Dataset,
    points: Iterable[CenterPoint],
    *,
    params: MatchCostParams,
    aggregation: str = "pooled",
    band: str = "all",
    threads: int = 1,
) -> CasReport:
    grouped = group_points(dataset, points)
    keys = _unit_keys(dataset, grouped)
    results = ordered_map(
        lambda key: evaluate_unit(dataset, key, grouped.get(key, []), params),
        keys,
        threads,
    )
    logger.info("scored units=%s threads=%s aggregation=%s band=%s", len(results), threads, aggregation, band)

    by_category: dict[int, list[UnitResult]] = {}
    for result in results:
        by_category.setdefault(result.overall.category_id, []).append(result)
    per_category = [
        report
        for category_id in sorted(by_category)
        if (report := _category_report(dataset, category_id, by_category[category_id], band)) is not None
    ]

    headline = _headline(results, band)
    if not headline:
        raise EmptyInputError(f"no evaluation units for band={band}")

    if aggregation == "macro":
        score = _mean([r.cas for r in per_category])
        cp_term = _mean([r.cp_term for r in per_category])
        md_term = _mean([r.md_term for r in per_category])
        precision = _mean([r.precision for r in per_category])
        recall = _mean([r.recall for r in per_category])
        f1 = _mean([r.f1 for r in per_category])
        banded = {
            b: _mean(
                [
                    value
                    for category_results in by_category.values()
                    if (value := cas_stratified(_band_units(category_results, b))) is not None
                ]
            )
            for b in SIZE_BANDS
        }
    else:
        score, cp_term, md_term = cas(headline)
        precision, recall, f1 = _detection_rates(headline, band)
        banded = {b: cas_stratified(_band_units(results, b)) for b in SIZE_BANDS}

    return CasReport(
        cas=score,
        cp_term=cp_term,
        md_term=md_term,
        cas_s=banded["small"],
        cas_m=banded["medium"],
        cas_l=banded["large"],
        precision=precision,
        recall=recall,
        f1=f1,
        units=len(headline),
        aggregation=aggregation,
        band=band,
        per_category=per_category,
    )
