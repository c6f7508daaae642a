from collections.abc import Iterable, Sequence

import numpy as np

from app.errors import DomainError, EmptyInputError
from app.heatmap.models import Heatmap


def _negative_and_total(heatmaps: Iterable[Heatmap], thresholds: Sequence[float]) -> tuple[np.ndarray, int]:
    negatives = np.zeros(len(thresholds), dtype=np.int64)
    total = 0
    for heatmap in heatmaps:
        values = heatmap.data.ravel()
        total += values.size
        for index, threshold in enumerate(thresholds):
            negatives[index] += int(np.count_nonzero(values < threshold))
    return negatives, total


def estimate_alpha_sweep(heatmaps: Iterable[Heatmap], thresholds: Sequence[float]) -> dict[float, float]:
    """Fraction of cells below each threshold, i.e. the negative-class frequency used as alpha."""
    for threshold in thresholds:
        if not 0.0 <= threshold <= 1.0:
            raise DomainError(f"threshold must lie in [0, 1], got {threshold}")
    negatives, total = _negative_and_total(heatmaps, thresholds)
    if total == 0:
        raise EmptyInputError("alpha estimation needs at least one heatmap cell")
    return {float(t): float(n) / total for t, n in zip(thresholds, negatives)}


def estimate_alpha(heatmaps: Iterable[Heatmap], threshold: float = 0.6) -> float:
    return estimate_alpha_sweep(heatmaps, [threshold])[float(threshold)]
