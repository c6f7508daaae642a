import logging
from collections.abc import Callable

import numpy as np

from app.errors import EmptyInputError, ShapeMismatchError
from app.heatmap.models import Heatmap
from app.loss.kernels import EPS, bcfl, bcfl_grad_p, focal_loss, qfl, weighted_bce, weighted_mse
from app.loss.models import KernelParams, LossReport
from app.oracle.reference import finite_diff

logger = logging.getLogger(__name__)

KERNELS = ("fl", "qfl", "bcfl", "wbce", "wmse")


def _kernel_fn(kernel: str, params: KernelParams) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    if kernel == "fl":
        return lambda p, y: focal_loss(
            p, np.where(y >= params.fl_positive_threshold, 1.0, -1.0), params.alpha, params.gamma
        )
    if kernel == "qfl":
        return lambda p, y: qfl(p, y, params.gamma)
    if kernel == "bcfl":
        return lambda p, y: bcfl(p, y, params.bcfl)
    if kernel == "wbce":
        return lambda p, y: weighted_bce(p, y, params.pos_weight)
    if kernel == "wmse":
        return lambda p, y: weighted_mse(p, y, params.pos_weight)
    raise ValueError(f"unknown loss kernel {kernel!r}")


def _check_shapes(pred: Heatmap, target: Heatmap) -> None:
    if pred.shape != target.shape:
        raise ShapeMismatchError(f"prediction shape {pred.shape} does not match target shape {target.shape}")
    if pred.data.size == 0:
        raise EmptyInputError("loss reduction needs at least one cell")


def cell_losses(pred: Heatmap, target: Heatmap, kernel: str, params: KernelParams) -> np.ndarray:
    _check_shapes(pred, target)
    fn = _kernel_fn(kernel, params)
    p = pred.data.astype(np.float64)
    y = target.data.astype(np.float64)
    return np.asarray(fn(p, y), dtype=np.float64).reshape(pred.channels, -1)


def reduce_loss(pred: Heatmap, target: Heatmap, kernel: str, params: KernelParams) -> LossReport:
    return reduce_losses([(pred, target)], kernel, params)


def reduce_losses(pairs: list[tuple[Heatmap, Heatmap]], kernel: str, params: KernelParams) -> LossReport:
    """Mean loss over every cell of every pair, plus per-channel means across pairs."""
    if not pairs:
        raise EmptyInputError("loss reduction needs at least one heatmap pair")
    channels = pairs[0][0].channels
    channel_sums = np.zeros(channels, dtype=np.float64)
    channel_counts = np.zeros(channels, dtype=np.int64)
    for pred, target in pairs:
        if pred.channels != channels:
            raise ShapeMismatchError(f"all heatmaps need {channels} channels, got {pred.channels}")
        losses = cell_losses(pred, target, kernel, params)
        # numpy sums contiguous float64 rows pairwise, which fixes the reduction order
        channel_sums += losses.sum(axis=1)
        channel_counts += losses.shape[1]

    cell_count = int(channel_counts.sum())
    per_channel = [float(s / c) if c else 0.0 for s, c in zip(channel_sums, channel_counts)]
    total = float(channel_sums.sum() / cell_count)
    logger.info("reduced loss kernel=%s cells=%s total=%.6g", kernel, cell_count, total)
    return LossReport(kernel=kernel, total=total, per_channel=per_channel, cell_count=cell_count)


def gradcheck(pred: Heatmap, target: Heatmap, params: KernelParams, h: float = 1e-5) -> float:
    """Max relative error between the analytic bcfl gradient and central differences."""
    _check_shapes(pred, target)
    p = pred.data.astype(np.float64).ravel()
    y = target.data.astype(np.float64).ravel()
    scale = np.minimum(np.minimum(p, 1.0 - p), np.abs(p - y))
    step = np.minimum(h, 1e-3 * scale)
    usable = (np.abs(p - y) >= 1e-3) & (p - step > EPS) & (p + step < 1.0 - EPS)
    if not np.any(usable):
        return 0.0
    p, y, step = p[usable], y[usable], step[usable]

    analytic = np.asarray(bcfl_grad_p(p, y, params.bcfl))
    numeric = np.asarray(finite_diff(lambda q: bcfl(q, y, params.bcfl), p, step))
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-300)
    return float(np.max(np.abs(analytic - numeric) / denom))
