import argparse
import json
import logging
from pathlib import Path

from app.commands.base import CommandContext, CommandResult
from app.config import Settings
from app.errors import ShapeMismatchError
from app.heatmap.models import Heatmap
from app.heatmap.ochm import read_heatmap_dir
from app.loss.models import KernelParams, LossReport
from app.loss.reduce import KERNELS, gradcheck, reduce_losses

logger = logging.getLogger(__name__)


def _paired(pred_dir: Path, target_dir: Path) -> list[tuple[Heatmap, Heatmap]]:
    preds = {sidecar.image_id: heatmap for heatmap, sidecar in read_heatmap_dir(pred_dir)}
    targets = {sidecar.image_id: heatmap for heatmap, sidecar in read_heatmap_dir(target_dir)}
    if preds.keys() != targets.keys():
        missing = sorted(preds.keys() ^ targets.keys())
        raise ShapeMismatchError(f"prediction and target directories differ in image ids: {missing}")
    return [(preds[image_id], targets[image_id]) for image_id in sorted(preds)]


def _kernel_params(settings: Settings) -> KernelParams:
    return KernelParams(
        alpha=settings.alpha,
        gamma=settings.gamma,
        pos_weight=settings.pos_weight,
        fl_positive_threshold=settings.fl_positive_threshold,
    )


class LossCommand:
    name = "loss"
    help = "reduce a loss kernel over paired prediction and target heatmaps"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("pred_dir", type=Path)
        parser.add_argument("target_dir", type=Path)
        parser.add_argument("--kernel", dest="kernel_choice", choices=[*KERNELS, "all"], default=None)
        parser.add_argument("--pos-weight", dest="pos_weight", type=float, default=None)
        parser.add_argument("--gradcheck", action="store_true", help="verify the bcfl gradient by central differences")

    def handle(self, context: CommandContext) -> CommandResult:
        settings = context.settings
        args = context.args
        pairs = _paired(args.pred_dir, args.target_dir)
        params = _kernel_params(settings)
        kernel = args.kernel_choice or settings.kernel

        reports: list[LossReport] = [
            reduce_losses(pairs, name, params) for name in (KERNELS if kernel == "all" else (kernel,))
        ]
        if args.gradcheck:
            error = max(gradcheck(pred, target, params) for pred, target in pairs)
            logger.info("gradcheck pairs=%s max_rel_error=%.3g", len(pairs), error)
            reports = [report.model_copy(update={"gradcheck_max_rel_error": error}) for report in reports]

        dumped = [report.model_dump(exclude_none=True) for report in reports]
        payload = dumped if kernel == "all" else dumped[0]
        return CommandResult(handled=True, output=(json.dumps(payload) + "\n").encode("utf-8"))
