import argparse
import json
import logging
from pathlib import Path

from app.annotations.parser import load_coco
from app.commands.base import CommandContext, CommandResult
from app.config import Settings
from app.errors import ConfigError
from app.heatmap.models import Heatmap, HeatmapSidecar
from app.heatmap.ochm import read_heatmap_dir
from app.heatmap.render import render_dataset_image
from app.loss.alpha import estimate_alpha_sweep
from app.parallel import ordered_map

logger = logging.getLogger(__name__)


def _thresholds(raw: str | None, default: float) -> list[float]:
    if raw is None:
        return [default]
    try:
        return [float(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"--thresholds must be a comma separated list of numbers, got {raw!r}") from exc


def _load_heatmaps(source: Path, settings: Settings) -> list[tuple[Heatmap, HeatmapSidecar]]:
    if source.is_dir():
        return read_heatmap_dir(source)
    dataset = load_coco(source)
    return ordered_map(
        lambda image_id: render_dataset_image(
            dataset,
            dataset.image(image_id),
            stride=settings.stride,
            gt_kind=settings.gt_kind,
            params=settings.gc_params,
            sigma=settings.sigma,
        ),
        dataset.image_ids,
        settings.threads,
    )


def _select_category(loaded: list[tuple[Heatmap, HeatmapSidecar]], category_id: int | None) -> list[Heatmap]:
    if category_id is None:
        return [heatmap for heatmap, _ in loaded]
    return [
        heatmap.channel(sidecar.category_ids.index(category_id))
        for heatmap, sidecar in loaded
        if category_id in sidecar.category_ids
    ]


class AlphaCommand:
    name = "alpha"
    help = "estimate the BCFL alpha as the fraction of cells below a threshold"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("source", type=Path, help="COCO annotation JSON or a heatmap directory")
        parser.add_argument("--alpha-threshold", dest="alpha_threshold", type=float, default=None)
        parser.add_argument("--thresholds", default=None, help="comma separated sweep, e.g. 0.4,0.5,0.6")
        parser.add_argument("--category", type=int, default=None, help="restrict to one category channel")

    def handle(self, context: CommandContext) -> CommandResult:
        settings = context.settings
        args = context.args
        thresholds = _thresholds(args.thresholds, settings.alpha_threshold)
        heatmaps = _select_category(_load_heatmaps(args.source, settings), args.category)
        sweep = estimate_alpha_sweep(heatmaps, thresholds)
        logger.info("estimated alpha heatmaps=%s thresholds=%s", len(heatmaps), len(thresholds))

        if args.thresholds is None:
            payload: dict = {"threshold": thresholds[0], "alpha": sweep[float(thresholds[0])]}
        else:
            payload = {"sweep": [{"threshold": t, "alpha": a} for t, a in sweep.items()]}
        if args.category is not None:
            payload["category_id"] = args.category
        return CommandResult(handled=True, output=(json.dumps(payload) + "\n").encode("utf-8"))
