import argparse
import logging
from pathlib import Path

from app.annotations.parser import load_coco
from app.commands.base import CommandContext, CommandResult
from app.heatmap.ochm import write_ochm
from app.heatmap.render import render_dataset_image
from app.parallel import ordered_map

logger = logging.getLogger(__name__)


class GenCommand:
    name = "gen"
    help = "render ground-truth heatmaps for every image of a COCO file"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("coco", type=Path, help="COCO annotation JSON")
        parser.add_argument("out_dir", type=Path, help="directory for <image_id>.ochm rasters and sidecars")

    def handle(self, context: CommandContext) -> CommandResult:
        settings = context.settings
        dataset = load_coco(context.args.coco)
        out_dir: Path = context.args.out_dir

        def render_one(image_id: int) -> Path:
            heatmap, sidecar = render_dataset_image(
                dataset,
                dataset.image(image_id),
                stride=settings.stride,
                gt_kind=settings.gt_kind,
                params=settings.gc_params,
                sigma=settings.sigma,
            )
            return write_ochm(out_dir, heatmap, sidecar)

        written = ordered_map(render_one, dataset.image_ids, settings.threads)
        logger.info(
            "generated heatmaps images=%s gt_kind=%s stride=%s out_dir=%s",
            len(written),
            settings.gt_kind,
            settings.stride,
            out_dir,
        )
        return CommandResult(handled=True)
