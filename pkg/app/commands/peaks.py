import argparse
import logging
from pathlib import Path

from app.commands.base import CommandContext, CommandResult
from app.heatmap.ochm import read_heatmap_dir
from app.parallel import ordered_map
from app.peaks.extract import peaks_per_class
from app.peaks.records import encode_points

logger = logging.getLogger(__name__)


class PeaksCommand:
    name = "peaks"
    help = "extract center points from a directory of heatmaps as JSONL"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("heatmaps", type=Path, help="directory of .ochm rasters with sidecars")

    def handle(self, context: CommandContext) -> CommandResult:
        settings = context.settings
        params = settings.peak_params
        loaded = read_heatmap_dir(context.args.heatmaps)
        per_image = ordered_map(
            lambda item: peaks_per_class(item[0], item[1].category_ids, params, image_id=item[1].image_id),
            loaded,
            settings.threads,
        )
        points = [point for image_points in per_image for point in image_points]
        logger.info("extracted peaks images=%s points=%s threshold=%s", len(loaded), len(points), params.prob_threshold)
        return CommandResult(handled=True, output=encode_points(points))
