import argparse
from pathlib import Path

from app.annotations.parser import load_coco
from app.commands.base import CommandContext, CommandResult
from app.metrics.evaluate import evaluate_dataset
from app.peaks.records import load_points


class EvalCommand:
    name = "eval"
    help = "score predicted centers against COCO ground truth"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("coco", type=Path, help="COCO annotation JSON")
        parser.add_argument("preds", type=Path, help="point JSONL file")

    def handle(self, context: CommandContext) -> CommandResult:
        settings = context.settings
        dataset = load_coco(context.args.coco)
        points = load_points(context.args.preds)
        report = evaluate_dataset(
            dataset,
            points,
            params=settings.match_params,
            aggregation=settings.aggregation,
            band=settings.band,
            threads=settings.threads,
        )
        return CommandResult(handled=True, output=(report.to_json() + "\n").encode("utf-8"))
