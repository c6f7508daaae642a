import argparse
from pathlib import Path

from app.commands.base import CommandContext, CommandResult
from app.errors import ShapeMismatchError, StorageError
from app.heatmap.models import Heatmap
from app.heatmap.ochm import read_ochm
from app.heatmap.pgm import encode_pgm
from app.heatmap.render import render_gc_shape


def _emit(pgm: bytes, out: Path | None) -> CommandResult:
    if out is None:
        return CommandResult(handled=True, output=pgm)
    try:
        out.write_bytes(pgm)
    except OSError as exc:
        raise StorageError(f"cannot write {out}: {exc}") from exc
    return CommandResult(handled=True)


def channel_pgm(heatmap: Heatmap, channel: int) -> bytes:
    if not 0 <= channel < heatmap.channels:
        raise ShapeMismatchError(f"channel {channel} out of range for {heatmap.channels} channels")
    return encode_pgm(heatmap.data[channel])


class VizCommand:
    name = "viz"
    help = "export one heatmap channel as an 8-bit PGM image"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("heatmap", type=Path, help=".ochm raster")
        parser.add_argument("--channel", type=int, default=0)
        parser.add_argument("--out", type=Path, default=None, help="write to a file instead of standard output")

    def handle(self, context: CommandContext) -> CommandResult:
        args = context.args
        return _emit(channel_pgm(read_ochm(args.heatmap), args.channel), args.out)


class ShapeCommand:
    name = "shape"
    help = "export the GC shape of a single full-frame box as PGM"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--width", type=int, default=256)
        parser.add_argument("--height", type=int, default=256)
        parser.add_argument("--out", type=Path, default=None)

    def handle(self, context: CommandContext) -> CommandResult:
        settings = context.settings
        args = context.args
        heatmap = render_gc_shape(args.width, args.height, settings.stride, settings.gc_params)
        return _emit(encode_pgm(heatmap.data[0]), args.out)
