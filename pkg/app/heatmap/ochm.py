import logging
import struct
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.errors import CenterKitError, RasterFormatError, StorageError
from app.heatmap.models import Heatmap, HeatmapSidecar

logger = logging.getLogger(__name__)

MAGIC = b"OCHM"
VERSION = 1
# magic, version, reserved, channels, height, width, stride
HEADER = struct.Struct("<4sHHIIIf")
RASTER_SUFFIX = ".ochm"
SIDECAR_SUFFIX = ".json"


def encode_ochm(heatmap: Heatmap) -> bytes:
    header = HEADER.pack(MAGIC, VERSION, 0, heatmap.channels, heatmap.height, heatmap.width, heatmap.stride)
    return header + heatmap.data.astype("<f4", copy=False).tobytes(order="C")


def decode_ochm(raw: bytes) -> Heatmap:
    if len(raw) < HEADER.size:
        raise RasterFormatError(f"raster too short: {len(raw)} bytes, header needs {HEADER.size}")
    magic, version, _reserved, channels, height, width, stride = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise RasterFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise RasterFormatError(f"unsupported raster version {version}")
    expected = HEADER.size + 4 * channels * height * width
    if len(raw) != expected:
        raise RasterFormatError(f"raster payload is {len(raw)} bytes, header implies {expected}")
    data = np.frombuffer(raw, dtype="<f4", offset=HEADER.size).reshape(channels, height, width)
    try:
        return Heatmap(data.astype(np.float32), float(stride))
    except CenterKitError as exc:
        raise RasterFormatError(f"invalid raster contents: {exc}") from exc


def raster_path(directory: Path, image_id: int) -> Path:
    return Path(directory) / f"{image_id}{RASTER_SUFFIX}"


def write_ochm(directory: Path, heatmap: Heatmap, sidecar: HeatmapSidecar) -> Path:
    path = raster_path(directory, sidecar.image_id)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(encode_ochm(heatmap))
        path.with_suffix(SIDECAR_SUFFIX).write_text(sidecar.model_dump_json(), encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot write raster {path}: {exc}") from exc
    return path


def read_ochm(path: Path) -> Heatmap:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise StorageError(f"cannot read raster {path}: {exc}") from exc
    try:
        return decode_ochm(raw)
    except RasterFormatError as exc:
        raise RasterFormatError(f"{path}: {exc}") from exc


def read_sidecar(path: Path) -> HeatmapSidecar:
    sidecar_path = Path(path).with_suffix(SIDECAR_SUFFIX)
    try:
        text = sidecar_path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise RasterFormatError(f"missing channel sidecar {sidecar_path}") from exc
    except OSError as exc:
        raise StorageError(f"cannot read sidecar {sidecar_path}: {exc}") from exc
    try:
        return HeatmapSidecar.model_validate_json(text)
    except ValidationError as exc:
        raise RasterFormatError(f"invalid sidecar {sidecar_path}: {exc}") from exc


def read_heatmap_dir(directory: Path) -> list[tuple[Heatmap, HeatmapSidecar]]:
    directory = Path(directory)
    if not directory.is_dir():
        raise StorageError(f"heatmap directory {directory} does not exist")

    loaded: list[tuple[Heatmap, HeatmapSidecar]] = []
    for path in directory.glob(f"*{RASTER_SUFFIX}"):
        heatmap = read_ochm(path)
        sidecar = read_sidecar(path)
        if len(sidecar.category_ids) != heatmap.channels:
            raise RasterFormatError(
                f"{path}: sidecar lists {len(sidecar.category_ids)} categories for {heatmap.channels} channels"
            )
        loaded.append((heatmap, sidecar))
    loaded.sort(key=lambda item: item[1].image_id)
    logger.info("loaded heatmaps dir=%s files=%s", directory, len(loaded))
    return loaded
