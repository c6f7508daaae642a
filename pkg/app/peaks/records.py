import logging
from collections.abc import Iterable
from pathlib import Path

from pydantic import ValidationError

from app.errors import PointsParseError, StorageError
from app.peaks.models import CenterPoint, PointRecord

logger = logging.getLogger(__name__)


def sort_points(points: Iterable[CenterPoint]) -> list[CenterPoint]:
    return sorted(points, key=lambda p: (p.image_id, p.category_id, -p.score, p.y, p.x))


def encode_points(points: Iterable[CenterPoint]) -> bytes:
    lines = [PointRecord.from_point(point).model_dump_json() for point in sort_points(points)]
    return "".join(f"{line}\n" for line in lines).encode("utf-8")


def parse_points(raw: bytes) -> list[CenterPoint]:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise PointsParseError(f"points file is not valid UTF-8 at byte {exc.start}") from exc

    points: list[CenterPoint] = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            points.append(PointRecord.model_validate_json(line).to_point())
        except ValidationError as exc:
            error = exc.errors()[0]
            raise PointsParseError(f"{error['msg']} at {error['loc']}", line=number) from exc
    return points


def load_points(path: Path) -> list[CenterPoint]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise StorageError(f"cannot read points {path}: {exc}") from exc
    points = parse_points(raw)
    logger.info("loaded points path=%s count=%s", path, len(points))
    return points
