import json
import logging
from pathlib import Path

from pydantic import ValidationError

from app.annotations.models import BoundingBox, CocoDocument, Dataset, ImageInfo
from app.errors import CocoParseError, ReferentialIntegrityError, StorageError

logger = logging.getLogger(__name__)


def parse_coco(raw: bytes) -> Dataset:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CocoParseError("annotation file is not valid UTF-8", byte_offset=exc.start) from exc

    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise CocoParseError(f"malformed JSON: {exc.msg}", byte_offset=offset) from exc
    return build_dataset(data)


def build_dataset(data: object) -> Dataset:
    """Validate a decoded COCO document and index it."""
    try:
        document = CocoDocument.model_validate(data)
    except ValidationError as exc:
        raise CocoParseError(f"invalid COCO document: {exc.errors()[0]['msg']} at {exc.errors()[0]['loc']}") from exc

    images: dict[int, ImageInfo] = {}
    for image in document.images:
        if image.id in images:
            raise CocoParseError(f"duplicate image id {image.id}")
        images[image.id] = ImageInfo(id=image.id, width=image.width, height=image.height, file_name=image.file_name)
    categories = {category.id: category.name for category in document.categories}

    boxes: list[BoundingBox] = []
    for annotation in document.annotations:
        image = images.get(annotation.image_id)
        if image is None:
            raise ReferentialIntegrityError("image_id", annotation.image_id, annotation.id)
        if annotation.category_id not in categories:
            raise ReferentialIntegrityError("category_id", annotation.category_id, annotation.id)
        boxes.append(_clamped_box(annotation.bbox, image, annotation.category_id))

    logger.info(
        "parsed coco images=%s annotations=%s categories=%s",
        len(images),
        len(boxes),
        len(categories),
    )
    return Dataset(images=tuple(images.values()), boxes=tuple(boxes), categories=categories)


def load_coco(path: Path) -> Dataset:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise StorageError(f"cannot read annotations {path}: {exc}") from exc
    return parse_coco(raw)


def _clamped_box(bbox: tuple[float, float, float, float], image: ImageInfo, category_id: int) -> BoundingBox:
    x, y, w, h = (float(v) for v in bbox)
    x0 = min(max(x, 0.0), image.width)
    y0 = min(max(y, 0.0), image.height)
    x1 = min(max(x + max(w, 0.0), x0), image.width)
    y1 = min(max(y + max(h, 0.0), y0), image.height)
    return BoundingBox(x=x0, y=y0, w=x1 - x0, h=y1 - y0, category_id=category_id, image_id=image.id)
