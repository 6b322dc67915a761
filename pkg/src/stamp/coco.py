"""COCO-style annotation JSON load/save with lossless round-trip.

Toolkit-specific state rides on reserved keys so files stay consumable by
plain COCO tooling: image provenance under "stamp_provenance", annotation
source/confidence under "stamp_source"/"stamp_confidence". Unknown fields
anywhere are preserved opaquely.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import FileFormatError, IntegrityError
from .model import (
    Annotation,
    AnnotationSource,
    BBox,
    Dataset,
    ImageRecord,
    SyntheticProvenance,
)

PROVENANCE_KEY = "stamp_provenance"
SOURCE_KEY = "stamp_source"
CONFIDENCE_KEY = "stamp_confidence"

_IMAGE_KEYS = {"id", "file_name", "width", "height", PROVENANCE_KEY}
_ANN_KEYS = {"id", "image_id", "category_id", "bbox", SOURCE_KEY, CONFIDENCE_KEY}
_CAT_KEYS = {"id", "name"}
_TOP_KEYS = {"images", "annotations", "categories"}


def _image_from_obj(obj: dict) -> ImageRecord:
    provenance = None
    if PROVENANCE_KEY in obj:
        p = obj[PROVENANCE_KEY]
        provenance = SyntheticProvenance(
            source_image_id=int(p["source_image_id"]),
            clip_id=str(p["clip_id"]),
            frame_index=int(p["frame_index"]),
        )
    return ImageRecord(
        id=int(obj["id"]),
        file_name=str(obj["file_name"]),
        width=int(obj["width"]),
        height=int(obj["height"]),
        provenance=provenance,
        extras={k: v for k, v in obj.items() if k not in _IMAGE_KEYS},
    )


def _annotation_from_obj(obj: dict) -> Annotation:
    x, y, w, h = (float(v) for v in obj["bbox"])
    source = AnnotationSource(obj.get(SOURCE_KEY, "ground_truth"))
    confidence = obj.get(CONFIDENCE_KEY)
    return Annotation(
        id=int(obj["id"]),
        image_id=int(obj["image_id"]),
        category_id=int(obj["category_id"]),
        bbox=BBox(x, y, w, h),
        source=source,
        confidence=None if confidence is None else float(confidence),
        extras={k: v for k, v in obj.items() if k not in _ANN_KEYS},
    )


def load_coco(path: str | Path) -> Dataset:
    """Load and validate a COCO-style detection annotation file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(
            f"{path}: JSON parse error at line {exc.lineno} column {exc.colno} "
            f"(char {exc.pos}): {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise FileFormatError(f"{path}: top level must be a JSON object")

    images = []
    for obj in raw.get("images", []):
        try:
            images.append(_image_from_obj(obj))
        except (KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(f"{path}: malformed image entry {obj.get('id')}: {exc}") from exc

    annotations = []
    for obj in raw.get("annotations", []):
        try:
            annotations.append(_annotation_from_obj(obj))
        except (KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(
                f"{path}: malformed annotation entry {obj.get('id')}: {exc}"
            ) from exc

    categories: dict[int, str] = {}
    category_extras: dict[int, dict] = {}
    for obj in raw.get("categories", []):
        cid = int(obj["id"])
        categories[cid] = str(obj["name"])
        extra = {k: v for k, v in obj.items() if k not in _CAT_KEYS}
        if extra:
            category_extras[cid] = extra

    extras = {k: v for k, v in raw.items() if k not in _TOP_KEYS}
    try:
        return Dataset(
            images=tuple(images),
            annotations=tuple(annotations),
            categories=categories,
            category_extras=category_extras,
            extras=extras,
        )
    except IntegrityError as exc:
        raise IntegrityError(f"{path}: {exc}") from exc


def _image_to_obj(img: ImageRecord) -> dict:
    obj = {
        "id": img.id,
        "file_name": img.file_name,
        "width": img.width,
        "height": img.height,
    }
    if img.provenance is not None:
        obj[PROVENANCE_KEY] = {
            "source_image_id": img.provenance.source_image_id,
            "clip_id": img.provenance.clip_id,
            "frame_index": img.provenance.frame_index,
        }
    obj.update(img.extras)
    return obj


def _annotation_to_obj(ann: Annotation) -> dict:
    obj = {
        "id": ann.id,
        "image_id": ann.image_id,
        "category_id": ann.category_id,
        "bbox": [ann.bbox.x, ann.bbox.y, ann.bbox.w, ann.bbox.h],
    }
    if ann.source is not AnnotationSource.GROUND_TRUTH:
        obj[SOURCE_KEY] = ann.source.value
    if ann.confidence is not None:
        obj[CONFIDENCE_KEY] = ann.confidence
    obj.update(ann.extras)
    return obj


def save_coco(ds: Dataset, path: str | Path) -> None:
    """Write a Dataset so load_coco recovers an equal value."""
    payload = dict(ds.extras)
    payload["images"] = [_image_to_obj(img) for img in ds.images]
    payload["annotations"] = [_annotation_to_obj(a) for a in ds.annotations]
    payload["categories"] = [
        {"id": cid, "name": name, **ds.category_extras.get(cid, {})}
        for cid, name in sorted(ds.categories.items())
    ]
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )
