"""Pseudo-label selection over detector predictions in disoccluded regions.

Synthetic frames inherit boxes only for tracked objects; content revealed by
motion has none. A detector trained on the transferred boxes proposes labels
there, and a prediction is kept iff it is confident, lies mostly in the
invalid (newly revealed) region, and does not duplicate an existing box.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .disocclusion import ValidityMask, invalid_fraction
from .errors import FileFormatError, IntegrityError
from .model import Annotation, AnnotationSource, BBox, Dataset, iou


@dataclass(frozen=True)
class Prediction:
    image_id: int
    category_id: int
    bbox: BBox
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise IntegrityError(
                f"prediction confidence must be in [0, 1], got {self.confidence}"
            )


@dataclass(frozen=True)
class PseudoLabelParams:
    """Selection thresholds.

    Confidence must strictly exceed conf_thr; the invalid-area ratio is
    inclusive (>= area_ratio_thr); the duplicate test is strict (IoU with
    every existing box < iou_thr).
    """

    conf_thr: float = 0.7
    area_ratio_thr: float = 0.5
    iou_thr: float = 0.5

    def __post_init__(self):
        for name in ("conf_thr", "area_ratio_thr", "iou_thr"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise IntegrityError(f"{name} must be in [0, 1], got {value}")


def select_pseudo_labels(
    preds: list[Prediction],
    gt: list[Annotation],
    mask: ValidityMask,
    p: PseudoLabelParams = PseudoLabelParams(),
) -> list[Annotation]:
    """Filter predictions for one image into Pseudo annotations (ids unset: 0).

    gt is the image's existing boxes of any source — transferred boxes count
    as ground truth here. Kept annotations keep input order and carry their
    prediction confidence; assign real ids via merge_pseudo.
    """
    image_ids = {q.image_id for q in preds} | {a.image_id for a in gt}
    if len(image_ids) > 1:
        raise IntegrityError(f"mixed image ids in selection: {sorted(image_ids)}")
    kept = []
    for pred in preds:
        if not (
            pred.confidence > p.conf_thr
            and invalid_fraction(pred.bbox, mask) >= p.area_ratio_thr
            and all(iou(pred.bbox, a.bbox) < p.iou_thr for a in gt)
        ):
            continue
        kept.append(
            Annotation(
                id=0,
                image_id=pred.image_id,
                category_id=pred.category_id,
                bbox=pred.bbox,
                source=AnnotationSource.PSEUDO,
                confidence=pred.confidence,
            )
        )
    return kept


def merge_pseudo(ds: Dataset, pseudo: list[Annotation]) -> Dataset:
    """Append pseudo annotations with fresh sequential ids."""
    next_id = ds.next_annotation_id()
    merged = []
    for ann in pseudo:
        if ann.source is not AnnotationSource.PSEUDO:
            raise IntegrityError(f"annotation {ann.id} is not a pseudo label")
        if ds.image_by_id(ann.image_id) is None:
            raise IntegrityError(f"pseudo label references unknown image {ann.image_id}")
        merged.append(
            Annotation(
                id=next_id,
                image_id=ann.image_id,
                category_id=ann.category_id,
                bbox=ann.bbox,
                source=AnnotationSource.PSEUDO,
                confidence=ann.confidence,
                extras=ann.extras,
            )
        )
        next_id += 1
    return ds.with_added(annotations=merged)


def load_predictions(path: str | Path) -> list[Prediction]:
    """Read a predictions file: array of {image_id, category_id, bbox, score}."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise FileFormatError(f"{path}: expected a JSON array of predictions")
    preds = []
    for i, entry in enumerate(raw):
        try:
            bbox = entry["bbox"]
            preds.append(
                Prediction(
                    image_id=entry["image_id"],
                    category_id=entry["category_id"],
                    bbox=BBox(*(float(v) for v in bbox)),
                    confidence=float(entry["score"]),
                )
            )
        except (KeyError, TypeError, ValueError, IntegrityError) as exc:
            raise FileFormatError(f"{path}: prediction #{i}: {exc}") from exc
    return preds


def save_predictions(preds: list[Prediction], path: str | Path) -> None:
    payload = [
        {
            "image_id": p.image_id,
            "category_id": p.category_id,
            "bbox": [p.bbox.x, p.bbox.y, p.bbox.w, p.bbox.h],
            "score": p.confidence,
        }
        for p in preds
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
