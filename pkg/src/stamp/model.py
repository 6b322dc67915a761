"""Dataset object model, mask container, and box geometry.

Everything here is an immutable value after construction; all functions are
pure. Boxes are [x, y, w, h] floats; masks are COCO-style column-major RLE.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import IntegrityError


class AnnotationSource(enum.Enum):
    GROUND_TRUTH = "ground_truth"
    TRANSFERRED = "transferred"
    PSEUDO = "pseudo"


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in [x, y, w, h] pixels. Zero-area boxes are rejected."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise IntegrityError(f"box origin must be non-negative, got ({self.x}, {self.y})")
        if self.w <= 0 or self.h <= 0:
            raise IntegrityError(f"box must have positive area, got w={self.w} h={self.h}")

    @property
    def area(self) -> float:
        return self.w * self.h

    def clamped(self, width: int, height: int) -> "BBox":
        """Clip to image bounds (raises if nothing positive-area remains)."""
        x0 = min(max(self.x, 0.0), float(width))
        y0 = min(max(self.y, 0.0), float(height))
        x1 = min(self.x + self.w, float(width))
        y1 = min(self.y + self.h, float(height))
        return BBox(x0, y0, x1 - x0, y1 - y0)


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union; 0.0 for disjoint boxes."""
    ix = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    iy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


@dataclass(frozen=True)
class SyntheticProvenance:
    """Where a generated frame came from: source image, clip, and frame index."""

    source_image_id: int
    clip_id: str
    frame_index: int

    def __post_init__(self):
        if self.frame_index < 0:
            raise IntegrityError(f"frame_index must be >= 0, got {self.frame_index}")


@dataclass(frozen=True)
class ImageRecord:
    """One image; provenance is None for real images."""

    id: int
    file_name: str
    width: int
    height: int
    provenance: SyntheticProvenance | None = None
    extras: dict = field(default_factory=dict, compare=True)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise IntegrityError(
                f"image {self.id}: dimensions must be positive, got {self.width}x{self.height}"
            )

    @property
    def is_synthetic(self) -> bool:
        return self.provenance is not None


@dataclass(frozen=True)
class Annotation:
    """A labelled box. confidence is present exactly for pseudo-labels."""

    id: int
    image_id: int
    category_id: int
    bbox: BBox
    source: AnnotationSource = AnnotationSource.GROUND_TRUTH
    confidence: float | None = None
    extras: dict = field(default_factory=dict, compare=True)

    def __post_init__(self):
        if (self.confidence is not None) != (self.source is AnnotationSource.PSEUDO):
            raise IntegrityError(
                f"annotation {self.id}: confidence must be present iff source is pseudo"
            )
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise IntegrityError(
                f"annotation {self.id}: confidence {self.confidence} outside [0, 1]"
            )


@dataclass(frozen=True)
class BinaryMask:
    """Column-major RLE bitmap; first run counts zeros (COCO uncompressed RLE)."""

    height: int
    width: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.height <= 0 or self.width <= 0:
            raise IntegrityError(f"mask dimensions must be positive, got {self.height}x{self.width}")
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if any(c < 0 for c in counts):
            raise IntegrityError("mask run lengths must be non-negative")
        if sum(counts) != self.height * self.width:
            raise IntegrityError(
                f"mask run lengths sum to {sum(counts)}, expected {self.height * self.width}"
            )
        for i in range(len(counts) - 1):
            if counts[i] == 0 and counts[i + 1] == 0:
                raise IntegrityError("mask has consecutive zero-length runs")


def rle_encode(bitmap: np.ndarray) -> BinaryMask:
    """Encode a boolean H x W grid as canonical column-major RLE."""
    grid = np.asarray(bitmap, dtype=bool)
    if grid.ndim != 2 or grid.size == 0:
        raise IntegrityError(f"bitmap must be a non-empty 2-D grid, got shape {grid.shape}")
    h, w = grid.shape
    flat = grid.flatten(order="F")
    boundaries = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    edges = np.concatenate(([0], boundaries, [flat.size]))
    runs = np.diff(edges).tolist()
    if flat[0]:
        runs.insert(0, 0)
    return BinaryMask(height=h, width=w, counts=tuple(runs))


def rle_decode(mask: BinaryMask) -> np.ndarray:
    """Decode RLE back to a boolean H x W grid."""
    flat = np.zeros(mask.height * mask.width, dtype=bool)
    pos = 0
    value = False
    for run in mask.counts:
        if value:
            flat[pos : pos + run] = True
        pos += run
        value = not value
    return flat.reshape((mask.height, mask.width), order="F")


def mask_to_json(mask: BinaryMask) -> dict:
    """Uncompressed-RLE JSON object: {"size": [h, w], "counts": [...]}."""
    return {"size": [mask.height, mask.width], "counts": list(mask.counts)}


def mask_from_json(obj: dict) -> BinaryMask:
    """Parse the {"size": [h, w], "counts": [...]} form, validating invariants."""
    try:
        h, w = obj["size"]
        counts = obj["counts"]
    except (KeyError, TypeError, ValueError) as exc:
        raise IntegrityError(f"not an RLE mask object: {exc}") from exc
    return BinaryMask(height=int(h), width=int(w), counts=tuple(int(c) for c in counts))


def bbox_from_mask(mask: BinaryMask) -> BBox | None:
    """Tightest enclosing box of the true pixels, or None for an empty mask."""
    grid = rle_decode(mask)
    rows = np.flatnonzero(grid.any(axis=1))
    if rows.size == 0:
        return None
    cols = np.flatnonzero(grid.any(axis=0))
    return BBox(
        x=float(cols[0]),
        y=float(rows[0]),
        w=float(cols[-1] - cols[0] + 1),
        h=float(rows[-1] - rows[0] + 1),
    )


@dataclass(frozen=True)
class Dataset:
    """Images + annotations + category table, validated as a unit."""

    images: tuple[ImageRecord, ...]
    annotations: tuple[Annotation, ...]
    categories: dict[int, str]
    category_extras: dict[int, dict] = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        object.__setattr__(self, "annotations", tuple(self.annotations))
        self.validate()

    def validate(self) -> None:
        image_ids = [img.id for img in self.images]
        by_id = {img.id: img for img in self.images}
        if len(by_id) != len(image_ids):
            dup = next(i for i in image_ids if image_ids.count(i) > 1)
            raise IntegrityError(f"duplicate image id {dup}")
        ann_ids = set()
        for ann in self.annotations:
            if ann.id in ann_ids:
                raise IntegrityError(f"duplicate annotation id {ann.id}")
            ann_ids.add(ann.id)
            if ann.image_id not in by_id:
                raise IntegrityError(
                    f"annotation {ann.id} references missing image_id {ann.image_id}"
                )
            if ann.category_id not in self.categories:
                raise IntegrityError(
                    f"annotation {ann.id} references missing category_id {ann.category_id}"
                )
        for img in self.images:
            if img.provenance is not None:
                src = by_id.get(img.provenance.source_image_id)
                if src is None or src.is_synthetic:
                    raise IntegrityError(
                        f"synthetic image {img.id} references missing real source image "
                        f"{img.provenance.source_image_id}"
                    )

    def image_by_id(self, image_id: int) -> ImageRecord:
        for img in self.images:
            if img.id == image_id:
                return img
        raise IntegrityError(f"no image with id {image_id}")

    def annotations_for(self, image_id: int) -> list[Annotation]:
        return [a for a in self.annotations if a.image_id == image_id]

    def next_image_id(self) -> int:
        return max((img.id for img in self.images), default=0) + 1

    def next_annotation_id(self) -> int:
        return max((a.id for a in self.annotations), default=0) + 1

    def with_added(
        self,
        images: list[ImageRecord] = (),
        annotations: list[Annotation] = (),
    ) -> "Dataset":
        return replace(
            self,
            images=self.images + tuple(images),
            annotations=self.annotations + tuple(annotations),
        )
