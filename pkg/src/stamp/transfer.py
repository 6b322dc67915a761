"""Annotation transfer: per-object mask sequences -> per-frame boxes.

Each generated clip starts from one annotated source image. An out-of-process
tracker/segmenter produces, for every source object, a mask per clip frame;
this module attaches a synthetic image record per selected frame and derives
a transferred annotation (tightest box of the mask) for every object still
visible in that frame.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FileFormatError, IntegrityError
from .model import (
    Annotation,
    AnnotationSource,
    BinaryMask,
    Dataset,
    ImageRecord,
    SyntheticProvenance,
    bbox_from_mask,
    mask_from_json,
)
from .parallel import ordered_map

CLIP_MANIFEST = "clip.json"


@dataclass(frozen=True)
class ClipMaskSet:
    """All object masks for one generated clip.

    objects maps a source annotation id to that object's mask for every frame,
    in frame order (length frame_count). Masks must all share one frame size.
    """

    clip_id: str
    source_image_id: int
    frame_count: int
    objects: dict[int, tuple[BinaryMask, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.clip_id:
            raise IntegrityError("clip_id must be nonempty")
        if self.frame_count < 1:
            raise IntegrityError(f"frame_count must be >= 1, got {self.frame_count}")
        size: tuple[int, int] | None = None
        for ann_id, masks in self.objects.items():
            if len(masks) != self.frame_count:
                raise IntegrityError(
                    f"clip {self.clip_id!r}: object {ann_id} has {len(masks)} masks, "
                    f"expected {self.frame_count}"
                )
            for t, mask in enumerate(masks):
                if size is None:
                    size = (mask.height, mask.width)
                elif (mask.height, mask.width) != size:
                    raise IntegrityError(
                        f"clip {self.clip_id!r}: object {ann_id} frame {t} is "
                        f"{mask.height}x{mask.width}, clip is {size[0]}x{size[1]}"
                    )

    @property
    def frame_size(self) -> tuple[int, int]:
        """(height, width) of the clip frames."""
        for masks in self.objects.values():
            return masks[0].height, masks[0].width
        raise IntegrityError(f"clip {self.clip_id!r} has no objects")


def load_clip(clips_dir: str | Path, clip_id: str) -> ClipMaskSet:
    """Read one clip's manifest and mask files.

    Layout: {clips_dir}/{clip_id}/clip.json plus one RLE JSON per object and
    frame at {clips_dir}/{clip_id}/{annotation_id}/{frame_index}.json.
    """
    clip_dir = Path(clips_dir) / clip_id
    manifest_path = clip_dir / CLIP_MANIFEST
    try:
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"{manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{manifest_path}: invalid JSON: {exc}") from exc
    for key in ("clip_id", "source_image_id", "frame_count", "frames"):
        if key not in manifest:
            raise FileFormatError(f"{manifest_path}: missing key {key!r}")
    if manifest["clip_id"] != clip_id:
        raise FileFormatError(
            f"{manifest_path}: manifest clip_id {manifest['clip_id']!r} "
            f"does not match directory {clip_id!r}"
        )
    frames = manifest["frames"]
    frame_count = manifest["frame_count"]
    if not isinstance(frame_count, int) or frame_count < 1:
        raise FileFormatError(f"{manifest_path}: frame_count must be a positive integer")
    if not isinstance(frames, list) or len(frames) != frame_count:
        raise FileFormatError(
            f"{manifest_path}: frames list length {len(frames)} != frame_count {frame_count}"
        )

    objects: dict[int, tuple[BinaryMask, ...]] = {}
    for obj_dir in sorted(p for p in clip_dir.iterdir() if p.is_dir()):
        try:
            ann_id = int(obj_dir.name)
        except ValueError:
            raise FileFormatError(
                f"{obj_dir}: object directories must be named by annotation id"
            ) from None
        masks = []
        for t in range(frame_count):
            mask_path = obj_dir / f"{t}.json"
            try:
                with open(mask_path, encoding="utf-8") as fh:
                    payload = json.load(fh)
            except OSError as exc:
                raise FileFormatError(f"{mask_path}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise FileFormatError(f"{mask_path}: invalid JSON: {exc}") from exc
            try:
                masks.append(mask_from_json(payload))
            except IntegrityError as exc:
                raise FileFormatError(f"{mask_path}: {exc}") from exc
        objects[ann_id] = tuple(masks)
    return ClipMaskSet(
        clip_id=clip_id,
        source_image_id=manifest["source_image_id"],
        frame_count=frame_count,
        objects=objects,
    )


def save_clip(clip: ClipMaskSet, clips_dir: str | Path) -> Path:
    """Write a clip's manifest and mask files in the load_clip layout."""
    from .model import mask_to_json

    clip_dir = Path(clips_dir) / clip.clip_id
    clip_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "clip_id": clip.clip_id,
        "source_image_id": clip.source_image_id,
        "frame_count": clip.frame_count,
        "frames": [f"{t:06d}.png" for t in range(clip.frame_count)],
    }
    with open(clip_dir / CLIP_MANIFEST, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    for ann_id, masks in clip.objects.items():
        obj_dir = clip_dir / str(ann_id)
        obj_dir.mkdir(exist_ok=True)
        for t, mask in enumerate(masks):
            with open(obj_dir / f"{t}.json", "w", encoding="utf-8") as fh:
                json.dump(mask_to_json(mask), fh, sort_keys=True, separators=(",", ":"))
                fh.write("\n")
    return clip_dir


def discover_clips(clips_dir: str | Path) -> list[str]:
    """Sorted clip ids: subdirectories of clips_dir containing a clip manifest."""
    root = Path(clips_dir)
    if not root.is_dir():
        raise FileFormatError(f"{root}: not a directory")
    return sorted(p.name for p in root.iterdir() if (p / CLIP_MANIFEST).is_file())


def _check_clip_against(ds: Dataset, clip: ClipMaskSet) -> None:
    image = ds.image_by_id(clip.source_image_id)
    if image is None:
        raise IntegrityError(
            f"clip {clip.clip_id!r}: source image {clip.source_image_id} not in dataset"
        )
    by_id = {a.id: a for a in ds.annotations}
    for ann_id in clip.objects:
        ann = by_id.get(ann_id)
        if ann is None:
            raise IntegrityError(
                f"clip {clip.clip_id!r}: unknown source annotation id {ann_id}"
            )
        if ann.image_id != clip.source_image_id:
            raise IntegrityError(
                f"clip {clip.clip_id!r}: annotation {ann_id} belongs to image "
                f"{ann.image_id}, not source image {clip.source_image_id}"
            )
        if ann.source is not AnnotationSource.GROUND_TRUTH:
            raise IntegrityError(
                f"clip {clip.clip_id!r}: source annotation {ann_id} is not ground truth"
            )
    if clip.objects:
        h, w = clip.frame_size
        if (w, h) != (image.width, image.height):
            raise IntegrityError(
                f"clip {clip.clip_id!r}: frames are {w}x{h} but source image "
                f"{image.id} is {image.width}x{image.height}"
            )


def transfer_annotations(
    ds: Dataset,
    clip: ClipMaskSet,
    frame_indices: list[int],
    min_area: float = 1.0,
) -> Dataset:
    """Append synthetic frames and their transferred annotations for one clip.

    Every selected frame gains a synthetic ImageRecord; every object whose
    mask at that frame yields a box of area >= min_area gains a Transferred
    annotation with the tightest box of that mask and the source annotation's
    category. Ids continue from the current maxima, frames in given order,
    objects in ascending source-annotation order, so output is deterministic
    and re-running on the result cannot collide.
    """
    return _merge(ds, [_plan_clip(ds, clip, frame_indices, min_area)])


def transfer_clips(
    ds: Dataset,
    clips: list[ClipMaskSet],
    frame_indices: list[int],
    min_area: float = 1.0,
) -> Dataset:
    """Transfer several clips; per-clip work runs in parallel, merge is ordered.

    Output is identical to sequential transfer_annotations calls in ascending
    clip_id order, regardless of worker count.
    """
    seen: set[str] = set()
    for clip in clips:
        if clip.clip_id in seen:
            raise IntegrityError(f"duplicate clip_id {clip.clip_id!r}")
        seen.add(clip.clip_id)
    ordered = sorted(clips, key=lambda c: c.clip_id)
    plans = ordered_map(
        lambda clip: _plan_clip(ds, clip, frame_indices, min_area), ordered
    )
    return _merge(ds, plans)


_ClipPlan = list[tuple[SyntheticProvenance, str, list[tuple[int, object]]]]


def _plan_clip(
    ds: Dataset, clip: ClipMaskSet, frame_indices: list[int], min_area: float
) -> _ClipPlan:
    """Pure per-clip pass: (provenance, file name, [(source ann id, bbox)]) per frame."""
    _check_clip_against(ds, clip)
    if len(set(frame_indices)) != len(frame_indices):
        raise IntegrityError(f"clip {clip.clip_id!r}: duplicate frame indices")
    plan: _ClipPlan = []
    for t in frame_indices:
        if not 0 <= t < clip.frame_count:
            raise IntegrityError(
                f"clip {clip.clip_id!r}: frame index {t} out of range "
                f"[0, {clip.frame_count})"
            )
        # A frame where every mask is empty is still kept, with no annotations.
        boxes: list[tuple[int, object]] = []
        for ann_id in sorted(clip.objects):
            bbox = bbox_from_mask(clip.objects[ann_id][t])
            if bbox is not None and bbox.area >= min_area:
                boxes.append((ann_id, bbox))
        provenance = SyntheticProvenance(
            source_image_id=clip.source_image_id,
            clip_id=clip.clip_id,
            frame_index=t,
        )
        plan.append((provenance, f"{clip.clip_id}/{t:06d}.png", boxes))
    return plan


def _merge(ds: Dataset, plans: list[_ClipPlan]) -> Dataset:
    next_image = ds.next_image_id()
    next_ann = ds.next_annotation_id()
    source_by_id = {a.id: a for a in ds.annotations}
    images: list[ImageRecord] = []
    annotations: list[Annotation] = []
    for plan in plans:
        for provenance, file_name, boxes in plan:
            source_image = ds.image_by_id(provenance.source_image_id)
            assert source_image is not None  # checked in _plan_clip
            images.append(
                ImageRecord(
                    id=next_image,
                    file_name=file_name,
                    width=source_image.width,
                    height=source_image.height,
                    provenance=provenance,
                )
            )
            for ann_id, bbox in boxes:
                annotations.append(
                    Annotation(
                        id=next_ann,
                        image_id=next_image,
                        category_id=source_by_id[ann_id].category_id,
                        bbox=bbox,
                        source=AnnotationSource.TRANSFERRED,
                    )
                )
                next_ann += 1
            next_image += 1
    return ds.with_added(images=images, annotations=annotations)
