"""Deterministic curation policies: frame selection, score filtering, and
generation-conditioning plans (resize rule, seeded random crops).

Everything here is a pure function of (inputs, seed); crop plans are executed
on pixels elsewhere, this module only decides coordinates.
"""

from __future__ import annotations

import json
import math
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

from .errors import FileFormatError, IntegrityError
from .rng import SplitMix64, derive_seed

DEFAULT_MAX_AREA = 768 * 576  # 442368
DEFAULT_MULTIPLE = 32
DEFAULT_CROP = (768, 576)


@dataclass(frozen=True)
class CropPlan:
    """Seeded crop decisions for one image.

    scale is 1.0 when no rescale was drawn; rects are (x, y, w, h) integer
    rectangles inside the scaled image bounds, each of the configured size.
    """

    image_id: int
    scale: float
    rects: tuple[tuple[int, int, int, int], ...]

    def __post_init__(self):
        if not 0.0 < self.scale <= 1.0:
            raise IntegrityError(f"scale must be in (0, 1], got {self.scale}")


def select_frames(total: int, stride: int, count: int, offset: int = 0) -> list[int]:
    """Evenly strided frame indices: [offset, offset+stride, ...], length count."""
    if total < 1 or stride < 1 or count < 1 or offset < 0:
        raise IntegrityError(
            f"select_frames: need total,stride,count >= 1 and offset >= 0, "
            f"got total={total} stride={stride} count={count} offset={offset}"
        )
    indices = [offset + i * stride for i in range(count)]
    for idx in indices:
        if idx >= total:
            raise IntegrityError(
                f"select_frames: index {idx} out of range for {total} frames"
            )
    return indices


def score_filter(
    scores: Mapping[Hashable, float],
    ids: Sequence[Hashable],
    remove_fraction: float,
) -> list[Hashable]:
    """Drop the floor(remove_fraction * N) lowest-scored ids; keep input order.

    Ties are broken by input position: among equal scores the later entry is
    removed first, so earlier entries survive.
    """
    if not 0.0 <= remove_fraction <= 1.0:
        raise IntegrityError(f"remove_fraction must be in [0, 1], got {remove_fraction}")
    for item in ids:
        if item not in scores:
            raise IntegrityError(f"no score for id {item!r}")
    n_remove = math.floor(remove_fraction * len(ids))
    if n_remove == 0:
        return list(ids)
    # sort ascending by (score, reversed input position) -> the first n_remove
    # entries are the lowest scores, later-input entries first within a tie
    order = sorted(range(len(ids)), key=lambda i: (scores[ids[i]], -i))
    removed = set(order[:n_remove])
    return [item for i, item in enumerate(ids) if i not in removed]


def _round_up(value: float, multiple: int) -> int:
    return multiple * math.ceil(value / multiple)


def plan_resize(
    width: int,
    height: int,
    max_area: int = DEFAULT_MAX_AREA,
    multiple: int = DEFAULT_MULTIPLE,
) -> tuple[int, int]:
    """Cap the area, then round each dimension up to the alignment multiple.

    Images over max_area are uniformly downscaled to exactly that area before
    rounding; smaller images are only rounded up.
    """
    if width < 1 or height < 1:
        raise IntegrityError(f"dimensions must be positive, got {width}x{height}")
    if max_area < 1 or multiple < 1:
        raise IntegrityError("max_area and multiple must be positive")
    w, h = float(width), float(height)
    if width * height > max_area:
        s = math.sqrt(max_area / (width * height))
        w, h = width * s, height * s
    return _round_up(w, multiple), _round_up(h, multiple)


def plan_crops(
    image_id: int,
    width: int,
    height: int,
    n: int,
    seed: int,
    crop_w: int = DEFAULT_CROP[0],
    crop_h: int = DEFAULT_CROP[1],
    rescale: bool = False,
) -> CropPlan:
    """Draw n crop rectangles of crop_w x crop_h from the seeded PRNG.

    x ~ Uniform{0..W-crop_w} and y ~ Uniform{0..H-crop_h} inclusive. With
    rescale, a single scale s ~ Uniform[s_min, 1] is drawn first (s_min makes
    the crop still fit) and the rectangles live in the scaled bounds; the
    scaled dimensions are floor(s * dim), clamped up to the crop size so a
    boundary draw can never make the crop infeasible.
    """
    if n < 1:
        raise IntegrityError(f"crop count must be >= 1, got {n}")
    if crop_w < 1 or crop_h < 1:
        raise IntegrityError(f"crop size must be positive, got {crop_w}x{crop_h}")
    rng = SplitMix64(seed)
    scale = 1.0
    w, h = width, height
    if rescale:
        s_min = max(crop_w / width, crop_h / height)
        if s_min > 1.0:
            raise IntegrityError(
                f"image {width}x{height} smaller than crop {crop_w}x{crop_h}"
            )
        scale = s_min + rng.uniform() * (1.0 - s_min)
        w = max(crop_w, math.floor(scale * width))
        h = max(crop_h, math.floor(scale * height))
    if w < crop_w or h < crop_h:
        raise IntegrityError(
            f"image {width}x{height} smaller than crop {crop_w}x{crop_h}"
        )
    rects = []
    for _ in range(n):
        x = rng.below(w - crop_w + 1)
        y = rng.below(h - crop_h + 1)
        rects.append((x, y, crop_w, crop_h))
    return CropPlan(image_id=image_id, scale=scale, rects=tuple(rects))


def plan_crops_batch(
    images: Sequence[tuple[int, int, int]],
    n: int,
    seed: int,
    crop_w: int = DEFAULT_CROP[0],
    crop_h: int = DEFAULT_CROP[1],
    rescale: bool = False,
) -> list[CropPlan]:
    """Plans for (image_id, width, height) triples with per-image derived seeds.

    Each image's stream is seeded by derive_seed(seed, image_id), so plans are
    independent of batch composition and order.
    """
    return [
        plan_crops(
            image_id,
            width,
            height,
            n,
            derive_seed(seed, image_id),
            crop_w=crop_w,
            crop_h=crop_h,
            rescale=rescale,
        )
        for image_id, width, height in images
    ]


def crop_plan_to_json(plan: CropPlan) -> dict:
    return {
        "image_id": plan.image_id,
        "scale": plan.scale,
        "rects": [list(rect) for rect in plan.rects],
    }


def crop_plan_from_json(payload: dict) -> CropPlan:
    try:
        return CropPlan(
            image_id=payload["image_id"],
            scale=float(payload["scale"]),
            rects=tuple(
                (int(x), int(y), int(w), int(h)) for x, y, w, h in payload["rects"]
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"malformed crop plan: {exc}") from exc


def save_crop_plans(plans: Sequence[CropPlan], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([crop_plan_to_json(p) for p in plans], fh, sort_keys=True,
                  separators=(",", ":"))
        fh.write("\n")


def load_crop_plans(path: str | Path) -> list[CropPlan]:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise FileFormatError(f"{path}: expected a JSON array of crop plans")
    return [crop_plan_from_json(entry) for entry in raw]


def save_kept_ids(ids: Sequence, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(list(ids), fh, separators=(",", ":"))
        fh.write("\n")
