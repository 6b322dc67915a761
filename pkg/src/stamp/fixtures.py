"""Deterministic toy workspace: a complete miniature pipeline input set.

Everything is synthesized from a seed — no model outputs, no binary blobs in
the repository. The workspace exercises every stage: a 2-image dataset, one
40-frame clip with two tracked objects (one exits view at frame 23), a dense
trajectory file describing a 1 px/frame leftward pan, detector predictions
targeting the revealed right band, embeddings, and CLIP-style scores.

Geometry worth knowing when reading tests:
- Selected frames at stride 5 are [0, 5, ..., 35]; object 2 is empty in 3 of
  them, so transfer yields 2*8 - 3 = 13 annotations.
- At frame t the pan has revealed the band x > 63 - t; with sigma = 2 the
  dense mask's valid region ends ~4 px past the content edge, with margins
  far above the thresholding tolerance.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .coco import save_coco
from .imaging import save_png
from .model import (
    Annotation,
    AnnotationSource,
    BBox,
    Dataset,
    ImageRecord,
    rle_encode,
)
from .pseudolabel import Prediction, save_predictions
from .rng import SplitMix64, derive_seed
from .tensorio import EmbeddingMatrix, FlowField, save_embeddings, save_flow, save_scores
from .transfer import ClipMaskSet, save_clip

WIDTH, HEIGHT = 64, 48
FRAME_COUNT = 40
CLIP_ID = "clip-a"
OBJECT1_BOX = (40, 20, 10, 8)  # category 1, moves left 1 px/frame
OBJECT2_BOX = (8, 30, 6, 12)  # category 2, moves right 2 px/frame, gone at t >= 23
OBJECT2_LAST_FRAME = 22


def _rect_mask(x0: int, y0: int, w: int, h: int) -> np.ndarray:
    grid = np.zeros((HEIGHT, WIDTH), dtype=bool)
    grid[y0 : y0 + h, x0 : x0 + w] = True
    return grid


def _object1_rect(t: int) -> tuple[int, int, int, int]:
    x0, y0, w, h = OBJECT1_BOX
    return x0 - t, y0, w, h


def _object2_rect(t: int) -> tuple[int, int, int, int] | None:
    if t > OBJECT2_LAST_FRAME:
        return None
    x0, y0, w, h = OBJECT2_BOX
    return x0 + 2 * t, y0, w, h


def build_dataset() -> Dataset:
    images = (
        ImageRecord(id=1, file_name="real/000001.png", width=WIDTH, height=HEIGHT),
        ImageRecord(id=2, file_name="real/000002.png", width=WIDTH, height=HEIGHT),
    )
    annotations = (
        Annotation(id=1, image_id=1, category_id=1, bbox=BBox(*OBJECT1_BOX),
                   source=AnnotationSource.GROUND_TRUTH),
        Annotation(id=2, image_id=1, category_id=2, bbox=BBox(*OBJECT2_BOX),
                   source=AnnotationSource.GROUND_TRUTH),
        Annotation(id=3, image_id=2, category_id=1, bbox=BBox(10, 10, 12, 10),
                   source=AnnotationSource.GROUND_TRUTH),
    )
    return Dataset(images=images, annotations=annotations,
                   categories={1: "vehicle", 2: "person"})


def build_clip() -> ClipMaskSet:
    masks1 = []
    masks2 = []
    for t in range(FRAME_COUNT):
        masks1.append(rle_encode(_rect_mask(*_object1_rect(t))))
        rect2 = _object2_rect(t)
        masks2.append(
            rle_encode(_rect_mask(*rect2) if rect2 else np.zeros((HEIGHT, WIDTH), bool))
        )
    return ClipMaskSet(
        clip_id=CLIP_ID,
        source_image_id=1,
        frame_count=FRAME_COUNT,
        objects={1: tuple(masks1), 2: tuple(masks2)},
    )


def build_flow() -> FlowField:
    """Leftward pan: frame-0 pixel (x, y) lands at (x - t, y), visible while x >= t."""
    flow = np.zeros((FRAME_COUNT, HEIGHT, WIDTH, 2), dtype=np.float32)
    vis = np.zeros((FRAME_COUNT, HEIGHT, WIDTH), dtype=np.float32)
    x = np.arange(WIDTH)[None, :]
    for t in range(FRAME_COUNT):
        flow[t, :, :, 0] = -t
        vis[t] = (x >= t).astype(np.float32)
    conf = np.ones((FRAME_COUNT, HEIGHT, WIDTH), dtype=np.float32)
    return FlowField(flow=flow, vis=vis, conf=conf)


def _base_image(rng: SplitMix64) -> np.ndarray:
    """Gradient background with both objects drawn at their frame-0 positions."""
    ramp_x = np.linspace(40, 150, WIDTH, dtype=np.float64)[None, :]
    ramp_y = np.linspace(0, 60, HEIGHT, dtype=np.float64)[:, None]
    pixels = np.zeros((HEIGHT, WIDTH, 3), dtype=np.uint8)
    pixels[:, :, 0] = (ramp_x + ramp_y).astype(np.uint8)
    pixels[:, :, 1] = (ramp_x * 0.5 + 30).astype(np.uint8)
    pixels[:, :, 2] = (90 + ramp_y).astype(np.uint8)
    noise = np.array(
        [[rng.below(24) for _ in range(WIDTH)] for _ in range(HEIGHT)], dtype=np.uint8
    )
    pixels[:, :, 1] += noise
    x0, y0, w, h = OBJECT1_BOX
    pixels[y0 : y0 + h, x0 : x0 + w] = (220, 60, 50)
    x0, y0, w, h = OBJECT2_BOX
    pixels[y0 : y0 + h, x0 : x0 + w] = (40, 200, 230)
    return pixels


def _frame_image(base: np.ndarray, t: int) -> np.ndarray:
    """Frame t: background panned left t px, revealed band black, objects drawn."""
    frame = np.zeros_like(base)
    if t < WIDTH:
        frame[:, : WIDTH - t] = base[:, t:]
    x0, y0, w, h = _object1_rect(t)
    frame[y0 : y0 + h, x0 : x0 + w] = (220, 60, 50)
    rect2 = _object2_rect(t)
    if rect2 is not None:
        x0, y0, w, h = rect2
        frame[y0 : y0 + h, x0 : x0 + w] = (40, 200, 230)
    return frame


def build_predictions() -> list[Prediction]:
    """Five predictions on the transferred images (ids 3..10, frame order).

    Image ids: 3 -> frame 0, 4 -> 5, ..., 10 -> 35. Two predictions pass all
    three selection rules; the others each isolate one rejection.
    """
    return [
        # frame 35 (image 10): confident, fully in the revealed band -> kept
        Prediction(image_id=10, category_id=1, bbox=BBox(40, 10, 16, 16), confidence=0.85),
        # frame 35: boundary confidence, exactly at conf_thr -> rejected (strict >)
        Prediction(image_id=10, category_id=1, bbox=BBox(40, 30, 12, 12), confidence=0.70),
        # frame 35: confident but inside surviving content -> rejected by area ratio
        Prediction(image_id=10, category_id=2, bbox=BBox(5, 5, 10, 10), confidence=0.90),
        # frame 20 (image 7): duplicates object 2's transferred box -> rejected by IoU
        Prediction(image_id=7, category_id=2, bbox=BBox(48, 30, 6, 12), confidence=0.90),
        # frame 30 (image 9): confident, in the revealed band -> kept
        Prediction(image_id=9, category_id=2, bbox=BBox(45, 20, 14, 14), confidence=0.75),
    ]


def build_embeddings(seed: int, count: int = 48, dim: int = 8) -> EmbeddingMatrix:
    rng = SplitMix64(derive_seed(seed, 0xE3B))
    rows = np.array(
        [[rng.uniform() for _ in range(dim)] for _ in range(count)], dtype=np.float32
    )
    ids = tuple(f"d-{i:03d}" for i in range(count))
    return EmbeddingMatrix(ids=ids, rows=rows)


def build_scores(seed: int, image_ids: list[int]) -> dict[str, float]:
    rng = SplitMix64(derive_seed(seed, 0x5C0))
    return {str(i): round(rng.uniform(), 6) for i in image_ids}


def toy_config() -> dict:
    return {
        "paths": {
            "dataset": "dataset.json",
            "clips_dir": "clips",
            "flows_dir": "flows",
            "predictions": "predictions.json",
            "masks_dir": "out/masks",
            "embeddings_u": "embeddings.emb1",
            "embeddings_d": "embeddings.emb1",
            "scores": "scores.json",
            "out_dir": "out",
        },
        "dense_mask": {"tau_vis": 0.9, "tau_conf": 0.1, "sigma": 2.0, "tau_w": 0.5},
        "pseudo": {"conf_thr": 0.7, "area_ratio_thr": 0.5, "iou_thr": 0.5},
        "recall": {"k": 3},
        "kid": {"subset_size": 16, "n_subsets": 10, "seed": 7},
        "curation": {
            "stride": 5, "count": 8, "offset": 0, "min_area": 1.0,
            "remove_fraction": 0.25, "crop_w": 32, "crop_h": 24, "n_crops": 2,
            "rescale": False, "crop_seed": 11, "max_area": 442368, "multiple": 32,
        },
        "manifest": {"epochs": 4, "seed": 5, "balanced": True},
    }


def build_workspace(out_dir: str | Path, seed: int = 2024) -> dict:
    """Write the full toy workspace; returns a content summary."""
    ws = Path(out_dir)
    ws.mkdir(parents=True, exist_ok=True)

    ds = build_dataset()
    save_coco(ds, ws / "dataset.json")

    clip = build_clip()
    (ws / "clips").mkdir(exist_ok=True)
    save_clip(clip, ws / "clips")

    (ws / "flows").mkdir(exist_ok=True)
    save_flow(build_flow(), ws / "flows" / f"{CLIP_ID}.flw1")

    save_predictions(build_predictions(), ws / "predictions.json")

    emb = build_embeddings(seed)
    save_embeddings(emb, ws / "embeddings.emb1", ws / "embeddings.ids.json")

    # ids 3..10 are the transferred images for the 8 selected frames
    save_scores(build_scores(seed, list(range(3, 11))), ws / "scores.json")

    frames_dir = ws / "frames"
    (frames_dir / "real").mkdir(parents=True, exist_ok=True)
    (frames_dir / CLIP_ID).mkdir(parents=True, exist_ok=True)
    base = _base_image(SplitMix64(derive_seed(seed, 0x1879)))
    save_png(base, frames_dir / "real" / "000001.png")
    alt = base[:, ::-1].copy()
    save_png(alt, frames_dir / "real" / "000002.png")
    selected = list(range(0, 40, 5))
    for t in selected:
        save_png(_frame_image(base, t), frames_dir / CLIP_ID / f"{t:06d}.png")

    with open(ws / "config.json", "w", encoding="utf-8") as fh:
        json.dump(toy_config(), fh, indent=2, sort_keys=True)
        fh.write("\n")

    nonempty = sum(
        1
        for t in selected
        for masks in clip.objects.values()
        if masks[t].counts != (HEIGHT * WIDTH,)
    )
    return {
        "workspace": str(ws),
        "real_images": len(ds.images),
        "clips": 1,
        "clip_frames": FRAME_COUNT,
        "selected_frames": selected,
        "nonempty_selected_masks": nonempty,
        "predictions": 5,
        "embedding_rows": emb.count,
    }
