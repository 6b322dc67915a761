"""Core value types: boxes, IoU, RLE masks, dataset integrity."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from stamp.errors import IntegrityError
from stamp.model import (
    Annotation,
    AnnotationSource,
    BBox,
    BinaryMask,
    Dataset,
    ImageRecord,
    SyntheticProvenance,
    bbox_from_mask,
    iou,
    mask_from_json,
    mask_to_json,
    rle_decode,
    rle_encode,
)

from oracles import iou_oracle, scan_bbox

bool_grids = hnp.arrays(
    dtype=bool,
    shape=st.tuples(st.integers(1, 256), st.integers(1, 256)),
)


# ---------------------------------------------------------------- BBox / IoU

def test_bbox_validation():
    BBox(0, 0, 1, 1)
    with pytest.raises(IntegrityError):
        BBox(-1, 0, 1, 1)
    with pytest.raises(IntegrityError):
        BBox(0, 0, 0, 1)
    with pytest.raises(IntegrityError):
        BBox(0, 0, 1, -2)


def test_bbox_area_and_clamp():
    assert BBox(1, 2, 3, 4).area == 12
    clamped = BBox(5, 5, 10, 10).clamped(8, 8)
    assert (clamped.x, clamped.y, clamped.w, clamped.h) == (5, 5, 3, 3)


def test_iou_fixed_points():
    a = BBox(0, 0, 2, 2)
    assert iou(a, a) == 1.0
    assert iou(a, BBox(10, 10, 2, 2)) == 0.0
    # overlap 1, union 4 + 4 - 1 = 7
    assert iou(a, BBox(1, 1, 2, 2)) == pytest.approx(1 / 7)
    # shared edge only: zero-area intersection
    assert iou(a, BBox(2, 0, 2, 2)) == 0.0


@given(
    st.tuples(*[st.integers(0, 20) for _ in range(2)], *[st.integers(1, 20) for _ in range(2)]),
    st.tuples(*[st.integers(0, 20) for _ in range(2)], *[st.integers(1, 20) for _ in range(2)]),
)
def test_iou_matches_corner_oracle_and_is_symmetric(ra, rb):
    a, b = BBox(*ra), BBox(*rb)
    assert iou(a, b) == pytest.approx(iou_oracle(ra, rb))
    assert iou(a, b) == iou(b, a)
    assert 0.0 <= iou(a, b) <= 1.0


# ---------------------------------------------------------------- RLE masks

def test_rle_canonical_example():
    # 2x2 grid, column-major flattening: [[T,F],[F,T]] -> [T,F,F,T]
    grid = np.array([[True, False], [False, True]])
    mask = rle_encode(grid)
    assert mask.counts == (0, 1, 2, 1)
    assert (rle_decode(mask) == grid).all()


def test_rle_empty_and_full():
    empty = rle_encode(np.zeros((3, 3), dtype=bool))
    assert empty.counts == (9,)
    full = rle_encode(np.ones((2, 2), dtype=bool))
    assert full.counts == (0, 4)


@settings(max_examples=200)
@given(bool_grids)
def test_rle_roundtrip_property(grid):
    mask = rle_encode(grid)
    assert (mask.height, mask.width) == grid.shape
    assert (rle_decode(mask) == grid).all()


@given(bool_grids)
def test_rle_counts_are_canonical(grid):
    mask = rle_encode(grid)
    assert sum(mask.counts) == grid.size
    assert all(c > 0 for c in mask.counts[1:])
    assert mask.counts[0] >= 0


def test_binary_mask_rejects_malformed_counts():
    with pytest.raises(IntegrityError):
        BinaryMask(height=2, width=2, counts=(1, 1))  # sum != 4
    with pytest.raises(IntegrityError):
        BinaryMask(height=2, width=2, counts=(2, 0, 0, 2))  # consecutive zero runs
    with pytest.raises(IntegrityError):
        BinaryMask(height=2, width=2, counts=(-1, 5))
    # a single interior zero run is legal (non-canonical but decodable)
    assert rle_decode(BinaryMask(height=2, width=2, counts=(0, 2, 0, 2))).all()


def test_mask_json_roundtrip():
    grid = np.zeros((5, 7), dtype=bool)
    grid[1:3, 2:5] = True
    mask = rle_encode(grid)
    payload = mask_to_json(mask)
    assert payload == {"size": [5, 7], "counts": list(mask.counts)}
    assert mask_from_json(payload) == mask
    with pytest.raises(IntegrityError):
        mask_from_json({"size": [5], "counts": [35]})


# ---------------------------------------------------------------- tight boxes

def test_bbox_from_mask_examples():
    assert bbox_from_mask(rle_encode(np.zeros((4, 4), bool))) is None
    single = np.zeros((4, 4), bool)
    single[2, 3] = True
    box = bbox_from_mask(rle_encode(single))
    assert (box.x, box.y, box.w, box.h) == (3, 2, 1, 1)


@settings(max_examples=300)
@given(hnp.arrays(dtype=bool, shape=st.tuples(st.integers(1, 24), st.integers(1, 24))))
def test_bbox_from_mask_matches_scan_oracle(grid):
    box = bbox_from_mask(rle_encode(grid))
    expected = scan_bbox(grid)
    if expected is None:
        assert box is None
    else:
        assert (box.x, box.y, box.w, box.h) == expected


# ---------------------------------------------------------------- dataset

def _tiny_dataset() -> Dataset:
    return Dataset(
        images=(
            ImageRecord(id=1, file_name="a.png", width=8, height=8),
            ImageRecord(
                id=2,
                file_name="clip/000001.png",
                width=8,
                height=8,
                provenance=SyntheticProvenance(source_image_id=1, clip_id="clip", frame_index=1),
            ),
        ),
        annotations=(
            Annotation(id=1, image_id=1, category_id=1, bbox=BBox(0, 0, 2, 2),
                       source=AnnotationSource.GROUND_TRUTH),
            Annotation(id=2, image_id=2, category_id=1, bbox=BBox(1, 1, 2, 2),
                       source=AnnotationSource.TRANSFERRED),
        ),
        categories={1: "thing"},
    )


def test_dataset_validate_passes_on_consistent_data():
    _tiny_dataset().validate()


def test_dataset_rejects_duplicate_image_ids():
    ds = _tiny_dataset()
    with pytest.raises(IntegrityError):
        Dataset(
            images=ds.images + (ImageRecord(id=1, file_name="dup.png", width=4, height=4),),
            annotations=ds.annotations,
            categories=ds.categories,
        ).validate()


def test_dataset_rejects_dangling_references():
    ds = _tiny_dataset()
    bad = Annotation(id=3, image_id=99, category_id=1, bbox=BBox(0, 0, 1, 1),
                     source=AnnotationSource.GROUND_TRUTH)
    with pytest.raises(IntegrityError):
        Dataset(images=ds.images, annotations=ds.annotations + (bad,),
                categories=ds.categories).validate()
    bad_cat = Annotation(id=3, image_id=1, category_id=9, bbox=BBox(0, 0, 1, 1),
                         source=AnnotationSource.GROUND_TRUTH)
    with pytest.raises(IntegrityError):
        Dataset(images=ds.images, annotations=ds.annotations + (bad_cat,),
                categories=ds.categories).validate()


def test_dataset_rejects_synthetic_source_pointing_at_synthetic():
    ds = _tiny_dataset()
    nested = ImageRecord(
        id=3, file_name="clip/000002.png", width=8, height=8,
        provenance=SyntheticProvenance(source_image_id=2, clip_id="clip", frame_index=2),
    )
    with pytest.raises(IntegrityError):
        Dataset(images=ds.images + (nested,), annotations=ds.annotations,
                categories=ds.categories).validate()


def test_confidence_only_on_pseudo():
    with pytest.raises(IntegrityError):
        Annotation(id=1, image_id=1, category_id=1, bbox=BBox(0, 0, 1, 1),
                   source=AnnotationSource.GROUND_TRUTH, confidence=0.5)
    with pytest.raises(IntegrityError):
        Annotation(id=1, image_id=1, category_id=1, bbox=BBox(0, 0, 1, 1),
                   source=AnnotationSource.PSEUDO)  # missing confidence
    with pytest.raises(IntegrityError):
        Annotation(id=1, image_id=1, category_id=1, bbox=BBox(0, 0, 1, 1),
                   source=AnnotationSource.PSEUDO, confidence=1.5)


def test_next_ids_and_with_added():
    ds = _tiny_dataset()
    assert ds.next_image_id() == 3
    assert ds.next_annotation_id() == 3
    grown = ds.with_added(
        images=[ImageRecord(id=3, file_name="b.png", width=4, height=4)],
        annotations=[Annotation(id=3, image_id=3, category_id=1, bbox=BBox(0, 0, 1, 1),
                                source=AnnotationSource.GROUND_TRUTH)],
    )
    assert len(grown.images) == 3 and len(grown.annotations) == 3
    assert len(ds.images) == 2  # original untouched
    grown.validate()
