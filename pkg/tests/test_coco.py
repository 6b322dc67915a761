"""Annotation-file I/O: lossless round-trips, reserved keys, error reporting."""

from __future__ import annotations

import json

import pytest

from stamp.coco import load_coco, save_coco
from stamp.errors import FileFormatError, IntegrityError
from stamp.model import (
    Annotation,
    AnnotationSource,
    BBox,
    Dataset,
    ImageRecord,
    SyntheticProvenance,
)


def _rich_dataset() -> Dataset:
    return Dataset(
        images=(
            ImageRecord(id=1, file_name="real.png", width=64, height=48,
                        extras={"license": 3}),
            ImageRecord(
                id=2, file_name="clip-a/000004.png", width=64, height=48,
                provenance=SyntheticProvenance(source_image_id=1, clip_id="clip-a",
                                               frame_index=4),
            ),
        ),
        annotations=(
            Annotation(id=1, image_id=1, category_id=1, bbox=BBox(4, 5, 6, 7),
                       source=AnnotationSource.GROUND_TRUTH, extras={"iscrowd": 0}),
            Annotation(id=2, image_id=2, category_id=2, bbox=BBox(1, 1, 2, 2),
                       source=AnnotationSource.TRANSFERRED),
            Annotation(id=3, image_id=2, category_id=1, bbox=BBox(0, 0, 3, 3),
                       source=AnnotationSource.PSEUDO, confidence=0.875),
        ),
        categories={1: "vehicle", 2: "person"},
        category_extras={1: {"supercategory": "object"}},
        extras={"info": {"year": 2024}},
    )


def test_roundtrip_preserves_everything(tmp_path):
    ds = _rich_dataset()
    path = tmp_path / "ann.json"
    save_coco(ds, path)
    loaded = load_coco(path)
    assert loaded == ds
    assert loaded.images[0].extras == {"license": 3}
    assert loaded.images[1].provenance == ds.images[1].provenance
    assert loaded.annotations[2].confidence == 0.875
    assert loaded.category_extras == {1: {"supercategory": "object"}}
    assert loaded.extras == {"info": {"year": 2024}}


def test_save_is_deterministic(tmp_path):
    ds = _rich_dataset()
    save_coco(ds, tmp_path / "a.json")
    save_coco(ds, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_plain_coco_file_loads_without_reserved_keys(tmp_path):
    payload = {
        "images": [{"id": 7, "file_name": "x.png", "width": 10, "height": 10}],
        "annotations": [
            {"id": 1, "image_id": 7, "category_id": 1, "bbox": [0, 0, 5, 5]}
        ],
        "categories": [{"id": 1, "name": "thing"}],
    }
    path = tmp_path / "plain.json"
    path.write_text(json.dumps(payload))
    ds = load_coco(path)
    assert ds.images[0].provenance is None
    assert ds.annotations[0].source is AnnotationSource.GROUND_TRUTH
    assert ds.annotations[0].confidence is None


def test_parse_error_names_file_and_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"images": [')
    with pytest.raises(FileFormatError) as exc:
        load_coco(path)
    assert "broken.json" in str(exc.value)
    assert "line" in str(exc.value)


def test_malformed_entry_names_offending_id(tmp_path):
    payload = {
        "images": [{"id": 7, "file_name": "x.png", "width": 10, "height": 10}],
        "annotations": [{"id": 42, "image_id": 7, "category_id": 1, "bbox": [0, 0]}],
        "categories": [{"id": 1, "name": "thing"}],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(FileFormatError) as exc:
        load_coco(path)
    assert "42" in str(exc.value)


def test_integrity_failure_names_file(tmp_path):
    payload = {
        "images": [{"id": 7, "file_name": "x.png", "width": 10, "height": 10}],
        "annotations": [
            {"id": 1, "image_id": 99, "category_id": 1, "bbox": [0, 0, 5, 5]}
        ],
        "categories": [{"id": 1, "name": "thing"}],
    }
    path = tmp_path / "dangling.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(IntegrityError) as exc:
        load_coco(path)
    assert "dangling.json" in str(exc.value)
    assert "99" in str(exc.value)


def test_non_object_top_level_rejected(tmp_path):
    path = tmp_path / "list.json"
    path.write_text("[1,2,3]")
    with pytest.raises(FileFormatError):
        load_coco(path)


def test_unknown_source_string_rejected(tmp_path):
    payload = {
        "images": [{"id": 7, "file_name": "x.png", "width": 10, "height": 10}],
        "annotations": [
            {"id": 1, "image_id": 7, "category_id": 1, "bbox": [0, 0, 5, 5],
             "stamp_source": "guessed"}
        ],
        "categories": [{"id": 1, "name": "thing"}],
    }
    path = tmp_path / "src.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(FileFormatError):
        load_coco(path)
