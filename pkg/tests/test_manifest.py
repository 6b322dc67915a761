"""Ratio-balanced training manifests: per-epoch counts, cycling, determinism."""

from __future__ import annotations

from collections import Counter

import pytest

from stamp.errors import FileFormatError, IntegrityError
from stamp.manifest import (
    REAL,
    SYNTHETIC,
    Manifest,
    build_manifest,
    cycle_length,
    emit_manifest,
    parse_manifest,
)
from stamp.model import Dataset, ImageRecord, SyntheticProvenance


def _dataset(real: int, synthetic: int) -> Dataset:
    images = [
        ImageRecord(id=i + 1, file_name=f"real/{i}.png", width=8, height=8)
        for i in range(real)
    ]
    images += [
        ImageRecord(
            id=real + j + 1,
            file_name=f"clip/{j}.png",
            width=8,
            height=8,
            provenance=SyntheticProvenance(
                source_image_id=(j % real) + 1, clip_id=f"c{j}", frame_index=0
            ),
        )
        for j in range(synthetic)
    ]
    return Dataset(images=tuple(images), annotations=(), categories={})


def _ids(ds: Dataset, synthetic: bool) -> set[int]:
    return {
        img.id for img in ds.images if (img.provenance is not None) == synthetic
    }


def test_every_epoch_is_exactly_balanced():
    ds = _dataset(real=100, synthetic=800)
    m = build_manifest(ds, epochs=8, seed=7)
    real_ids, syn_ids = _ids(ds, False), _ids(ds, True)
    for epoch in m.epochs:
        assert len(epoch) == 200
        reals = [i for i, p in epoch if p == REAL]
        syns = [i for i, p in epoch if p == SYNTHETIC]
        assert len(reals) == 100 and len(syns) == 100
        assert set(reals) == real_ids          # every real image exactly once
        assert len(set(syns)) == 100
        assert set(syns) <= syn_ids


def test_synthetic_queue_cycles_through_pool_exactly_once():
    ds = _dataset(real=100, synthetic=800)
    assert cycle_length(100, 800) == 8
    m = build_manifest(ds, epochs=8, seed=7)
    drawn = Counter(
        i for epoch in m.epochs for i, p in epoch if p == SYNTHETIC
    )
    assert set(drawn) == _ids(ds, True)
    assert set(drawn.values()) == {1}  # each synthetic id exactly once per cycle
    # two full cycles: exactly twice each
    m16 = build_manifest(ds, epochs=16, seed=7)
    drawn16 = Counter(
        i for epoch in m16.epochs for i, p in epoch if p == SYNTHETIC
    )
    assert set(drawn16.values()) == {2}


def test_pool_smaller_than_cycle_stays_exact():
    # S=250, R=100: queue refills mid-epoch; over ceil(250/100)=3 epochs the
    # 300 draws use 250 distinct ids, 50 of them (the refill head) twice
    ds = _dataset(real=100, synthetic=250)
    assert cycle_length(100, 250) == 3
    m = build_manifest(ds, epochs=3, seed=21)
    drawn = Counter(i for epoch in m.epochs for i, p in epoch if p == SYNTHETIC)
    assert sum(drawn.values()) == 300
    assert set(drawn) == _ids(ds, True)       # everything appeared
    assert max(drawn.values()) == 2 and min(drawn.values()) == 1
    assert sum(1 for v in drawn.values() if v == 2) == 50


def test_epoch_order_is_shuffled_not_blocked():
    ds = _dataset(real=50, synthetic=50)
    m = build_manifest(ds, epochs=2, seed=3)
    for epoch in m.epochs:
        kinds = [p for _, p in epoch]
        # a grouped layout would put all reals first; shuffling must interleave
        assert kinds[:50].count(SYNTHETIC) > 0
    assert m.epochs[0] != m.epochs[1]  # per-epoch streams differ


def test_manifest_is_deterministic_and_seed_sensitive():
    ds = _dataset(real=20, synthetic=70)
    assert build_manifest(ds, 5, seed=1) == build_manifest(ds, 5, seed=1)
    assert build_manifest(ds, 5, seed=1) != build_manifest(ds, 5, seed=2)


def test_manifest_depends_only_on_id_sets_not_input_order():
    ds = _dataset(real=10, synthetic=30)
    shuffled = Dataset(
        images=tuple(reversed(ds.images)), annotations=(), categories={}
    )
    assert build_manifest(ds, 4, seed=9) == build_manifest(shuffled, 4, seed=9)


def test_epoch_prefix_is_stable_as_epoch_count_grows():
    ds = _dataset(real=10, synthetic=35)
    short = build_manifest(ds, 3, seed=5)
    long = build_manifest(ds, 9, seed=5)
    assert long.epochs[:3] == short.epochs


def test_unbalanced_mode_is_shuffled_concatenation():
    ds = _dataset(real=10, synthetic=40)
    m = build_manifest(ds, epochs=3, seed=2, balanced=False)
    for epoch in m.epochs:
        assert len(epoch) == 50
        counts = Counter(p for _, p in epoch)
        assert counts[REAL] == 10 and counts[SYNTHETIC] == 40
        assert {i for i, _ in epoch} == _ids(ds, False) | _ids(ds, True)


def test_empty_synthetic_pool_flagged_and_real_only():
    ds = _dataset(real=5, synthetic=0)
    m = build_manifest(ds, epochs=2, seed=0)
    assert m.synthetic_pool_empty is True
    for epoch in m.epochs:
        assert len(epoch) == 5
        assert all(p == REAL for _, p in epoch)


def test_invalid_inputs_are_errors():
    empty = Dataset(images=(), annotations=(), categories={})
    with pytest.raises(IntegrityError):  # no real images to balance against
        build_manifest(empty, epochs=1, seed=1)
    with pytest.raises(IntegrityError):  # epoch count must be positive
        build_manifest(_dataset(real=2, synthetic=2), epochs=0, seed=1)


def test_emit_parse_roundtrip(tmp_path):
    ds = _dataset(real=7, synthetic=15)
    m = build_manifest(ds, epochs=4, seed=13)
    path = tmp_path / "manifest.ndjson"
    emit_manifest(m, path)
    parsed = parse_manifest(path)
    assert parsed.epochs == m.epochs
    assert parsed.synthetic_pool_empty == m.synthetic_pool_empty
    first = path.read_bytes()
    emit_manifest(m, path)
    assert path.read_bytes() == first  # byte-identical rewrite


def test_emitted_lines_are_marker_then_entries(tmp_path):
    ds = _dataset(real=2, synthetic=2)
    m = build_manifest(ds, epochs=2, seed=8)
    path = tmp_path / "m.ndjson"
    emit_manifest(m, path)
    lines = path.read_text().splitlines()
    assert lines[0] == '{"epoch":0}'
    assert lines[5] == '{"epoch":1}'
    assert len(lines) == 2 + 2 * 4


def test_parse_rejects_malformed_files(tmp_path):
    path = tmp_path / "bad.ndjson"
    path.write_text('{"image_id":1,"provenance":"real"}\n')
    with pytest.raises(FileFormatError):  # entry before marker
        parse_manifest(path)
    path.write_text('{"epoch":1}\n')
    with pytest.raises(FileFormatError):  # must start at 0
        parse_manifest(path)
    path.write_text('{"epoch":0}\n{"image_id":1,"provenance":"guessed"}\n')
    with pytest.raises(FileFormatError):  # unknown provenance
        parse_manifest(path)
    path.write_text('{"epoch":0}\nnot json\n')
    with pytest.raises(FileFormatError):
        parse_manifest(path)
    with pytest.raises(FileFormatError):
        parse_manifest(tmp_path / "missing.ndjson")


def test_cycle_length_fixed_points():
    assert cycle_length(100, 800) == 8
    assert cycle_length(100, 250) == 3
    assert cycle_length(100, 0) == 1
    assert cycle_length(100, 1) == 1
    assert cycle_length(3, 10) == 4


def test_manifest_container_shape():
    m = Manifest(epochs=(((1, REAL),),))
    assert m.epochs[0][0] == (1, REAL)
    assert m.synthetic_pool_empty is False
