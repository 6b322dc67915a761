"""Curation policies: frame selection, score filtering, resize and crop plans."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from stamp.curation import (
    CropPlan,
    crop_plan_from_json,
    crop_plan_to_json,
    load_crop_plans,
    plan_crops,
    plan_crops_batch,
    plan_resize,
    save_crop_plans,
    score_filter,
    select_frames,
)
from stamp.errors import FileFormatError, IntegrityError
from stamp.rng import derive_seed

from oracles import score_filter_oracle, splitmix64_stream


# ---------------------------------------------------------------- frames

def test_select_frames_fixed_points():
    assert select_frames(81, 5, 8, 0) == [0, 5, 10, 15, 20, 25, 30, 35]
    assert select_frames(40, 5, 8) == [0, 5, 10, 15, 20, 25, 30, 35]
    assert select_frames(10, 3, 3, 1) == [1, 4, 7]
    assert select_frames(1, 1, 1) == [0]


def test_select_frames_range_errors_name_first_bad_index():
    with pytest.raises(IntegrityError) as exc:
        select_frames(35, 5, 8, 1)  # 1 + 7*5 = 36 > 34
    assert "36" in str(exc.value)
    with pytest.raises(IntegrityError):
        select_frames(10, 0, 1)
    with pytest.raises(IntegrityError):
        select_frames(10, 1, 0)
    with pytest.raises(IntegrityError):
        select_frames(10, 1, 1, -1)


@given(st.integers(1, 50), st.integers(1, 10), st.integers(1, 10), st.integers(0, 10))
def test_select_frames_arithmetic_progression(total, stride, count, offset):
    last = offset + (count - 1) * stride
    if last >= total:
        with pytest.raises(IntegrityError):
            select_frames(total, stride, count, offset)
        return
    frames = select_frames(total, stride, count, offset)
    assert len(frames) == count
    assert all(b - a == stride for a, b in zip(frames, frames[1:]))
    assert frames[0] == offset and frames[-1] == last


# ---------------------------------------------------------------- score filter

def test_score_filter_examples():
    scores = {"a": 0.9, "b": 0.1, "c": 0.5, "d": 0.3}
    ids = ["a", "b", "c", "d"]
    assert score_filter(scores, ids, 0.0) == ["a", "b", "c", "d"]
    assert score_filter(scores, ids, 0.25) == ["a", "c", "d"]
    assert score_filter(scores, ids, 0.5) == ["a", "c"]
    assert score_filter(scores, ids, 1.0) == []
    # floor semantics: 0.49 of 4 removes exactly one
    assert score_filter(scores, ids, 0.49) == ["a", "c", "d"]


def test_score_filter_tie_removes_later_input_first():
    scores = {"a": 0.5, "b": 0.5, "c": 0.5, "d": 0.9}
    assert score_filter(scores, ["a", "b", "c", "d"], 0.25) == ["a", "b", "d"]
    assert score_filter(scores, ["a", "b", "c", "d"], 0.5) == ["a", "d"]


def test_score_filter_errors():
    with pytest.raises(IntegrityError):
        score_filter({"a": 1.0}, ["a", "b"], 0.5)
    with pytest.raises(IntegrityError):
        score_filter({"a": 1.0}, ["a"], 1.5)


@settings(max_examples=200)
@given(
    st.lists(st.integers(0, 7), min_size=0, max_size=30),
    st.floats(0.0, 1.0, allow_nan=False),
)
def test_score_filter_matches_sort_oracle(raw_scores, fraction):
    ids = [f"id{i}" for i in range(len(raw_scores))]
    scores = {f"id{i}": s / 4.0 for i, s in enumerate(raw_scores)}
    kept = score_filter(scores, ids, fraction)
    assert kept == score_filter_oracle(scores, ids, fraction)
    assert len(kept) == len(ids) - math.floor(fraction * len(ids))
    # kept ids preserve input order
    positions = [ids.index(x) for x in kept]
    assert positions == sorted(positions)


# ---------------------------------------------------------------- resize

def test_plan_resize_fixed_points():
    assert plan_resize(1920, 1080) == (896, 512)
    assert plan_resize(768, 576) == (768, 576)
    assert plan_resize(100, 100) == (128, 128)
    assert plan_resize(64, 64, max_area=442368, multiple=32) == (64, 64)


@given(st.integers(1, 4096), st.integers(1, 4096))
def test_plan_resize_properties(width, height):
    w, h = plan_resize(width, height)
    assert w % 32 == 0 and h % 32 == 0
    if width * height <= 442368:
        # round-up only: within one multiple above the original
        assert width <= w < width + 32
        assert height <= h < height + 32
    else:
        # area capped before rounding; aspect ratio preserved to rounding
        s = math.sqrt(442368 / (width * height))
        assert w == 32 * math.ceil(width * s / 32)
        assert h == 32 * math.ceil(height * s / 32)
        assert (width * s) * (height * s) <= 442368 * (1 + 1e-12)


def test_plan_resize_errors():
    with pytest.raises(IntegrityError):
        plan_resize(0, 10)
    with pytest.raises(IntegrityError):
        plan_resize(10, 10, max_area=0)


# ---------------------------------------------------------------- crops

def test_plan_crops_zero_slack_pins_origin():
    plan = plan_crops(1, 768, 576, n=5, seed=123)
    assert plan.scale == 1.0
    assert plan.rects == ((0, 0, 768, 576),) * 5


def test_plan_crops_draw_order_is_x_then_y_per_rect():
    width, height, crop_w, crop_h, seed = 100, 80, 60, 50, 2024
    raw = splitmix64_stream(seed, 6)
    expected = []
    for i in range(3):
        x = (raw[2 * i] * (width - crop_w + 1)) >> 64
        y = (raw[2 * i + 1] * (height - crop_h + 1)) >> 64
        expected.append((x, y, crop_w, crop_h))
    plan = plan_crops(7, width, height, n=3, seed=seed, crop_w=crop_w, crop_h=crop_h)
    assert plan.rects == tuple(expected)


def test_plan_crops_rescale_draws_scale_first():
    width, height, crop_w, crop_h, seed = 200, 100, 40, 30, 99
    raw = splitmix64_stream(seed, 3)
    s_min = max(crop_w / width, crop_h / height)
    scale = s_min + (raw[0] >> 11) * 2.0**-53 * (1.0 - s_min)
    w = max(crop_w, math.floor(scale * width))
    h = max(crop_h, math.floor(scale * height))
    x = (raw[1] * (w - crop_w + 1)) >> 64
    y = (raw[2] * (h - crop_h + 1)) >> 64
    plan = plan_crops(3, width, height, n=1, seed=seed,
                      crop_w=crop_w, crop_h=crop_h, rescale=True)
    assert plan.scale == scale
    assert plan.rects == ((x, y, crop_w, crop_h),)


@given(st.integers(0, 2**32), st.integers(1, 6))
def test_plan_crops_rects_stay_in_bounds(seed, n):
    width, height, crop_w, crop_h = 97, 61, 31, 17
    for rescale in (False, True):
        plan = plan_crops(1, width, height, n=n, seed=seed,
                          crop_w=crop_w, crop_h=crop_h, rescale=rescale)
        w = max(crop_w, math.floor(plan.scale * width))
        h = max(crop_h, math.floor(plan.scale * height))
        s_min = max(crop_w / width, crop_h / height)
        assert s_min <= plan.scale <= 1.0
        for x, y, cw, ch in plan.rects:
            assert (cw, ch) == (crop_w, crop_h)
            assert 0 <= x <= w - crop_w
            assert 0 <= y <= h - crop_h


def test_plan_crops_same_seed_same_plan():
    a = plan_crops(1, 640, 480, n=4, seed=55, rescale=True, crop_w=64, crop_h=48)
    b = plan_crops(1, 640, 480, n=4, seed=55, rescale=True, crop_w=64, crop_h=48)
    assert a == b
    c = plan_crops(1, 640, 480, n=4, seed=56, rescale=True, crop_w=64, crop_h=48)
    assert a != c


def test_plan_crops_origin_distribution_is_uniform():
    # 10000 independent draws of x over 16 possible origins
    counts = [0] * 16
    for seed in range(10000):
        plan = plan_crops(1, 79, 16, n=1, seed=seed, crop_w=64, crop_h=16)
        counts[plan.rects[0][0]] += 1
    chi2 = stats.chisquare(counts).statistic
    assert chi2 < stats.chi2.ppf(0.999, df=15)


def test_plan_crops_errors():
    with pytest.raises(IntegrityError):
        plan_crops(1, 10, 10, n=0, seed=0)
    with pytest.raises(IntegrityError):
        plan_crops(1, 10, 10, n=1, seed=0, crop_w=20, crop_h=5)
    with pytest.raises(IntegrityError):
        plan_crops(1, 10, 10, n=1, seed=0, crop_w=20, crop_h=5, rescale=True)


def test_plan_crops_batch_is_order_and_composition_independent():
    images = [(1, 640, 480), (2, 800, 600), (3, 1024, 768)]
    full = plan_crops_batch(images, n=2, seed=9, crop_w=32, crop_h=24)
    reordered = plan_crops_batch(images[::-1], n=2, seed=9, crop_w=32, crop_h=24)
    assert full == reordered[::-1]
    solo = plan_crops_batch([images[1]], n=2, seed=9, crop_w=32, crop_h=24)
    assert solo == [full[1]]
    direct = plan_crops(2, 800, 600, 2, derive_seed(9, 2), crop_w=32, crop_h=24)
    assert direct == full[1]


# ---------------------------------------------------------------- persistence

def test_crop_plan_json_roundtrip(tmp_path):
    plans = plan_crops_batch([(1, 640, 480), (2, 320, 240)], n=3, seed=4,
                             crop_w=100, crop_h=50, rescale=True)
    payloads = [crop_plan_to_json(p) for p in plans]
    assert [crop_plan_from_json(p) for p in payloads] == plans
    path = tmp_path / "plans.json"
    save_crop_plans(plans, path)
    assert load_crop_plans(path) == plans
    save_crop_plans(plans, tmp_path / "again.json")
    assert (tmp_path / "plans.json").read_bytes() == (tmp_path / "again.json").read_bytes()


def test_crop_plan_malformed_rejected(tmp_path):
    with pytest.raises(FileFormatError):
        crop_plan_from_json({"image_id": 1, "scale": 0.5})
    path = tmp_path / "bad.json"
    path.write_text('{"not": "a list"}')
    with pytest.raises(FileFormatError):
        load_crop_plans(path)
    with pytest.raises(IntegrityError):
        CropPlan(image_id=1, scale=1.5, rects=())
