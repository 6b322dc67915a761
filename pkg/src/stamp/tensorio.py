"""Bit-exact readers/writers for the binary interchange files.

All formats are little-endian with a 4-byte ASCII magic:

  FLW1: u32 T,H,W; then T*H*W*2 f32 flow (dx,dy from frame 0), T*H*W f32
        visibility, T*H*W f32 confidence.
  TRK1: u32 T,N; then T*N packed records of f32 x, f32 y, u8 visible, 3 pad.
  EMB1: u32 N,D; then N*D f32 row-major; sample ids in a JSON sidecar array.

Scores are a flat JSON object of id -> number. Loaders reject anything the
paired writer would not have produced: wrong magic, byte-count mismatch
(including trailing bytes), or non-finite values.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FileFormatError

FLOW_MAGIC = b"FLW1"
TRACK_MAGIC = b"TRK1"
EMBED_MAGIC = b"EMB1"

_TRACK_RECORD = np.dtype(
    [("x", "<f4"), ("y", "<f4"), ("visible", "u1"), ("pad", "u1", (3,))]
)


@dataclass(frozen=True)
class FlowField:
    """Dense per-pixel displacement from frame 0, with visibility/confidence."""

    flow: np.ndarray  # (T, H, W, 2) float32
    vis: np.ndarray  # (T, H, W) float32
    conf: np.ndarray  # (T, H, W) float32

    def __post_init__(self):
        t, h, w, two = self.flow.shape
        if two != 2:
            raise FileFormatError(f"flow last axis must be 2, got {two}")
        if t == 0 or h == 0 or w == 0:
            raise FileFormatError("empty sequence")
        for name, arr, shape in (
            ("flow", self.flow, (t, h, w, 2)),
            ("vis", self.vis, (t, h, w)),
            ("conf", self.conf, (t, h, w)),
        ):
            if arr.shape != shape:
                raise FileFormatError(f"{name} shape {arr.shape} != {shape}")
            if arr.dtype != np.float32:
                raise FileFormatError(f"{name} must be float32, got {arr.dtype}")
            _require_finite(name, arr)

    @property
    def frames(self) -> int:
        return self.flow.shape[0]

    @property
    def height(self) -> int:
        return self.flow.shape[1]

    @property
    def width(self) -> int:
        return self.flow.shape[2]


@dataclass(frozen=True)
class TrackGrid:
    """Sparse tracked points: per frame per point (x, y) plus a visible flag."""

    xy: np.ndarray  # (T, N, 2) float32
    visible: np.ndarray  # (T, N) bool

    def __post_init__(self):
        t, n, two = self.xy.shape
        if two != 2:
            raise FileFormatError(f"track coordinates last axis must be 2, got {two}")
        if t == 0 or n == 0:
            raise FileFormatError("empty sequence")
        if self.visible.shape != (t, n):
            raise FileFormatError(f"visible shape {self.visible.shape} != {(t, n)}")
        _require_finite("tracks", self.xy)

    @property
    def frames(self) -> int:
        return self.xy.shape[0]

    @property
    def points(self) -> int:
        return self.xy.shape[1]


@dataclass(frozen=True)
class EmbeddingMatrix:
    """N x D float32 feature rows with stable string ids."""

    ids: tuple[str, ...]
    rows: np.ndarray  # (N, D) float32

    def __post_init__(self):
        n, d = self.rows.shape
        if n == 0 or d == 0:
            raise FileFormatError("empty embedding matrix")
        if len(self.ids) != n:
            raise FileFormatError(f"{len(self.ids)} ids for {n} rows")
        if len(set(self.ids)) != len(self.ids):
            dup = next(i for i in self.ids if self.ids.count(i) > 1)
            raise FileFormatError(f"duplicate embedding id {dup!r}")
        _require_finite("embeddings", self.rows)

    @property
    def count(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]


def _require_finite(name: str, arr: np.ndarray) -> None:
    bad = ~np.isfinite(arr)
    if bad.any():
        idx = np.unravel_index(int(np.argmax(bad)), arr.shape)
        raise FileFormatError(f"{name}: non-finite value at index {tuple(int(i) for i in idx)}")


def _read_header(data: bytes, magic: bytes, n_fields: int, path: Path) -> tuple[int, ...]:
    if data[:4] != magic:
        raise FileFormatError(
            f"{path}: bad magic {data[:4]!r}, expected {magic.decode('ascii')}"
        )
    head = 4 + 4 * n_fields
    if len(data) < head:
        raise FileFormatError(f"{path}: truncated header ({len(data)} bytes)")
    return struct.unpack(f"<{n_fields}I", data[4:head])


def _check_payload(data: bytes, head: int, expected: int, path: Path) -> None:
    actual = len(data) - head
    if actual != expected:
        raise FileFormatError(
            f"{path}: payload is {actual} bytes, expected {expected}"
        )


def load_flow(path: str | Path) -> FlowField:
    path = Path(path)
    data = path.read_bytes()
    t, h, w = _read_header(data, FLOW_MAGIC, 3, path)
    if t == 0 or h == 0 or w == 0:
        raise FileFormatError(f"{path}: empty sequence (T={t}, H={h}, W={w})")
    n = t * h * w
    _check_payload(data, 16, 4 * (n * 2 + n + n), path)
    raw = np.frombuffer(data, dtype="<f4", offset=16)
    flow = raw[: n * 2].reshape(t, h, w, 2)
    vis = raw[n * 2 : n * 3].reshape(t, h, w)
    conf = raw[n * 3 :].reshape(t, h, w)
    return FlowField(flow=flow, vis=vis, conf=conf)


def save_flow(field: FlowField, path: str | Path) -> None:
    t, h, w = field.frames, field.height, field.width
    with open(path, "wb") as f:
        f.write(FLOW_MAGIC)
        f.write(struct.pack("<3I", t, h, w))
        f.write(field.flow.astype("<f4", copy=False).tobytes())
        f.write(field.vis.astype("<f4", copy=False).tobytes())
        f.write(field.conf.astype("<f4", copy=False).tobytes())


def load_tracks(path: str | Path) -> TrackGrid:
    path = Path(path)
    data = path.read_bytes()
    t, n = _read_header(data, TRACK_MAGIC, 2, path)
    if t == 0 or n == 0:
        raise FileFormatError(f"{path}: empty sequence (T={t}, N={n})")
    _check_payload(data, 12, t * n * _TRACK_RECORD.itemsize, path)
    records = np.frombuffer(data, dtype=_TRACK_RECORD, offset=12).reshape(t, n)
    xy = np.stack([records["x"], records["y"]], axis=-1)
    return TrackGrid(xy=np.ascontiguousarray(xy), visible=records["visible"] != 0)


def save_tracks(grid: TrackGrid, path: str | Path) -> None:
    t, n = grid.frames, grid.points
    records = np.zeros((t, n), dtype=_TRACK_RECORD)
    records["x"] = grid.xy[..., 0]
    records["y"] = grid.xy[..., 1]
    records["visible"] = grid.visible.astype(np.uint8)
    with open(path, "wb") as f:
        f.write(TRACK_MAGIC)
        f.write(struct.pack("<2I", t, n))
        f.write(records.tobytes())


def load_embeddings(path: str | Path, sidecar_path: str | Path) -> EmbeddingMatrix:
    path = Path(path)
    data = path.read_bytes()
    n, d = _read_header(data, EMBED_MAGIC, 2, path)
    if n == 0 or d == 0:
        raise FileFormatError(f"{path}: empty embedding matrix (N={n}, D={d})")
    _check_payload(data, 12, 4 * n * d, path)
    rows = np.frombuffer(data, dtype="<f4", offset=12).reshape(n, d)
    try:
        ids = json.loads(Path(sidecar_path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{sidecar_path}: JSON parse error: {exc}") from exc
    if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
        raise FileFormatError(f"{sidecar_path}: sidecar must be a JSON array of strings")
    return EmbeddingMatrix(ids=tuple(ids), rows=rows)


def save_embeddings(emb: EmbeddingMatrix, path: str | Path, sidecar_path: str | Path) -> None:
    n, d = emb.rows.shape
    with open(path, "wb") as f:
        f.write(EMBED_MAGIC)
        f.write(struct.pack("<2I", n, d))
        f.write(emb.rows.astype("<f4", copy=False).tobytes())
    Path(sidecar_path).write_text(json.dumps(list(emb.ids)) + "\n", encoding="utf-8")


def load_scores(path: str | Path) -> dict[str, float]:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: JSON parse error: {exc}") from exc
    if not isinstance(raw, dict):
        raise FileFormatError(f"{path}: scores must be a flat JSON object")
    scores: dict[str, float] = {}
    for key, value in raw.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise FileFormatError(f"{path}: score for {key!r} is not a number")
        value = float(value)
        if not np.isfinite(value):
            raise FileFormatError(f"{path}: score for {key!r} is not finite")
        scores[key] = value
    return scores


def save_scores(scores: dict[str, float], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(scores, sort_keys=True, separators=(",", ":")) + "\n", encoding="utf-8"
    )


def default_sidecar(path: str | Path) -> Path:
    """Conventional sidecar name: foo.emb1 -> foo.ids.json."""
    path = Path(path)
    return path.with_suffix(".ids.json")


class _Report:
    def __init__(self, path: Path, fmt: str):
        self.path = path
        self.fmt = fmt
        self.checks: list[dict] = []

    def record(self, name: str, fn) -> bool:
        """Run one check; failures become report entries, not exceptions."""
        try:
            fn()
        except (FileFormatError, OSError) as exc:
            self.checks.append({"name": name, "ok": False, "detail": str(exc)})
            return False
        self.checks.append({"name": name, "ok": True, "detail": ""})
        return True

    def fail(self, name: str, detail: str) -> None:
        self.checks.append({"name": name, "ok": False, "detail": detail})

    def done(self) -> dict:
        return {
            "ok": all(c["ok"] for c in self.checks),
            "path": str(self.path),
            "format": self.fmt,
            "checks": self.checks,
        }


def _validate_blocks(rep: _Report, data: bytes, head: int, blocks: list[tuple[str, tuple]]):
    """Shared staged checks: payload byte count, then per-block finiteness."""
    expected = sum(4 * int(np.prod(shape)) for _, shape in blocks)
    if not rep.record(
        "payload_size", lambda: _check_payload(data, head, expected, rep.path)
    ):
        return
    offset = head
    for name, shape in blocks:
        count = int(np.prod(shape))
        arr = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
        rep.record(f"{name}_finite", lambda a=arr, n=name, s=shape: _require_finite(n, a.reshape(s)))
        offset += 4 * count


def validate_file(path: str | Path, sidecar_path: str | Path | None = None) -> dict:
    """Machine-readable pass/fail report for one interchange file.

    Every violated check becomes a report entry rather than an exception; the
    format is sniffed from the magic (JSON files are treated as score tables).
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        rep = _Report(path, "unknown")
        rep.fail("readable", str(exc))
        return rep.done()
    head = data[:4]

    if head == FLOW_MAGIC:
        rep = _Report(path, "FLW1")
        if not rep.record("header", lambda: _read_header(data, FLOW_MAGIC, 3, path)):
            return rep.done()
        t, h, w = _read_header(data, FLOW_MAGIC, 3, path)
        if t == 0 or h == 0 or w == 0:
            rep.fail("nonempty", f"empty sequence (T={t}, H={h}, W={w})")
            return rep.done()
        rep.record("nonempty", lambda: None)
        _validate_blocks(
            rep,
            data,
            16,
            [("flow", (t, h, w, 2)), ("vis", (t, h, w)), ("conf", (t, h, w))],
        )
        return rep.done()

    if head == TRACK_MAGIC:
        rep = _Report(path, "TRK1")
        if not rep.record("header", lambda: _read_header(data, TRACK_MAGIC, 2, path)):
            return rep.done()
        t, n = _read_header(data, TRACK_MAGIC, 2, path)
        if t == 0 or n == 0:
            rep.fail("nonempty", f"empty sequence (T={t}, N={n})")
            return rep.done()
        rep.record("nonempty", lambda: None)
        if not rep.record(
            "payload_size",
            lambda: _check_payload(data, 12, t * n * _TRACK_RECORD.itemsize, path),
        ):
            return rep.done()
        records = np.frombuffer(data, dtype=_TRACK_RECORD, offset=12).reshape(t, n)
        xy = np.stack([records["x"], records["y"]], axis=-1)
        rep.record("coords_finite", lambda: _require_finite("tracks", xy))
        return rep.done()

    if head == EMBED_MAGIC:
        rep = _Report(path, "EMB1")
        if not rep.record("header", lambda: _read_header(data, EMBED_MAGIC, 2, path)):
            return rep.done()
        n, d = _read_header(data, EMBED_MAGIC, 2, path)
        if n == 0 or d == 0:
            rep.fail("nonempty", f"empty embedding matrix (N={n}, D={d})")
            return rep.done()
        rep.record("nonempty", lambda: None)
        if rep.record("payload_size", lambda: _check_payload(data, 12, 4 * n * d, path)):
            rows = np.frombuffer(data, dtype="<f4", offset=12).reshape(n, d)
            rep.record("rows_finite", lambda: _require_finite("embeddings", rows))
        sidecar = Path(sidecar_path) if sidecar_path else default_sidecar(path)
        rep.record("sidecar", lambda: _check_sidecar(sidecar, n))
        return rep.done()

    if head[:1] in (b"{", b"["):
        rep = _Report(path, "scores")
        rep.record("loads", lambda: load_scores(path))
        return rep.done()

    rep = _Report(path, "unknown")
    rep.fail("magic", f"unrecognized magic {head!r}; expected FLW1, TRK1, EMB1, or JSON")
    return rep.done()


def _check_sidecar(sidecar: Path, n: int) -> None:
    try:
        ids = json.loads(sidecar.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{sidecar}: JSON parse error: {exc}") from exc
    if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
        raise FileFormatError(f"{sidecar}: sidecar must be a JSON array of strings")
    if len(ids) != n:
        raise FileFormatError(f"{sidecar}: {len(ids)} ids for {n} rows")
    if len(set(ids)) != len(ids):
        raise FileFormatError(f"{sidecar}: duplicate ids")
