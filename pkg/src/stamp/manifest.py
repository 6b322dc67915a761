"""Per-epoch training manifests enforcing the 1:1 real/synthetic ratio.

Each epoch lists every real image once plus an equal number of synthetic
images, drawn from a shuffled queue that cycles through the whole synthetic
pool before any repeat. A trainer consuming manifests epoch by epoch thus
sees balanced batches in expectation without a custom sampler.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FileFormatError, IntegrityError
from .model import Dataset
from .rng import SplitMix64, derive_seed

REAL = "real"
SYNTHETIC = "synthetic"

# Stream tags live in the low 32 bits, counters in the high 32, so epoch
# shuffles and queue refills can never share a derived seed.
_EPOCH_SALT = 0x5EED_EC0C
_QUEUE_SALT = 0x5EED_9EEE


def _epoch_seed(seed: int, e: int) -> int:
    return derive_seed(seed, _EPOCH_SALT ^ (e << 32))


def _queue_seed(seed: int, refill: int) -> int:
    return derive_seed(seed, _QUEUE_SALT ^ (refill << 32))


@dataclass(frozen=True)
class Manifest:
    """epochs[e] is the ordered (image_id, provenance) list for epoch e."""

    epochs: tuple[tuple[tuple[int, str], ...], ...]
    synthetic_pool_empty: bool = False
    extras: dict = field(default_factory=dict)


def build_manifest(
    ds: Dataset, epochs: int, seed: int, balanced: bool = True
) -> Manifest:
    """Build a deterministic manifest from the dataset's real/synthetic split.

    Balanced mode puts all R real ids plus R synthetic ids in each epoch; the
    synthetic ids come from a shuffled queue refilled with a fresh permutation
    whenever it empties, so each synthetic image is used exactly once per
    ceil(S/R)-epoch cycle. With balanced=False ("w/o 1:1" ablation baseline)
    each epoch is simply the shuffled concatenated pool. Ids are sorted before
    any draw, so the result depends only on (id sets, epochs, seed).
    """
    if epochs < 1:
        raise IntegrityError(f"epochs must be >= 1, got {epochs}")
    real = sorted(img.id for img in ds.images if img.provenance is None)
    synthetic = sorted(img.id for img in ds.images if img.provenance is not None)
    if not real:
        raise IntegrityError("dataset has no real images")

    built: list[tuple[tuple[int, str], ...]] = []
    if not balanced:
        pool = [(i, REAL) for i in real] + [(i, SYNTHETIC) for i in synthetic]
        for e in range(epochs):
            entries = list(pool)
            SplitMix64(_epoch_seed(seed, e)).shuffle(entries)
            built.append(tuple(entries))
        return Manifest(tuple(built), synthetic_pool_empty=not synthetic)

    queue: list[int] = []
    refills = 0
    for e in range(epochs):
        entries = [(i, REAL) for i in real]
        for _ in range(len(real) if synthetic else 0):
            if not queue:
                queue = list(synthetic)
                SplitMix64(_queue_seed(seed, refills)).shuffle(queue)
                refills += 1
            entries.append((queue.pop(), SYNTHETIC))
        SplitMix64(_epoch_seed(seed, e)).shuffle(entries)
        built.append(tuple(entries))
    return Manifest(tuple(built), synthetic_pool_empty=not synthetic)


def emit_manifest(m: Manifest, path: str | Path) -> None:
    """Write newline-delimited JSON: an {"epoch": e} marker, then its entries."""
    with open(path, "w", encoding="utf-8") as fh:
        for e, entries in enumerate(m.epochs):
            fh.write(json.dumps({"epoch": e}, separators=(",", ":")) + "\n")
            for image_id, provenance in entries:
                line = {"image_id": image_id, "provenance": provenance}
                fh.write(json.dumps(line, sort_keys=True, separators=(",", ":")) + "\n")


def parse_manifest(path: str | Path) -> Manifest:
    """Inverse of emit_manifest (the synthetic_pool_empty flag is recomputed)."""
    path = Path(path)
    epochs: list[tuple[tuple[int, str], ...]] = []
    current: list[tuple[int, str]] | None = None
    any_synthetic = False
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise FileFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
                if "epoch" in obj:
                    if current is not None:
                        epochs.append(tuple(current))
                    if obj["epoch"] != len(epochs):
                        raise FileFormatError(
                            f"{path}:{lineno}: epoch marker {obj['epoch']} out of order "
                            f"(expected {len(epochs)})"
                        )
                    current = []
                elif current is None:
                    raise FileFormatError(f"{path}:{lineno}: entry before first epoch marker")
                else:
                    try:
                        provenance = obj["provenance"]
                        if provenance not in (REAL, SYNTHETIC):
                            raise ValueError(f"unknown provenance {provenance!r}")
                        current.append((int(obj["image_id"]), provenance))
                        any_synthetic |= provenance == SYNTHETIC
                    except (KeyError, TypeError, ValueError) as exc:
                        raise FileFormatError(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    if current is not None:
        epochs.append(tuple(current))
    return Manifest(tuple(epochs), synthetic_pool_empty=not any_synthetic)


def cycle_length(real_count: int, synthetic_count: int) -> int:
    """Epochs needed for the queue to consume every synthetic image once."""
    if synthetic_count == 0:
        return 1
    return math.ceil(synthetic_count / real_count)
