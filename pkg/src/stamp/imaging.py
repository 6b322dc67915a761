"""8-bit RGB PNG helpers for frame images."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import FileFormatError


def load_png(path: str | Path) -> np.ndarray:
    """Read a PNG as an (H, W, 3) uint8 array."""
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def save_png(pixels: np.ndarray, path: str | Path) -> None:
    """Write an (H, W, 3) uint8 array as a PNG."""
    pixels = np.asarray(pixels)
    if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
        raise FileFormatError(
            f"expected (H, W, 3) uint8 pixels, got {pixels.shape} {pixels.dtype}"
        )
    Image.fromarray(pixels, mode="RGB").save(path, format="PNG")
