"""Per-frame validity masks separating tracked content from disoccluded regions.

A validity mask is a boolean H x W grid: True marks pixels traceable to the
original image, False marks newly revealed (unlabeled) content. Two
constructions are provided: a polygon mask from sparse tracked points (convex
hull, or the axis-aligned extreme-point rectangle variant) and a dense mask
from per-pixel trajectories (impulse image of visible landing points,
smoothed by a truncated Gaussian and thresholded).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IntegrityError
from .model import BBox
from .tensorio import FlowField

ValidityMask = np.ndarray  # boolean (H, W)


@dataclass(frozen=True)
class DenseMaskParams:
    """Thresholds and kernel width for the dense mask.

    tau_w is interpretable as an effective count of nearby tracked points
    because the kernel is unnormalized with peak weight 1.
    """

    tau_vis: float = 0.9
    tau_conf: float = 0.1
    sigma: float = 8.0
    tau_w: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.tau_vis <= 1.0 or not 0.0 < self.tau_conf <= 1.0:
            raise IntegrityError("tau_vis and tau_conf must be in (0, 1]")
        if self.sigma <= 0 or self.tau_w <= 0:
            raise IntegrityError("sigma and tau_w must be positive")


def grid_points(width: int, height: int, gx: int, gy: int) -> list[tuple[float, float]]:
    """Cell-center seed points, row-major: x_i=(i+0.5)*W/gx, y_j=(j+0.5)*H/gy."""
    if gx < 1 or gy < 1:
        raise IntegrityError(f"grid dimensions must be >= 1, got {gx}x{gy}")
    return [
        ((i + 0.5) * width / gx, (j + 0.5) * height / gy)
        for j in range(gy)
        for i in range(gx)
    ]


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Minimal counterclockwise hull (monotone chain); collinear points dropped.

    Degenerate inputs degrade gracefully: one distinct point gives a 1-vertex
    hull, collinear points give the 2-endpoint segment. Counterclockwise is in
    the mathematical (y-up) sense.
    """
    if not points:
        raise IntegrityError("convex_hull: empty input")
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) == 1:
        return pts
    if len(pts) == 2:
        return pts

    def half(seq):
        chain: list[tuple[float, float]] = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]  # collinear inputs collapse to both endpoints


def extreme_rectangle(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Axis-aligned rectangle spanned by the extreme x/y coordinates (CCW)."""
    if not points:
        raise IntegrityError("extreme_rectangle: empty input")
    xs = [float(p[0]) for p in points]
    ys = [float(p[1]) for p in points]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    if x0 == x1 or y0 == y1:
        return convex_hull(points)  # degenerate: fall back to point/segment
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def polygon_validity_mask(
    hull: list[tuple[float, float]], width: int, height: int
) -> ValidityMask:
    """Pixel (c, r) is valid iff its center (c+0.5, r+0.5) is inside or on the hull.

    Degenerate hulls (fewer than 3 vertices, or zero area) mark everything
    invalid. Orientation is normalized, so clockwise input is accepted.
    """
    mask = np.zeros((height, width), dtype=bool)
    if len(hull) < 3:
        return mask
    verts = [(float(x), float(y)) for x, y in hull]
    area2 = sum(
        verts[i][0] * verts[(i + 1) % len(verts)][1]
        - verts[(i + 1) % len(verts)][0] * verts[i][1]
        for i in range(len(verts))
    )
    if area2 == 0:
        return mask
    if area2 < 0:
        verts = verts[::-1]

    cx = np.arange(width, dtype=np.float64) + 0.5
    cy = np.arange(height, dtype=np.float64) + 0.5
    px, py = np.meshgrid(cx, cy)
    inside = np.ones((height, width), dtype=bool)
    for i, (x0, y0) in enumerate(verts):
        x1, y1 = verts[(i + 1) % len(verts)]
        # left-or-on test against each CCW edge
        inside &= (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0) >= 0
    return inside


def _gauss_1d(sigma: float) -> np.ndarray:
    radius = math.ceil(3 * sigma)
    d = np.arange(-radius, radius + 1, dtype=np.float64)
    return np.exp(-(d * d) / (2.0 * sigma * sigma))


def _sep_conv(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Separable 2-D convolution with zero padding.

    Accumulates shifted copies in a fixed offset order per axis, so the result
    is independent of any tiling or thread count.
    """
    radius = len(kernel) // 2
    h, w = img.shape
    out = np.zeros_like(img)
    for off in range(-radius, radius + 1):
        weight = kernel[off + radius]
        lo, hi = max(0, off), min(w, w + off)
        if hi <= lo:  # shift exceeds the image extent
            continue
        out[:, lo:hi] += weight * img[:, lo - off : hi - off]
    final = np.zeros_like(img)
    for off in range(-radius, radius + 1):
        weight = kernel[off + radius]
        lo, hi = max(0, off), min(h, h + off)
        if hi <= lo:
            continue
        final[lo:hi, :] += weight * out[lo - off : hi - off, :]
    return final


def dense_density_map(flow: FlowField, t: int, p: DenseMaskParams) -> np.ndarray:
    """Gaussian-smoothed density of visible tracked points landing in frame t.

    Source pixels passing both thresholds (vis >= tau_vis and conf >= tau_conf)
    are mapped through the trajectory field, rounded to the nearest pixel (ties
    to even) and clamped to bounds; each landing pixel contributes a saturating
    impulse, then the impulse image is convolved with an unnormalized Gaussian
    (peak 1) truncated at radius ceil(3*sigma).
    """
    if not 0 <= t < flow.frames:
        raise IntegrityError(f"frame {t} out of range [0, {flow.frames})")
    h, w = flow.height, flow.width
    visible = (flow.vis[t] >= p.tau_vis) & (flow.conf[t] >= p.tau_conf)
    impulse = np.zeros((h, w), dtype=np.float64)
    if visible.any():
        gy, gx = np.mgrid[0:h, 0:w]
        land_x = np.rint(gx[visible] + flow.flow[t, :, :, 0][visible].astype(np.float64))
        land_y = np.rint(gy[visible] + flow.flow[t, :, :, 1][visible].astype(np.float64))
        land_x = np.clip(land_x, 0, w - 1).astype(np.intp)
        land_y = np.clip(land_y, 0, h - 1).astype(np.intp)
        impulse[land_y, land_x] = 1.0
    return _sep_conv(impulse, _gauss_1d(p.sigma))


def dense_validity_mask(flow: FlowField, t: int, p: DenseMaskParams) -> ValidityMask:
    """Threshold the density map: valid where at least tau_w worth of tracked mass."""
    return dense_density_map(flow, t, p) >= p.tau_w


def apply_validity_mask(image: np.ndarray, mask: ValidityMask) -> np.ndarray:
    """Zero out invalid pixels of an (H, W, 3) uint8 image; valid pixels untouched."""
    image = np.asarray(image)
    if image.shape[:2] != mask.shape:
        raise IntegrityError(
            f"image {image.shape[:2]} and mask {mask.shape} dimensions differ"
        )
    out = image.copy()
    out[~mask] = 0
    return out


def _pixel_range(lo: float, size: float, limit: int) -> tuple[int, int]:
    # pixels whose centers fall in [lo, lo+size): ceil(lo-0.5) .. ceil(lo+size-0.5)-1
    first = max(0, math.ceil(lo - 0.5))
    last = min(limit, math.ceil(lo + size - 0.5)) - 1
    return first, last


def invalid_fraction(bbox: BBox, mask: ValidityMask) -> float:
    """Fraction of the box's pixels (by center) that the mask marks invalid."""
    h, w = mask.shape
    if bbox.x + bbox.w > w or bbox.y + bbox.h > h:
        raise IntegrityError(f"box {bbox} extends beyond mask {w}x{h}")
    c0, c1 = _pixel_range(bbox.x, bbox.w, w)
    r0, r1 = _pixel_range(bbox.y, bbox.h, h)
    if c1 < c0 or r1 < r0:
        raise IntegrityError(f"box {bbox} rasterizes to zero pixels")
    window = mask[r0 : r1 + 1, c0 : c1 + 1]
    return float((~window).sum()) / window.size


def mask_valid_fraction(mask: ValidityMask) -> float:
    return float(mask.sum()) / mask.size
