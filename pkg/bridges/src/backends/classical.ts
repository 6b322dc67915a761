/** Deterministic classical backends: template matching, block matching,
 * patch statistics. No randomness, no weights — reference implementations
 * for tests and offline pipeline runs.
 */

import { BridgeError } from "../errors.js";
import type { Frame } from "../png.js";
import type { Mask } from "../formats.js";
import type {
  Box,
  DenseTrackerBackend,
  EmbedderBackend,
  ScorerBackend,
  SegmenterBackend,
  SparseTrackerBackend,
} from "./types.js";

function pixel(frame: Frame, x: number, y: number): number {
  // clamp-to-edge sampling keeps matching defined at the borders
  const cx = Math.min(Math.max(x, 0), frame.width - 1);
  const cy = Math.min(Math.max(y, 0), frame.height - 1);
  return frame.gray[cy * frame.width + cx];
}

/** Mean absolute difference of a frame-0 rectangle against a displaced one. */
function rectMad(
  reference: Frame,
  target: Frame,
  rect: Box,
  dx: number,
  dy: number,
): number {
  let sum = 0;
  for (let y = 0; y < rect.h; y++) {
    for (let x = 0; x < rect.w; x++) {
      const a = pixel(reference, rect.x + x, rect.y + y);
      const b = pixel(target, rect.x + x + dx, rect.y + y + dy);
      sum += Math.abs(a - b);
    }
  }
  return sum / (rect.w * rect.h);
}

/** Best integer displacement within the search radius around a center guess;
 * ties prefer the first candidate in (dy, dx) scan order, so results are
 * deterministic and order-independent. */
function bestShift(
  reference: Frame,
  target: Frame,
  rect: Box,
  radius: number,
  centerDx = 0,
  centerDy = 0,
): { dx: number; dy: number; mad: number } {
  let best = { dx: centerDx, dy: centerDy, mad: Infinity };
  for (let dy = centerDy - radius; dy <= centerDy + radius; dy++) {
    for (let dx = centerDx - radius; dx <= centerDx + radius; dx++) {
      const mad = rectMad(reference, target, rect, dx, dy);
      if (mad < best.mad) {
        best = { dx, dy, mad };
      }
    }
  }
  return best;
}

function checkFrames(frames: Frame[]): void {
  if (frames.length < 1) throw new BridgeError("no frames given");
  const { width, height } = frames[0];
  frames.forEach((f, t) => {
    if (f.width !== width || f.height !== height) {
      throw new BridgeError(
        `frame ${t} (${f.name}) is ${f.width}x${f.height}, expected ${width}x${height}`,
      );
    }
  });
}

function rectMask(width: number, height: number, rect: Box): Mask {
  const data = new Uint8Array(width * height);
  const x0 = Math.max(0, Math.round(rect.x));
  const y0 = Math.max(0, Math.round(rect.y));
  const x1 = Math.min(width, Math.round(rect.x + rect.w));
  const y1 = Math.min(height, Math.round(rect.y + rect.h));
  for (let y = y0; y < y1; y++) {
    for (let x = x0; x < x1; x++) data[y * width + x] = 1;
  }
  return { width, height, data };
}

/** Tracks the prompted box frame-to-frame by exhaustive template matching
 * and emits the matched rectangle as the object mask. */
export class TemplateSegmenter implements SegmenterBackend {
  readonly name = "classical";

  constructor(private readonly searchRadius = 8) {}

  segment(frames: Frame[], promptBox: Box): Mask[] {
    checkFrames(frames);
    const { width, height } = frames[0];
    if (promptBox.w < 1 || promptBox.h < 1) {
      throw new BridgeError(`prompt box ${JSON.stringify(promptBox)} has no area`);
    }
    const masks: Mask[] = [rectMask(width, height, promptBox)];
    let offX = 0; // accumulated displacement relative to the prompt box
    let offY = 0;
    for (let t = 1; t < frames.length; t++) {
      // the template stays anchored to frame 0; the search window walks with
      // the last known position so slow objects can travel arbitrarily far
      const best = bestShift(frames[0], frames[t], promptBox, this.searchRadius, offX, offY);
      offX = best.dx;
      offY = best.dy;
      masks.push(
        rectMask(width, height, { ...promptBox, x: promptBox.x + offX, y: promptBox.y + offY }),
      );
    }
    return masks;
  }
}

/** Block-matching displacement of every frame-0 pixel into each frame. */
export class BlockMatchTracker implements DenseTrackerBackend {
  readonly name = "classical";

  constructor(
    private readonly blockSize = 8,
    private readonly searchRadius = 8,
  ) {}

  track(frames: Frame[]): { flow: Float32Array; vis: Float32Array; conf: Float32Array } {
    checkFrames(frames);
    const t0 = frames[0];
    const { width, height } = t0;
    const cells = frames.length * height * width;
    const flow = new Float32Array(cells * 2);
    const vis = new Float32Array(cells);
    const conf = new Float32Array(cells);
    const b = this.blockSize;

    for (let t = 0; t < frames.length; t++) {
      const base = t * height * width;
      if (t === 0) {
        vis.fill(1, 0, height * width);
        conf.fill(1, 0, height * width);
        continue; // identity frame: zero flow
      }
      for (let by = 0; by < height; by += b) {
        for (let bx = 0; bx < width; bx += b) {
          const rect: Box = {
            x: bx,
            y: by,
            w: Math.min(b, width - bx),
            h: Math.min(b, height - by),
          };
          const best = bestShift(t0, frames[t], rect, this.searchRadius);
          const quality = Math.max(0, 1 - best.mad / 255);
          for (let y = by; y < by + rect.h; y++) {
            for (let x = bx; x < bx + rect.w; x++) {
              const cell = base + y * width + x;
              flow[cell * 2] = best.dx;
              flow[cell * 2 + 1] = best.dy;
              const lx = x + best.dx;
              const ly = y + best.dy;
              const inside = lx >= 0 && lx < width && ly >= 0 && ly < height;
              vis[cell] = inside ? 1 : 0;
              conf[cell] = quality;
            }
          }
        }
      }
    }
    return { flow, vis, conf };
  }
}

/** Tracks a uniform grid of frame-0 points by patch matching. */
export class GridPointTracker implements SparseTrackerBackend {
  readonly name = "classical";

  constructor(
    private readonly patchRadius = 3,
    private readonly searchRadius = 8,
  ) {}

  track(
    frames: Frame[],
    rows: number,
    cols: number,
  ): { xs: Float32Array; ys: Float32Array; visible: Uint8Array } {
    checkFrames(frames);
    if (rows < 1 || cols < 1) {
      throw new BridgeError(`grid must be at least 1x1, got ${rows}x${cols}`);
    }
    const { width, height } = frames[0];
    const n = rows * cols;
    const xs = new Float32Array(frames.length * n);
    const ys = new Float32Array(frames.length * n);
    const visible = new Uint8Array(frames.length * n);
    const p = this.patchRadius;

    for (let r = 0; r < rows; r++) {
      for (let c = 0; c < cols; c++) {
        const i = r * cols + c;
        // cell centers, matching the primary's seed-point convention
        const px = Math.floor(((2 * c + 1) * width) / (2 * cols));
        const py = Math.floor(((2 * r + 1) * height) / (2 * rows));
        xs[i] = px;
        ys[i] = py;
        visible[i] = 1;
        const rect: Box = { x: px - p, y: py - p, w: 2 * p + 1, h: 2 * p + 1 };
        for (let t = 1; t < frames.length; t++) {
          const best = bestShift(frames[0], frames[t], rect, this.searchRadius);
          const nx = px + best.dx;
          const ny = py + best.dy;
          const at = t * n + i;
          xs[at] = nx;
          ys[at] = ny;
          visible[at] = nx >= 0 && nx < width && ny >= 0 && ny < height ? 1 : 0;
        }
      }
    }
    return { xs, ys, visible };
  }
}

/** Grid of block-mean luminances, scaled to [0, 1]. */
export class PatchStatsEmbedder implements EmbedderBackend {
  readonly name = "classical";

  embed(frame: Frame, dim: number): Float32Array {
    if (dim < 1) throw new BridgeError(`embedding dim must be positive, got ${dim}`);
    const grid = Math.ceil(Math.sqrt(dim));
    const out = new Float32Array(dim);
    for (let i = 0; i < dim; i++) {
      const gy = Math.floor(i / grid);
      const gx = i % grid;
      const x0 = Math.floor((gx * frame.width) / grid);
      const x1 = Math.max(x0 + 1, Math.floor(((gx + 1) * frame.width) / grid));
      const y0 = Math.floor((gy * frame.height) / grid);
      const y1 = Math.max(y0 + 1, Math.floor(((gy + 1) * frame.height) / grid));
      let sum = 0;
      for (let y = y0; y < y1; y++) {
        for (let x = x0; x < x1; x++) sum += pixel(frame, x, y);
      }
      out[i] = sum / ((x1 - x0) * (y1 - y0)) / 255;
    }
    return out;
  }
}

/** Mean luminance as a [0, 1] quality score. */
export class LuminanceScorer implements ScorerBackend {
  readonly name = "classical";

  score(frame: Frame): number {
    let sum = 0;
    for (let i = 0; i < frame.gray.length; i++) sum += frame.gray[i];
    return sum / frame.gray.length / 255;
  }
}
