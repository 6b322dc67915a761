/** Backend interfaces: each model kind maps to one small, synchronous API.
 *
 * Real neural backends (video segmenters, point trackers, feature extractors,
 * image scorers) run out-of-process and are registered by name; this package
 * ships deterministic classical implementations, registered as "classical",
 * so the exporters and formats can be exercised without any model weights.
 */

import type { Frame } from "../png.js";
import type { Mask } from "../formats.js";

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface SegmenterBackend {
  readonly name: string;
  /** Track the object prompted by a frame-0 box through every frame. */
  segment(frames: Frame[], promptBox: Box): Mask[];
}

export interface DenseTrackerBackend {
  readonly name: string;
  /**
   * Per-frame displacement of every frame-0 pixel, with visibility and
   * confidence, all row-major (frames x height x width).
   */
  track(frames: Frame[]): {
    flow: Float32Array; // (T, H, W, 2) as (dx, dy)
    vis: Float32Array; // (T, H, W)
    conf: Float32Array; // (T, H, W)
  };
}

export interface SparseTrackerBackend {
  readonly name: string;
  /** Track a rows x cols grid of frame-0 points through every frame. */
  track(
    frames: Frame[],
    rows: number,
    cols: number,
  ): {
    xs: Float32Array; // (T, N)
    ys: Float32Array; // (T, N)
    visible: Uint8Array; // (T, N)
  };
}

export interface EmbedderBackend {
  readonly name: string;
  embed(frame: Frame, dim: number): Float32Array;
}

export interface ScorerBackend {
  readonly name: string;
  /** Quality score in [0, 1]. */
  score(frame: Frame): number;
}

export type ModelKind = "segmenter" | "dense-tracker" | "sparse-tracker" | "embedder" | "scorer";
