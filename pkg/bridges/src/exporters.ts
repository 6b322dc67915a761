/** One exporter per model kind: run a backend over PNG frames, emit one
 * validated interchange artifact. Outputs always land via temp-file rename.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { writeEmb1, writeFlw1, writeScoresJson, writeTrk1 } from "./binary.js";
import { BridgeError, withContext } from "./errors.js";
import { writeClipMasks, type Mask } from "./formats.js";
import { loadFrame, type Frame } from "./png.js";
import {
  BlockMatchTracker,
  GridPointTracker,
  LuminanceScorer,
  PatchStatsEmbedder,
  TemplateSegmenter,
} from "./backends/classical.js";
import type { Box, ModelKind } from "./backends/types.js";

export const DEFAULT_BACKEND = "classical";

function requireClassical(kind: ModelKind, backend: string | undefined): void {
  const name = backend ?? DEFAULT_BACKEND;
  if (name !== DEFAULT_BACKEND) {
    throw new BridgeError(
      `no ${kind} backend named ${JSON.stringify(name)} is available ` +
        `(bundled backends: ${JSON.stringify(DEFAULT_BACKEND)})`,
    );
  }
}

/** Sorted PNG files of a directory, loaded with per-frame error context. */
export function loadFrames(framesDir: string): Frame[] {
  let names: string[];
  try {
    names = fs.readdirSync(framesDir).filter((n) => n.toLowerCase().endsWith(".png"));
  } catch (err) {
    withContext(framesDir, err);
  }
  names.sort();
  if (names.length === 0) {
    throw new BridgeError(`${framesDir}: no .png frames found`);
  }
  return names.map((name, t) => {
    try {
      const frame = loadFrame(path.join(framesDir, name));
      return { ...frame, name };
    } catch (err) {
      withContext(`frame ${t} (${name})`, err);
    }
  });
}

export interface ClipMasksJob {
  framesDir: string;
  /** Clip directory to create; its basename becomes the clip id. */
  out: string;
  sourceImageId: number;
  /** Annotation id of the prompted object in the source dataset. */
  annotationId: number;
  /** Frame-0 prompt box. */
  box: Box;
  backend?: string;
  searchRadius?: number;
}

export function exportClipMasks(job: ClipMasksJob): { clipId: string; frames: number } {
  requireClassical("segmenter", job.backend);
  const frames = loadFrames(job.framesDir);
  const segmenter = new TemplateSegmenter(job.searchRadius ?? 8);
  const masks: Mask[] = segmenter.segment(frames, job.box);
  const clipId = path.basename(job.out);
  writeClipMasks(job.out, {
    clipId,
    sourceImageId: job.sourceImageId,
    frames: frames.map((f) => f.name),
    objects: new Map([[job.annotationId, masks]]),
  });
  return { clipId, frames: frames.length };
}

export interface FlowJob {
  framesDir: string;
  out: string;
  backend?: string;
  blockSize?: number;
  searchRadius?: number;
}

export function exportFlow(job: FlowJob): { frames: number; height: number; width: number } {
  requireClassical("dense-tracker", job.backend);
  const frames = loadFrames(job.framesDir);
  const tracker = new BlockMatchTracker(job.blockSize ?? 8, job.searchRadius ?? 8);
  const { flow, vis, conf } = tracker.track(frames);
  const d = {
    frames: frames.length,
    height: frames[0].height,
    width: frames[0].width,
    flow,
    vis,
    conf,
  };
  writeFlw1(job.out, d);
  return { frames: d.frames, height: d.height, width: d.width };
}

export interface TracksJob {
  framesDir: string;
  out: string;
  backend?: string;
  rows?: number;
  cols?: number;
  searchRadius?: number;
}

export function exportTracks(job: TracksJob): { frames: number; points: number } {
  requireClassical("sparse-tracker", job.backend);
  const frames = loadFrames(job.framesDir);
  const rows = job.rows ?? 16; // default seeding: a 16 x 16 grid of points
  const cols = job.cols ?? 16;
  const tracker = new GridPointTracker(3, job.searchRadius ?? 8);
  const { xs, ys, visible } = tracker.track(frames, rows, cols);
  writeTrk1(job.out, { frames: frames.length, points: rows * cols, xs, ys, visible });
  return { frames: frames.length, points: rows * cols };
}

export interface EmbeddingsJob {
  imagesDir: string;
  out: string;
  backend?: string;
  dim?: number;
}

export function exportEmbeddings(job: EmbeddingsJob): { rows: number; dim: number } {
  requireClassical("embedder", job.backend);
  const frames = loadFrames(job.imagesDir);
  const dim = job.dim ?? 64;
  const embedder = new PatchStatsEmbedder();
  const rows = new Float32Array(frames.length * dim);
  const ids = frames.map((frame, i) => {
    rows.set(embedder.embed(frame, dim), i * dim);
    return path.parse(frame.name).name;
  });
  writeEmb1(job.out, { ids, rows, dim });
  return { rows: frames.length, dim };
}

export interface ScoresJob {
  imagesDir: string;
  out: string;
  backend?: string;
}

export function exportScores(job: ScoresJob): { scored: number } {
  requireClassical("scorer", job.backend);
  const frames = loadFrames(job.imagesDir);
  const scorer = new LuminanceScorer();
  const scores: Record<string, number> = {};
  for (const frame of frames) {
    scores[path.parse(frame.name).name] = scorer.score(frame);
  }
  writeScoresJson(job.out, scores);
  return { scored: frames.length };
}
