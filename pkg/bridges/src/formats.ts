/** JSON-side interchange pieces: RLE masks and clip-mask directories. */

import * as fs from "node:fs";
import * as path from "node:path";
import { atomicWriteFileSync } from "./binary.js";
import { BridgeError } from "./errors.js";

export interface Mask {
  height: number;
  width: number;
  /** Row-major 0/1 pixels. */
  data: Uint8Array;
}

/** Column-major run-length counts, zeros-first (first count may be 0). */
export function rleCounts(mask: Mask): number[] {
  const { height, width, data } = mask;
  if (data.length !== height * width) {
    throw new BridgeError(`mask has ${data.length} pixels, expected ${height * width}`);
  }
  const counts: number[] = [];
  let current = 0; // runs always start with a zero run
  let run = 0;
  for (let x = 0; x < width; x++) {
    for (let y = 0; y < height; y++) {
      const value = data[y * width + x] ? 1 : 0;
      if (value === current) {
        run++;
      } else {
        counts.push(run);
        current = value;
        run = 1;
      }
    }
  }
  counts.push(run);
  return counts;
}

export function maskJson(mask: Mask): string {
  // key order matches a sorted-keys writer: counts before size
  return `{"counts":${JSON.stringify(rleCounts(mask))},"size":[${mask.height},${mask.width}]}\n`;
}

export interface ClipMasks {
  clipId: string;
  sourceImageId: number;
  /** Frame file names, in order. */
  frames: string[];
  /** annotation id -> one mask per frame. */
  objects: Map<number, Mask[]>;
}

/**
 * Write a clip-mask directory: clip.json plus <annotation_id>/<t>.json masks.
 *
 * The whole directory is built under a temp name and renamed into place, so a
 * failure never leaves a partial clip behind. The target must not exist yet.
 */
export function writeClipMasks(outDir: string, clip: ClipMasks): void {
  if (!clip.clipId) throw new BridgeError("clip id must be nonempty");
  if (clip.frames.length < 1) throw new BridgeError("clip must have at least one frame");
  if (path.basename(outDir) !== clip.clipId) {
    throw new BridgeError(
      `output directory ${JSON.stringify(path.basename(outDir))} must be named after ` +
        `clip id ${JSON.stringify(clip.clipId)}`,
    );
  }
  if (fs.existsSync(outDir)) {
    throw new BridgeError(`${outDir}: already exists; refusing to overwrite a clip`);
  }
  for (const [annId, masks] of clip.objects) {
    if (masks.length !== clip.frames.length) {
      throw new BridgeError(
        `object ${annId} has ${masks.length} masks for ${clip.frames.length} frames`,
      );
    }
  }

  const tmp = `${outDir}.tmp-${process.pid}-${Math.floor(Math.random() * 1e9)}`;
  fs.mkdirSync(tmp, { recursive: true });
  try {
    const manifest = {
      clip_id: clip.clipId,
      frame_count: clip.frames.length,
      frames: clip.frames,
      source_image_id: clip.sourceImageId,
    };
    // sorted keys, compact separators, trailing newline
    fs.writeFileSync(path.join(tmp, "clip.json"), `${JSON.stringify(manifest)}\n`);
    for (const [annId, masks] of clip.objects) {
      const objDir = path.join(tmp, String(annId));
      fs.mkdirSync(objDir);
      masks.forEach((mask, t) => {
        fs.writeFileSync(path.join(objDir, `${t}.json`), maskJson(mask));
      });
    }
    fs.renameSync(tmp, outDir);
  } catch (err) {
    fs.rmSync(tmp, { recursive: true, force: true });
    throw err;
  }
}

export { atomicWriteFileSync };
