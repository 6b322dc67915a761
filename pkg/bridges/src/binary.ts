/** Little-endian binary writers/readers for the stamp interchange tensors.
 *
 * Layouts (all integers u32 little-endian, all floats f32 little-endian):
 *   FLW1: "FLW1" | T H W | flow (T,H,W,2) | vis (T,H,W) | conf (T,H,W)
 *   TRK1: "TRK1" | T N   | T*N records of (f32 x, f32 y, u8 visible, 3 pad)
 *   EMB1: "EMB1" | N D   | row-major f32 matrix; ids in a JSON sidecar
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { BridgeError } from "./errors.js";

/** Write via a temp file in the same directory + rename: never partial. */
export function atomicWriteFileSync(target: string, data: Buffer | string): void {
  const dir = path.dirname(target);
  const tmp = path.join(
    dir,
    `.${path.basename(target)}.tmp-${process.pid}-${Math.floor(Math.random() * 1e9)}`,
  );
  fs.writeFileSync(tmp, data);
  try {
    fs.renameSync(tmp, target);
  } catch (err) {
    fs.rmSync(tmp, { force: true });
    throw err;
  }
}

function checkFinite(values: Float32Array, label: string): void {
  for (let i = 0; i < values.length; i++) {
    if (!Number.isFinite(values[i])) {
      throw new BridgeError(`${label}: non-finite value at index ${i}`);
    }
  }
}

function f32Block(values: Float32Array): Buffer {
  const buf = Buffer.allocUnsafe(values.length * 4);
  for (let i = 0; i < values.length; i++) {
    buf.writeFloatLE(values[i], i * 4);
  }
  return buf;
}

function header(magic: string, dims: number[]): Buffer {
  const buf = Buffer.allocUnsafe(4 + dims.length * 4);
  buf.write(magic, 0, "ascii");
  dims.forEach((d, i) => buf.writeUInt32LE(d, 4 + i * 4));
  return buf;
}

export interface FlowData {
  frames: number;
  height: number;
  width: number;
  /** (T, H, W, 2) flattened: per-pixel (dx, dy) displacement. */
  flow: Float32Array;
  /** (T, H, W) flattened visibility in [0, 1]. */
  vis: Float32Array;
  /** (T, H, W) flattened confidence in [0, 1]. */
  conf: Float32Array;
}

export function writeFlw1(target: string, d: FlowData): void {
  const { frames, height, width } = d;
  if (frames < 1 || height < 1 || width < 1) {
    throw new BridgeError(`flow dimensions must be positive, got ${frames}x${height}x${width}`);
  }
  const cells = frames * height * width;
  if (d.flow.length !== cells * 2 || d.vis.length !== cells || d.conf.length !== cells) {
    throw new BridgeError(
      `flow block sizes (${d.flow.length}, ${d.vis.length}, ${d.conf.length}) ` +
        `do not match ${frames}x${height}x${width}`,
    );
  }
  checkFinite(d.flow, "flow");
  checkFinite(d.vis, "vis");
  checkFinite(d.conf, "conf");
  atomicWriteFileSync(
    target,
    Buffer.concat([
      header("FLW1", [frames, height, width]),
      f32Block(d.flow),
      f32Block(d.vis),
      f32Block(d.conf),
    ]),
  );
}

export function readFlw1(source: string): FlowData {
  const buf = fs.readFileSync(source);
  if (buf.length < 16 || buf.toString("ascii", 0, 4) !== "FLW1") {
    throw new BridgeError(`${source}: not a FLW1 file`);
  }
  const frames = buf.readUInt32LE(4);
  const height = buf.readUInt32LE(8);
  const width = buf.readUInt32LE(12);
  const cells = frames * height * width;
  const expected = 16 + cells * 4 * 4;
  if (buf.length !== expected) {
    throw new BridgeError(`${source}: payload is ${buf.length} bytes, expected ${expected}`);
  }
  const readBlock = (offset: number, count: number): Float32Array => {
    const out = new Float32Array(count);
    for (let i = 0; i < count; i++) out[i] = buf.readFloatLE(offset + i * 4);
    return out;
  };
  return {
    frames,
    height,
    width,
    flow: readBlock(16, cells * 2),
    vis: readBlock(16 + cells * 8, cells),
    conf: readBlock(16 + cells * 12, cells),
  };
}

export interface TrackData {
  frames: number;
  points: number;
  /** (T, N) flattened point positions. */
  xs: Float32Array;
  ys: Float32Array;
  /** (T, N) flattened 0/1 visibility flags. */
  visible: Uint8Array;
}

export function writeTrk1(target: string, d: TrackData): void {
  const { frames, points } = d;
  if (frames < 1 || points < 1) {
    throw new BridgeError(`track dimensions must be positive, got ${frames}x${points}`);
  }
  const n = frames * points;
  if (d.xs.length !== n || d.ys.length !== n || d.visible.length !== n) {
    throw new BridgeError(
      `track block sizes (${d.xs.length}, ${d.ys.length}, ${d.visible.length}) ` +
        `do not match ${frames}x${points}`,
    );
  }
  checkFinite(d.xs, "track x");
  checkFinite(d.ys, "track y");
  const buf = Buffer.alloc(12 + n * 12); // zero-filled: pad bytes stay 0
  buf.write("TRK1", 0, "ascii");
  buf.writeUInt32LE(frames, 4);
  buf.writeUInt32LE(points, 8);
  for (let i = 0; i < n; i++) {
    const off = 12 + i * 12;
    buf.writeFloatLE(d.xs[i], off);
    buf.writeFloatLE(d.ys[i], off + 4);
    buf.writeUInt8(d.visible[i] ? 1 : 0, off + 8);
  }
  atomicWriteFileSync(target, buf);
}

export interface EmbeddingData {
  ids: string[];
  /** (N, D) row-major feature matrix. */
  rows: Float32Array;
  dim: number;
}

/** foo.emb1 -> foo.ids.json, matching the reader's default. */
export function sidecarPath(embPath: string): string {
  const parsed = path.parse(embPath);
  return path.join(parsed.dir, `${parsed.name}.ids.json`);
}

export function writeEmb1(target: string, d: EmbeddingData): void {
  const n = d.ids.length;
  if (n < 1 || d.dim < 1) {
    throw new BridgeError(`embedding dimensions must be positive, got ${n}x${d.dim}`);
  }
  if (d.rows.length !== n * d.dim) {
    throw new BridgeError(`embedding matrix has ${d.rows.length} values, expected ${n * d.dim}`);
  }
  if (new Set(d.ids).size !== n) {
    throw new BridgeError("embedding ids must be unique");
  }
  checkFinite(d.rows, "embeddings");
  atomicWriteFileSync(target, Buffer.concat([header("EMB1", [n, d.dim]), f32Block(d.rows)]));
  atomicWriteFileSync(sidecarPath(target), `${JSON.stringify(d.ids)}\n`);
}

/** Flat id -> finite number object, sorted keys, compact separators. */
export function writeScoresJson(target: string, scores: Record<string, number>): void {
  const keys = Object.keys(scores).sort();
  if (keys.length === 0) {
    throw new BridgeError("scores object must not be empty");
  }
  for (const key of keys) {
    if (typeof scores[key] !== "number" || !Number.isFinite(scores[key])) {
      throw new BridgeError(`score ${JSON.stringify(key)}: must be a finite number`);
    }
  }
  const body = keys.map((k) => `${JSON.stringify(k)}:${JSON.stringify(scores[k])}`).join(",");
  atomicWriteFileSync(target, `{${body}}\n`);
}
