/** Shared fixtures: deterministic synthetic clips and the stamp CLI runner. */

import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { saveRgbPng } from "../src/png.js";
import type { Box } from "../src/backends/types.js";

export function tmpWorkspace(label: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), `bridge-${label}-`));
}

/** Deterministic integer hash -> [0, 1); same (x, y) always maps to the
 * same value, so shifted renders of the texture agree pixel-for-pixel. */
export function noise(x: number, y: number): number {
  let h = (Math.imul(x, 374761393) + Math.imul(y, 668265263)) | 0;
  h = Math.imul(h ^ (h >>> 13), 1274126177) | 0;
  h ^= h >>> 16;
  return (h >>> 0) / 4294967296;
}

export interface ClipSpec {
  frames: number;
  width: number;
  height: number;
  /** Frame-0 position and size of the bright square. */
  box: Box;
  /** Per-frame square velocity in pixels. */
  dx: number;
  dy: number;
}

/** Render a moving bright square over a textured background into
 * <dir>/frame-<t>.png. The background is static, so template and block
 * matching lock onto the square and the scene respectively. */
export function makeClip(dir: string, spec: ClipSpec): string[] {
  fs.mkdirSync(dir, { recursive: true });
  const { width, height } = spec;
  const names: string[] = [];
  for (let t = 0; t < spec.frames; t++) {
    const rgb = new Uint8Array(width * height * 3);
    const bx = spec.box.x + t * spec.dx;
    const by = spec.box.y + t * spec.dy;
    for (let y = 0; y < height; y++) {
      for (let x = 0; x < width; x++) {
        const inSquare =
          x >= bx && x < bx + spec.box.w && y >= by && y < by + spec.box.h;
        // dark textured background, bright textured square: high contrast,
        // no repeating pattern, fully reproducible
        const base = inSquare ? 200 : 30;
        const v = Math.round(base + 50 * noise(x, y));
        const o = (y * width + x) * 3;
        rgb[o] = v;
        rgb[o + 1] = v;
        rgb[o + 2] = v;
      }
    }
    const name = `frame-${t}.png`;
    saveRgbPng(path.join(dir, name), width, height, rgb);
    names.push(name);
  }
  return names;
}

/** Render a rigid full-frame translation: every frame shows the same infinite
 * texture sampled at (x - t*dx, y - t*dy), so frame t is exactly frame 0
 * shifted by (t*dx, t*dy) with fresh texture revealed at the edges. */
export function makeTranslatingClip(
  dir: string,
  frames: number,
  width: number,
  height: number,
  dx: number,
  dy: number,
): string[] {
  fs.mkdirSync(dir, { recursive: true });
  const names: string[] = [];
  for (let t = 0; t < frames; t++) {
    const rgb = new Uint8Array(width * height * 3);
    for (let y = 0; y < height; y++) {
      for (let x = 0; x < width; x++) {
        const v = Math.round(255 * noise(x - t * dx, y - t * dy));
        const o = (y * width + x) * 3;
        rgb[o] = v;
        rgb[o + 1] = v;
        rgb[o + 2] = v;
      }
    }
    const name = `frame-${t}.png`;
    saveRgbPng(path.join(dir, name), width, height, rgb);
    names.push(name);
  }
  return names;
}

export interface CliResult {
  status: number;
  stdout: string;
  stderr: string;
}

/** Run the installed stamp pipeline CLI; captures exit code and streams. */
export function stamp(...args: string[]): CliResult {
  try {
    const stdout = execFileSync("stamp", args, { encoding: "utf-8" });
    return { status: 0, stdout, stderr: "" };
  } catch (err) {
    const e = err as { status?: number; stdout?: string; stderr?: string };
    if (typeof e.status !== "number") throw err;
    return { status: e.status, stdout: e.stdout ?? "", stderr: e.stderr ?? "" };
  }
}

export function stampValidate(...paths: string[]): CliResult {
  return stamp("validate", ...paths);
}

export function readJson(filePath: string): any {
  return JSON.parse(fs.readFileSync(filePath, "utf-8"));
}

/** Decode column-major zeros-first run-length counts back to pixels. */
export function decodeCounts(counts: number[], height: number, width: number): Uint8Array {
  const data = new Uint8Array(height * width);
  let value = 0;
  let at = 0;
  for (const run of counts) {
    for (let i = 0; i < run; i++) {
      const x = Math.floor(at / height);
      const y = at % height;
      data[y * width + x] = value;
      at++;
    }
    value = 1 - value;
  }
  if (at !== height * width) {
    throw new Error(`counts cover ${at} pixels, expected ${height * width}`);
  }
  return data;
}

/** Tight bounding box (x, y, w, h) of the set pixels, or null when empty. */
export function tightBox(data: Uint8Array, height: number, width: number): Box | null {
  let x0 = width;
  let y0 = height;
  let x1 = -1;
  let y1 = -1;
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      if (data[y * width + x]) {
        if (x < x0) x0 = x;
        if (y < y0) y0 = y;
        if (x > x1) x1 = x;
        if (y > y1) y1 = y;
      }
    }
  }
  if (x1 < 0) return null;
  return { x: x0, y: y0, w: x1 - x0 + 1, h: y1 - y0 + 1 };
}
