/** PNG frame loading and the grayscale view the classical backends work on. */

import * as fs from "node:fs";
import { PNG } from "pngjs";

export interface Frame {
  width: number;
  height: number;
  /** Row-major luma in [0, 255]. */
  gray: Float64Array;
  /** Source file name (used for ids and error messages). */
  name: string;
}

export function loadFrame(filePath: string): Frame {
  const png = PNG.sync.read(fs.readFileSync(filePath));
  const gray = new Float64Array(png.width * png.height);
  for (let i = 0; i < gray.length; i++) {
    const o = i * 4;
    gray[i] = 0.299 * png.data[o] + 0.587 * png.data[o + 1] + 0.114 * png.data[o + 2];
  }
  return { width: png.width, height: png.height, gray, name: filePath };
}

/** Encode row-major RGB bytes (H*W*3) as a PNG file. */
export function saveRgbPng(filePath: string, width: number, height: number, rgb: Uint8Array): void {
  const png = new PNG({ width, height });
  for (let i = 0; i < width * height; i++) {
    png.data[i * 4] = rgb[i * 3];
    png.data[i * 4 + 1] = rgb[i * 3 + 1];
    png.data[i * 4 + 2] = rgb[i * 3 + 2];
    png.data[i * 4 + 3] = 255;
  }
  fs.writeFileSync(filePath, PNG.sync.write(png));
}
