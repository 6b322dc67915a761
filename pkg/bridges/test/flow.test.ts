/** Motion recovery on a rigid constant-translation fixture: the dense and
 * sparse trackers must reproduce the planted shift. Frame t renders the same
 * infinite texture displaced by (t*dx, t*dy), so away from the borders the
 * true displacement is known exactly. */

import * as path from "node:path";
import { describe, expect, it, beforeAll } from "vitest";
import { readFlw1, type FlowData } from "../src/binary.js";
import { BlockMatchTracker, GridPointTracker } from "../src/backends/classical.js";
import { exportFlow, loadFrames } from "../src/exporters.js";
import { makeTranslatingClip, tmpWorkspace } from "./helpers.js";

const WIDTH = 48;
const HEIGHT = 40;
const DX = 3;
const DY = 2;
const RADIUS = 8;

let framesDir: string;
let field: FlowData;

beforeAll(() => {
  const ws = tmpWorkspace("flow");
  framesDir = path.join(ws, "frames");
  makeTranslatingClip(framesDir, 2, WIDTH, HEIGHT, DX, DY);
  const out = path.join(ws, "shift.flw1");
  exportFlow({ framesDir, out, searchRadius: RADIUS });
  field = readFlw1(out);
});

/** Pixels whose matching block never samples outside the frame, in either
 * the reference or the displaced image, for any candidate displacement. */
function interior(x: number, y: number): boolean {
  const blockX = Math.floor(x / 8) * 8;
  const blockY = Math.floor(y / 8) * 8;
  return (
    blockX - RADIUS >= 0 &&
    blockY - RADIUS >= 0 &&
    blockX + 8 + RADIUS <= WIDTH &&
    blockY + 8 + RADIUS <= HEIGHT
  );
}

describe("dense block matching", () => {
  it("is the identity on frame 0", () => {
    const cells = HEIGHT * WIDTH;
    for (let i = 0; i < cells; i++) {
      expect(field.flow[i * 2]).toBe(0);
      expect(field.flow[i * 2 + 1]).toBe(0);
      expect(field.vis[i]).toBe(1);
      expect(field.conf[i]).toBe(1);
    }
  });

  it("recovers the planted shift exactly on interior blocks", () => {
    const base = HEIGHT * WIDTH; // frame 1
    let checked = 0;
    for (let y = 0; y < HEIGHT; y++) {
      for (let x = 0; x < WIDTH; x++) {
        if (!interior(x, y)) continue;
        const cell = base + y * WIDTH + x;
        expect(field.flow[cell * 2]).toBe(DX);
        expect(field.flow[cell * 2 + 1]).toBe(DY);
        expect(field.vis[cell]).toBe(1);
        expect(field.conf[cell]).toBe(1); // exact texture match
        checked++;
      }
    }
    expect(checked).toBeGreaterThan(200);
  });

  it("stays within half a pixel of the shift in the frame-wide median", () => {
    const base = HEIGHT * WIDTH;
    const cells = HEIGHT * WIDTH;
    const dxs: number[] = [];
    const dys: number[] = [];
    for (let i = 0; i < cells; i++) {
      dxs.push(field.flow[(base + i) * 2]);
      dys.push(field.flow[(base + i) * 2 + 1]);
    }
    dxs.sort((a, b) => a - b);
    dys.sort((a, b) => a - b);
    expect(Math.abs(dxs[cells >> 1] - DX)).toBeLessThanOrEqual(0.5);
    expect(Math.abs(dys[cells >> 1] - DY)).toBeLessThanOrEqual(0.5);
  });

  it("agrees with a direct tracker invocation", () => {
    const frames = loadFrames(framesDir);
    const direct = new BlockMatchTracker(8, RADIUS).track(frames);
    expect(field.flow).toEqual(direct.flow);
    expect(field.vis).toEqual(direct.vis);
    expect(field.conf).toEqual(direct.conf);
  });
});

describe("sparse grid tracking", () => {
  it("moves interior grid points by the planted shift", () => {
    const frames = loadFrames(framesDir);
    const rows = 5;
    const cols = 6;
    const { xs, ys, visible } = new GridPointTracker(3, RADIUS).track(frames, rows, cols);
    const n = rows * cols;
    let checked = 0;
    for (let i = 0; i < n; i++) {
      const margin = 3 + RADIUS; // patch radius plus search radius
      const safe =
        xs[i] - margin >= 0 &&
        ys[i] - margin >= 0 &&
        xs[i] + margin < WIDTH &&
        ys[i] + margin < HEIGHT;
      if (!safe) continue;
      expect(xs[n + i] - xs[i]).toBe(DX);
      expect(ys[n + i] - ys[i]).toBe(DY);
      expect(visible[n + i]).toBe(1);
      checked++;
    }
    expect(checked).toBeGreaterThan(5);
  });
});
