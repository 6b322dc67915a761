#!/usr/bin/env node
/** stamp-bridge: run a model backend over frames, emit one interchange file.
 *
 * Exit codes: 0 success, 1 contract/validation failure, 2 I/O error.
 */

import * as fs from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs, type ParseArgsOptionsConfig } from "node:util";
import { BridgeError } from "./errors.js";
import {
  exportClipMasks,
  exportEmbeddings,
  exportFlow,
  exportScores,
  exportTracks,
} from "./exporters.js";
import type { Box } from "./backends/types.js";

export const EXIT_OK = 0;
export const EXIT_VALIDATION = 1;
export const EXIT_IO = 2;

const USAGE = `usage: stamp-bridge <command> [options]

commands:
  masks   --frames <dir> --out <clip-dir> --source-image <id> --annotation <id>
          --box <x,y,w,h> [--backend classical] [--search-radius 8]
  flow    --frames <dir> --out <file.flw1> [--block-size 8] [--search-radius 8]
  tracks  --frames <dir> --out <file.trk1> [--rows 16] [--cols 16]
  embed   --images <dir> --out <file.emb1> [--dim 64]
  score   --images <dir> --out <file.json>
  prompt  <coco|visdrone>   print a bundled video-prompt template
`;

function parse(argv: string[], options: ParseArgsOptionsConfig) {
  return parseArgs({ args: argv, options, allowPositionals: false, strict: true });
}

function required(values: Record<string, unknown>, name: string): string {
  const v = values[name];
  if (typeof v !== "string" || v === "") {
    throw new BridgeError(`missing required option --${name}`);
  }
  return v;
}

function intOption(values: Record<string, unknown>, name: string): number | undefined {
  const v = values[name];
  if (v === undefined) return undefined;
  const parsed = Number(v);
  if (!Number.isInteger(parsed)) {
    throw new BridgeError(`--${name} must be an integer, got ${JSON.stringify(v)}`);
  }
  return parsed;
}

function parseBox(raw: string): Box {
  const parts = raw.split(",").map((p) => Number(p.trim()));
  if (parts.length !== 4 || parts.some((p) => !Number.isFinite(p))) {
    throw new BridgeError(`--box must be four numbers "x,y,w,h", got ${JSON.stringify(raw)}`);
  }
  return { x: parts[0], y: parts[1], w: parts[2], h: parts[3] };
}

export function promptTemplate(name: string): string {
  if (name !== "coco" && name !== "visdrone") {
    throw new BridgeError(`unknown prompt template ${JSON.stringify(name)} (coco | visdrone)`);
  }
  const url = new URL(`../assets/video-prompt-${name}.txt`, import.meta.url);
  return fs.readFileSync(url, "utf-8");
}

const COMMON: ParseArgsOptionsConfig = {
  out: { type: "string" },
  backend: { type: "string" },
};

export function run(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    let summary: Record<string, unknown>;
    switch (command) {
      case "masks": {
        const { values } = parse(rest, {
          ...COMMON,
          frames: { type: "string" },
          "source-image": { type: "string" },
          annotation: { type: "string" },
          box: { type: "string" },
          "search-radius": { type: "string" },
        });
        summary = exportClipMasks({
          framesDir: required(values, "frames"),
          out: required(values, "out"),
          sourceImageId: intOption(values, "source-image") ?? raiseMissing("source-image"),
          annotationId: intOption(values, "annotation") ?? raiseMissing("annotation"),
          box: parseBox(required(values, "box")),
          backend: values.backend as string | undefined,
          searchRadius: intOption(values, "search-radius"),
        });
        break;
      }
      case "flow": {
        const { values } = parse(rest, {
          ...COMMON,
          frames: { type: "string" },
          "block-size": { type: "string" },
          "search-radius": { type: "string" },
        });
        summary = exportFlow({
          framesDir: required(values, "frames"),
          out: required(values, "out"),
          backend: values.backend as string | undefined,
          blockSize: intOption(values, "block-size"),
          searchRadius: intOption(values, "search-radius"),
        });
        break;
      }
      case "tracks": {
        const { values } = parse(rest, {
          ...COMMON,
          frames: { type: "string" },
          rows: { type: "string" },
          cols: { type: "string" },
          "search-radius": { type: "string" },
        });
        summary = exportTracks({
          framesDir: required(values, "frames"),
          out: required(values, "out"),
          backend: values.backend as string | undefined,
          rows: intOption(values, "rows"),
          cols: intOption(values, "cols"),
          searchRadius: intOption(values, "search-radius"),
        });
        break;
      }
      case "embed": {
        const { values } = parse(rest, {
          ...COMMON,
          images: { type: "string" },
          dim: { type: "string" },
        });
        summary = exportEmbeddings({
          imagesDir: required(values, "images"),
          out: required(values, "out"),
          backend: values.backend as string | undefined,
          dim: intOption(values, "dim"),
        });
        break;
      }
      case "score": {
        const { values } = parse(rest, { ...COMMON, images: { type: "string" } });
        summary = exportScores({
          imagesDir: required(values, "images"),
          out: required(values, "out"),
          backend: values.backend as string | undefined,
        });
        break;
      }
      case "prompt": {
        if (rest.length !== 1) throw new BridgeError("prompt takes exactly one template name");
        process.stdout.write(promptTemplate(rest[0]));
        return EXIT_OK;
      }
      case undefined:
      case "-h":
      case "--help":
        process.stdout.write(USAGE);
        return command === undefined ? EXIT_VALIDATION : EXIT_OK;
      default:
        throw new BridgeError(`unknown command ${JSON.stringify(command)}`);
    }
    process.stdout.write(`${JSON.stringify(summary)}\n`);
    return EXIT_OK;
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    process.stderr.write(`error: ${message}\n`);
    if (err instanceof Error && "code" in err && (err as NodeJS.ErrnoException).code) {
      return EXIT_IO;
    }
    return EXIT_VALIDATION;
  }
}

function raiseMissing(name: string): never {
  throw new BridgeError(`missing required option --${name}`);
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(run(process.argv.slice(2)));
}
