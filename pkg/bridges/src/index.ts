export { BridgeError } from "./errors.js";
export {
  atomicWriteFileSync,
  readFlw1,
  sidecarPath,
  writeEmb1,
  writeFlw1,
  writeScoresJson,
  writeTrk1,
} from "./binary.js";
export type { EmbeddingData, FlowData, TrackData } from "./binary.js";
export { maskJson, rleCounts, writeClipMasks } from "./formats.js";
export type { ClipMasks, Mask } from "./formats.js";
export { loadFrame, saveRgbPng } from "./png.js";
export type { Frame } from "./png.js";
export {
  BlockMatchTracker,
  GridPointTracker,
  LuminanceScorer,
  PatchStatsEmbedder,
  TemplateSegmenter,
} from "./backends/classical.js";
export type {
  Box,
  DenseTrackerBackend,
  EmbedderBackend,
  ModelKind,
  ScorerBackend,
  SegmenterBackend,
  SparseTrackerBackend,
} from "./backends/types.js";
export {
  exportClipMasks,
  exportEmbeddings,
  exportFlow,
  exportScores,
  exportTracks,
  loadFrames,
} from "./exporters.js";
export { promptTemplate, run } from "./cli.js";
