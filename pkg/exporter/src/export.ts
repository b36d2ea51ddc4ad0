/**
 * Trace export: run every image in a label-per-subdirectory tree through a
 * classifier and write per-label ATRC files (penultimate traces, logits,
 * true labels) plus the dataset manifest.
 *
 * Labels are the subdirectory names in sorted order; class_index is the
 * position in that order. Every written file is re-read and byte-compared
 * before the manifest is written.
 */

import { readFileSync, readdirSync, mkdirSync } from "node:fs";
import { join } from "node:path";

import { FormatError, encodeTraceMatrix, traceMatrix, writeLabels, readTraceMatrix } from "./atrc.js";
import { writeManifest, ManifestEntry } from "./manifest.js";
import { ClassifierModel, forward, loadModel, penultimateDim } from "./model.js";
import { bilinearResize, flatten, readImage, toFloat, toGrayscale, toRgb } from "./images.js";
import { writeFileSync } from "node:fs";

export class ConfigError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ConfigError";
  }
}

export interface ExportJob {
  modelPath: string;
  imageDir: string;
  outDir: string;
  name: string;
  /** Only "penultimate" is supported; anything else lists the candidates. */
  layer: string;
  inputWidth: number;
  inputHeight: number;
  channels: "gray" | "rgb";
}

export interface ExportResult {
  manifestPath: string;
  entries: ManifestEntry[];
  penultimateDim: number;
}

const IMAGE_EXTENSIONS = [".png", ".pgm", ".ppm"];

function describeLayers(model: ClassifierModel): string {
  return model.layers.map((l, i) => `${i}:${l.kind}`).join(", ");
}

function listImages(dir: string): string[] {
  return readdirSync(dir)
    .filter((f) => IMAGE_EXTENSIONS.some((ext) => f.toLowerCase().endsWith(ext)))
    .sort();
}

function imageToInput(job: ExportJob, path: string): Float64Array {
  const raw = readImage(path);
  const shaped = job.channels === "gray" ? toGrayscale(raw) : toRgb(raw);
  return flatten(bilinearResize(toFloat(shaped), job.inputWidth, job.inputHeight));
}

function writeVerified(buf: Buffer, path: string): void {
  writeFileSync(path, buf);
  if (!readFileSync(path).equals(buf)) {
    throw new FormatError("invariant", `re-read of ${path} does not match written bytes`);
  }
  readTraceMatrix(path); // must parse as a valid ATRC file
}

export function exportTraces(job: ExportJob): ExportResult {
  const model = loadModel(job.modelPath);
  if (job.layer !== "penultimate") {
    throw new ConfigError(
      `unknown layer '${job.layer}'; this exporter captures 'penultimate' ` +
        `(input of the final dense layer) from a model with layers [${describeLayers(model)}]`,
    );
  }
  const channelCount = job.channels === "gray" ? 1 : 3;
  const flat = job.inputWidth * job.inputHeight * channelCount;
  if (flat !== model.inputDim) {
    throw new ConfigError(
      `${job.inputWidth}x${job.inputHeight}x${channelCount} flattens to ${flat} values, ` +
        `classifier expects ${model.inputDim}`,
    );
  }

  const labels = readdirSync(job.imageDir, { withFileTypes: true })
    .filter((d) => d.isDirectory())
    .map((d) => d.name)
    .sort();
  if (labels.length === 0) {
    throw new ConfigError(`${job.imageDir} has no label subdirectories`);
  }

  mkdirSync(job.outDir, { recursive: true });
  const dim = penultimateDim(model);

  const entries: ManifestEntry[] = labels.map((label, classIndex) => {
    const files = listImages(join(job.imageDir, label));
    if (files.length === 0) {
      throw new ConfigError(`label '${label}' has no readable images`);
    }
    const traces = new Float32Array(files.length * dim);
    const logits = new Float32Array(files.length * model.numClasses);
    files.forEach((file, i) => {
      const out = forward(model, imageToInput(job, join(job.imageDir, label, file)));
      traces.set(Float32Array.from(out.penultimate), i * dim);
      logits.set(Float32Array.from(out.logits), i * model.numClasses);
    });

    const tracePath = `${label}_traces.atrc`;
    const logitsPath = `${label}_logits.atrc`;
    const labelsPath = `${label}_labels.atrc`;
    writeVerified(
      encodeTraceMatrix(traceMatrix(files.length, dim, "f32", traces)),
      join(job.outDir, tracePath),
    );
    writeVerified(
      encodeTraceMatrix(traceMatrix(files.length, model.numClasses, "f32", logits)),
      join(job.outDir, logitsPath),
    );
    writeLabels(new Array(files.length).fill(classIndex), join(job.outDir, labelsPath));
    return {
      label,
      class_index: classIndex,
      trace_path: tracePath,
      count: files.length,
      logits_path: logitsPath,
      true_labels_path: labelsPath,
    };
  });

  const manifestPath = join(job.outDir, "manifest.json");
  writeManifest({ name: job.name, entries }, manifestPath);
  return { manifestPath, entries, penultimateDim: dim };
}
