#!/usr/bin/env node
/**
 * trace-exporter CLI.
 *
 *   trace-exporter export-traces --model m.json --images dir --out dir \
 *       --input-size 8x8 [--channels gray|rgb] [--name export] [--layer penultimate]
 *   trace-exporter generate-images --labels cat,dog --per-label-count 4 \
 *       --out dir [--template T] [--template-for label=T] [--seed-start 0] \
 *       [--guidance-scale 7.5] [--steps 50] [--size 512x512] [--endpoint URL]
 *
 * Exit codes: 0 success, 1 operational error (single JSON line on stderr),
 * 2 usage error.
 */

import { parseArgs } from "node:util";

import { FormatError } from "./atrc.js";
import { ManifestError } from "./manifest.js";
import { ModelFormatError } from "./model.js";
import { ImageFormatError } from "./png.js";
import { ConfigError, exportTraces } from "./export.js";
import {
  DEFAULT_ENDPOINT,
  DEFAULT_TEMPLATE,
  EndpointUnavailable,
  GenerationFailed,
  generateImages,
} from "./generate.js";

class UsageError extends Error {}

function parseSize(text: string, flag: string): [number, number] {
  const m = /^(\d+)x(\d+)$/.exec(text);
  if (!m) throw new UsageError(`${flag} must look like 512x512, got '${text}'`);
  return [Number(m[1]), Number(m[2])];
}

function required(values: Record<string, unknown>, name: string): string {
  const v = values[name];
  if (typeof v !== "string" || v === "") throw new UsageError(`--${name} is required`);
  return v;
}

function parseIntFlag(text: string, flag: string): number {
  const v = Number(text);
  if (!Number.isInteger(v)) throw new UsageError(`${flag} must be an integer, got '${text}'`);
  return v;
}

function cmdExportTraces(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      model: { type: "string" },
      images: { type: "string" },
      out: { type: "string" },
      name: { type: "string", default: "export" },
      layer: { type: "string", default: "penultimate" },
      "input-size": { type: "string" },
      channels: { type: "string", default: "gray" },
    },
  });
  const [inputWidth, inputHeight] = parseSize(required(values, "input-size"), "--input-size");
  if (values.channels !== "gray" && values.channels !== "rgb") {
    throw new UsageError(`--channels must be gray or rgb, got '${values.channels}'`);
  }
  const result = exportTraces({
    modelPath: required(values, "model"),
    imageDir: required(values, "images"),
    outDir: required(values, "out"),
    name: values.name as string,
    layer: values.layer as string,
    inputWidth,
    inputHeight,
    channels: values.channels,
  });
  process.stdout.write(
    JSON.stringify({
      written: result.manifestPath,
      labels: result.entries.map((e) => e.label),
      counts: result.entries.map((e) => e.count),
      penultimate_dim: result.penultimateDim,
    }) + "\n",
  );
}

async function cmdGenerateImages(argv: string[]): Promise<void> {
  const { values } = parseArgs({
    args: argv,
    options: {
      labels: { type: "string" },
      "per-label-count": { type: "string" },
      out: { type: "string" },
      template: { type: "string", default: DEFAULT_TEMPLATE },
      "template-for": { type: "string", multiple: true, default: [] },
      "seed-start": { type: "string", default: "0" },
      "guidance-scale": { type: "string", default: "7.5" },
      steps: { type: "string", default: "50" },
      size: { type: "string", default: "512x512" },
      endpoint: { type: "string", default: DEFAULT_ENDPOINT },
    },
  });
  const labels = required(values, "labels")
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s !== "");
  if (labels.length === 0) throw new UsageError("--labels must name at least one label");

  const templateOverrides: Record<string, string> = {};
  for (const spec of values["template-for"] as string[]) {
    const eq = spec.indexOf("=");
    if (eq < 1) throw new UsageError(`--template-for takes label=template, got '${spec}'`);
    templateOverrides[spec.slice(0, eq)] = spec.slice(eq + 1);
  }

  const [width, height] = parseSize(values.size as string, "--size");
  const guidanceScale = Number(values["guidance-scale"]);
  if (!Number.isFinite(guidanceScale)) throw new UsageError("--guidance-scale must be a number");

  const provenance = await generateImages({
    labels,
    perLabelCount: parseIntFlag(required(values, "per-label-count"), "--per-label-count"),
    promptTemplate: values.template as string,
    templateOverrides,
    seedStart: parseIntFlag(values["seed-start"] as string, "--seed-start"),
    guidanceScale,
    steps: parseIntFlag(values.steps as string, "--steps"),
    width,
    height,
    outDir: required(values, "out"),
    endpoint: values.endpoint as string,
  });
  process.stdout.write(
    JSON.stringify({ written: "provenance.json", images: provenance.records.length }) + "\n",
  );
}

function fail(kind: string, message: string): never {
  process.stderr.write(JSON.stringify({ error: kind, message }) + "\n");
  process.exit(1);
}

async function main(): Promise<void> {
  const [command, ...rest] = process.argv.slice(2);
  try {
    if (command === "export-traces") {
      cmdExportTraces(rest);
    } else if (command === "generate-images") {
      await cmdGenerateImages(rest);
    } else {
      process.stderr.write(
        "usage: trace-exporter <export-traces|generate-images> [options]\n",
      );
      process.exit(2);
    }
  } catch (err) {
    if (err instanceof UsageError || (err as Error).name === "ERR_PARSE_ARGS_UNKNOWN_OPTION") {
      process.stderr.write(`usage error: ${(err as Error).message}\n`);
      process.exit(2);
    }
    if (
      err instanceof ConfigError ||
      err instanceof FormatError ||
      err instanceof ManifestError ||
      err instanceof ModelFormatError ||
      err instanceof ImageFormatError ||
      err instanceof EndpointUnavailable ||
      err instanceof GenerationFailed ||
      (err as NodeJS.ErrnoException).code !== undefined
    ) {
      fail((err as Error).name, (err as Error).message);
    }
    throw err;
  }
}

main();
