/**
 * Dataset manifests: one JSON file naming the per-label ATRC files.
 *
 * Schema (shared with the Python toolkit):
 *   { "name": str, "entries": [ { "label": str, "class_index": int,
 *     "trace_path": str, "logits_path": str|null,
 *     "true_labels_path": str|null, "count": int } ] }
 *
 * Paths are relative to the manifest's directory.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

import { readTraceMatrix } from "./atrc.js";

export class ManifestError extends Error {
  constructor(
    readonly label: string,
    message: string,
  ) {
    super(`${label}: ${message}`);
    this.name = "ManifestError";
  }
}

export interface ManifestEntry {
  label: string;
  class_index: number;
  trace_path: string;
  count: number;
  logits_path: string | null;
  true_labels_path: string | null;
}

export interface DatasetManifest {
  name: string;
  entries: ManifestEntry[];
}

export function writeManifest(manifest: DatasetManifest, path: string): void {
  const doc = {
    name: manifest.name,
    entries: manifest.entries.map((e) => ({
      label: e.label,
      class_index: e.class_index,
      trace_path: e.trace_path,
      logits_path: e.logits_path,
      true_labels_path: e.true_labels_path,
      count: e.count,
    })),
  };
  writeFileSync(path, JSON.stringify(doc, null, 2) + "\n");
}

function checkRows(baseDir: string, e: ManifestEntry, rel: string): void {
  let rows: number;
  try {
    rows = readTraceMatrix(join(baseDir, rel)).rows;
  } catch (err) {
    throw new ManifestError(e.label, `unreadable ATRC file ${rel}: ${String(err)}`);
  }
  if (rows !== e.count) {
    throw new ManifestError(e.label, `${rel} holds ${rows} rows, manifest says count=${e.count}`);
  }
}

/** Parse a manifest and verify every referenced file's row count. */
export function loadManifest(path: string): DatasetManifest {
  let doc: unknown;
  try {
    doc = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new ManifestError(path, `cannot parse manifest: ${String(err)}`);
  }
  if (typeof doc !== "object" || doc === null || !("entries" in doc)) {
    throw new ManifestError(path, "manifest must be an object with 'entries'");
  }
  const raw = doc as { name?: unknown; entries: unknown };
  if (!Array.isArray(raw.entries)) {
    throw new ManifestError(path, "'entries' must be an array");
  }
  const entries: ManifestEntry[] = raw.entries.map((r) => {
    const o = r as Record<string, unknown>;
    if (typeof o.label !== "string" || typeof o.trace_path !== "string") {
      throw new ManifestError(JSON.stringify(r), "bad manifest entry");
    }
    return {
      label: o.label,
      class_index: Number(o.class_index),
      trace_path: o.trace_path,
      count: Number(o.count),
      logits_path: (o.logits_path as string | null | undefined) ?? null,
      true_labels_path: (o.true_labels_path as string | null | undefined) ?? null,
    };
  });

  const baseDir = dirname(path);
  const seen = new Map<number, string>();
  for (const e of entries) {
    const prior = seen.get(e.class_index);
    if (prior !== undefined) {
      throw new ManifestError(e.label, `class_index ${e.class_index} also used by '${prior}'`);
    }
    seen.set(e.class_index, e.label);
    checkRows(baseDir, e, e.trace_path);
    if (e.logits_path !== null) checkRows(baseDir, e, e.logits_path);
    if (e.true_labels_path !== null) checkRows(baseDir, e, e.true_labels_path);
  }
  return { name: typeof raw.name === "string" ? raw.name : "manifest", entries };
}
