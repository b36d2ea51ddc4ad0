/**
 * Surrogate image generation against a Stable Diffusion web UI endpoint
 * (POST {endpoint}/sdapi/v1/txt2img).
 *
 * One image per (label, seed) pair; prompts come from a template with
 * "[label]" substituted, overridable per label. The provenance JSON holds
 * everything needed to regenerate every image: template, per-image prompt,
 * seed, guidance scale, steps, and resolution. Identical jobs produce
 * identical provenance (no timestamps).
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

export const DEFAULT_TEMPLATE = "A real image of [label]";
export const DEFAULT_ENDPOINT = "http://127.0.0.1:7860";

export class EndpointUnavailable extends Error {
  constructor(endpoint: string, cause: string) {
    super(
      `cannot reach txt2img endpoint ${endpoint} (${cause}); ` +
        "start a Stable Diffusion web UI with --api, or pass --endpoint",
    );
    this.name = "EndpointUnavailable";
  }
}

export class GenerationFailed extends Error {
  constructor(message: string) {
    super(message);
    this.name = "GenerationFailed";
  }
}

export interface GenerationJob {
  labels: string[];
  perLabelCount: number;
  promptTemplate: string;
  /** Per-label template overrides, e.g. truck -> "A real image of a big [label]". */
  templateOverrides: Record<string, string>;
  /** Seeds used per label: seedStart .. seedStart + perLabelCount - 1. */
  seedStart: number;
  guidanceScale: number;
  steps: number;
  width: number;
  height: number;
  outDir: string;
  endpoint: string;
}

export interface ProvenanceRecord {
  label: string;
  seed: number;
  prompt: string;
  file: string;
}

export interface Provenance {
  endpoint: string;
  prompt_template: string;
  template_overrides: Record<string, string>;
  per_label_count: number;
  guidance_scale: number;
  steps: number;
  width: number;
  height: number;
  records: ProvenanceRecord[];
}

export function promptFor(job: GenerationJob, label: string): string {
  const template = job.templateOverrides[label] ?? job.promptTemplate;
  return template.replaceAll("[label]", label);
}

async function txt2img(job: GenerationJob, prompt: string, seed: number): Promise<Buffer> {
  let response: Response;
  try {
    response = await fetch(`${job.endpoint}/sdapi/v1/txt2img`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        prompt,
        seed,
        cfg_scale: job.guidanceScale,
        steps: job.steps,
        width: job.width,
        height: job.height,
      }),
    });
  } catch (err) {
    throw new EndpointUnavailable(job.endpoint, (err as Error).message);
  }
  if (!response.ok) {
    throw new GenerationFailed(`txt2img returned ${response.status} ${response.statusText}`);
  }
  const body = (await response.json()) as { images?: string[] };
  if (!body.images?.[0]) {
    throw new GenerationFailed("txt2img response carries no images");
  }
  return Buffer.from(body.images[0], "base64");
}

/** Generate perLabelCount images per label; returns the provenance. */
export async function generateImages(job: GenerationJob): Promise<Provenance> {
  if (job.labels.length === 0) throw new GenerationFailed("no labels given");
  if (!Number.isInteger(job.perLabelCount) || job.perLabelCount < 1) {
    throw new GenerationFailed("per-label count must be a positive integer");
  }
  const records: ProvenanceRecord[] = [];
  // sequential: one generation at a time per device
  for (const label of job.labels) {
    const dir = join(job.outDir, label);
    mkdirSync(dir, { recursive: true });
    const prompt = promptFor(job, label);
    for (let k = 0; k < job.perLabelCount; k++) {
      const seed = job.seedStart + k;
      const png = await txt2img(job, prompt, seed);
      const rel = join(label, `${label}_${seed}.png`);
      writeFileSync(join(job.outDir, rel), png);
      records.push({ label, seed, prompt, file: rel });
    }
  }
  const provenance: Provenance = {
    endpoint: job.endpoint,
    prompt_template: job.promptTemplate,
    template_overrides: job.templateOverrides,
    per_label_count: job.perLabelCount,
    guidance_scale: job.guidanceScale,
    steps: job.steps,
    width: job.width,
    height: job.height,
    records,
  };
  writeFileSync(join(job.outDir, "provenance.json"), JSON.stringify(provenance, null, 2) + "\n");
  return provenance;
}
