/**
 * Dense-classifier inference for exports: load the shared model JSON, run
 * deterministic forward passes, and capture the penultimate activation
 * (the input vector to the final dense layer).
 *
 * Model JSON (shared with the Python runtime):
 *   {"input_dim": int, "num_classes": int, "layers": [
 *     {"kind": "dense", "weights": [[...]], "bias": [...]},
 *     {"kind": "relu"}, {"kind": "dropout", "rate": r}, {"kind": "softmax"}]}
 *
 * Dense weights are out x in. Dropout layers are identity here: exports
 * are inference-mode, stochastic passes stay on the Python side.
 */

import { readFileSync } from "node:fs";

export class ModelFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ModelFormatError";
  }
}

export type Layer =
  | { kind: "dense"; weights: number[][]; bias: number[] }
  | { kind: "relu" }
  | { kind: "dropout"; rate: number }
  | { kind: "softmax" };

export interface ClassifierModel {
  inputDim: number;
  numClasses: number;
  layers: Layer[];
}

export interface ForwardOutput {
  penultimate: Float64Array;
  logits: Float64Array;
  predicted: number;
}

export function finalDenseIndex(model: ClassifierModel): number {
  for (let i = model.layers.length - 1; i >= 0; i--) {
    if (model.layers[i].kind === "dense") return i;
  }
  throw new ModelFormatError("model has no dense layer");
}

export function penultimateDim(model: ClassifierModel): number {
  const layer = model.layers[finalDenseIndex(model)] as { kind: "dense"; weights: number[][] };
  return layer.weights[0].length;
}

export function validateModel(model: ClassifierModel): ClassifierModel {
  if (model.layers.length === 0) throw new ModelFormatError("model has no layers");
  if (!model.layers.some((l) => l.kind === "dense")) {
    throw new ModelFormatError("model has no dense layer");
  }
  let dim = model.inputDim;
  model.layers.forEach((layer, i) => {
    if (layer.kind === "dense") {
      const out = layer.weights.length;
      if (out === 0) throw new ModelFormatError(`layer ${i}: empty weight matrix`);
      for (const row of layer.weights) {
        if (row.length !== layer.weights[0].length) {
          throw new ModelFormatError(`layer ${i}: ragged weight matrix`);
        }
        for (const v of row) {
          if (!Number.isFinite(v)) throw new ModelFormatError(`layer ${i}: non-finite weight`);
        }
      }
      if (layer.weights[0].length !== dim) {
        throw new ModelFormatError(
          `layer ${i}: expects ${layer.weights[0].length} inputs, gets ${dim}`,
        );
      }
      if (layer.bias.length !== out) {
        throw new ModelFormatError(`layer ${i}: bias length ${layer.bias.length}, want ${out}`);
      }
      for (const v of layer.bias) {
        if (!Number.isFinite(v)) throw new ModelFormatError(`layer ${i}: non-finite bias`);
      }
      dim = out;
    } else if (layer.kind === "dropout") {
      if (!(layer.rate >= 0 && layer.rate < 1)) {
        throw new ModelFormatError(`layer ${i}: dropout rate must be in [0, 1)`);
      }
    } else if (layer.kind === "softmax") {
      if (i !== model.layers.length - 1) {
        throw new ModelFormatError(`layer ${i}: softmax allowed only as the final layer`);
      }
    } else if (layer.kind !== "relu") {
      throw new ModelFormatError(`layer ${i}: unknown layer kind`);
    }
  });
  if (dim !== model.numClasses) {
    throw new ModelFormatError(`final layer produces ${dim} values, num_classes is ${model.numClasses}`);
  }
  return model;
}

function layerFromJson(i: number, obj: unknown): Layer {
  if (typeof obj !== "object" || obj === null || !("kind" in obj)) {
    throw new ModelFormatError(`layer ${i}: expected an object with a 'kind' field`);
  }
  const o = obj as Record<string, unknown>;
  switch (o.kind) {
    case "dense":
      if (!Array.isArray(o.weights) || !Array.isArray(o.bias)) {
        throw new ModelFormatError(`layer ${i}: dense needs 'weights' and 'bias'`);
      }
      return { kind: "dense", weights: o.weights as number[][], bias: o.bias as number[] };
    case "relu":
      return { kind: "relu" };
    case "dropout":
      if (typeof o.rate !== "number") {
        throw new ModelFormatError(`layer ${i}: dropout needs a numeric 'rate'`);
      }
      return { kind: "dropout", rate: o.rate };
    case "softmax":
      return { kind: "softmax" };
    default:
      throw new ModelFormatError(`layer ${i}: unknown layer kind '${String(o.kind)}'`);
  }
}

export function modelFromJson(obj: unknown): ClassifierModel {
  if (typeof obj !== "object" || obj === null) {
    throw new ModelFormatError("model JSON must be an object");
  }
  const o = obj as Record<string, unknown>;
  if (typeof o.input_dim !== "number" || typeof o.num_classes !== "number" || !Array.isArray(o.layers)) {
    throw new ModelFormatError("model JSON needs input_dim, num_classes and layers");
  }
  return validateModel({
    inputDim: o.input_dim,
    numClasses: o.num_classes,
    layers: o.layers.map((l, i) => layerFromJson(i, l)),
  });
}

export function loadModel(path: string): ClassifierModel {
  let obj: unknown;
  try {
    obj = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new ModelFormatError(`${path}: not valid JSON: ${String(err)}`);
  }
  return modelFromJson(obj);
}

export function forward(model: ClassifierModel, x: Float64Array | number[]): ForwardOutput {
  let h = Float64Array.from(x);
  if (h.length !== model.inputDim) {
    throw new ModelFormatError(`input length ${h.length} != input_dim ${model.inputDim}`);
  }
  const finalDense = finalDenseIndex(model);
  let penultimate: Float64Array | null = null;
  model.layers.forEach((layer, i) => {
    if (layer.kind === "dense") {
      if (i === finalDense) penultimate = h.slice();
      const out = new Float64Array(layer.weights.length);
      for (let o = 0; o < layer.weights.length; o++) {
        let acc = layer.bias[o];
        const row = layer.weights[o];
        for (let j = 0; j < row.length; j++) acc += row[j] * h[j];
        out[o] = acc;
      }
      h = out;
    } else if (layer.kind === "relu") {
      h = h.map((v) => (v > 0 ? v : 0));
    }
    // dropout is identity at inference; softmax leaves the logits in h
  });
  let predicted = 0;
  for (let i = 1; i < h.length; i++) {
    if (h[i] > h[predicted]) predicted = i;
  }
  return { penultimate: penultimate!, logits: h, predicted };
}
