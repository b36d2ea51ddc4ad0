"""Minimal dense-network inference runtime.

Loads serialized feed-forward networks (Dense/ReLU/Dropout/Softmax only),
runs forward passes, captures the penultimate activation (the input vector
to the final Dense layer), and supports seeded stochastic inference with
dropout enabled so one trained network can stand in for many thinned
instances.

Model JSON::

    {"input_dim": int, "num_classes": int, "layers": [
        {"kind": "dense", "weights": [[...]], "bias": [...]},
        {"kind": "relu"},
        {"kind": "dropout", "rate": r},
        {"kind": "softmax"}
    ]}

Dense weights are out x in; dropout uses inverted scaling (survivors are
multiplied by 1/(1-rate)) so expected activations are preserved; argmax
ties resolve to the smallest class index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ModelFormatError, ShapeError
from .seeds import mix, rng_for


@dataclass(frozen=True)
class DenseLayer:
    weights: np.ndarray
    bias: np.ndarray

    @property
    def in_dim(self) -> int:
        return int(self.weights.shape[1])

    @property
    def out_dim(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True)
class ReluLayer:
    pass


@dataclass(frozen=True)
class DropoutLayer:
    rate: float


@dataclass(frozen=True)
class SoftmaxLayer:
    pass


@dataclass(frozen=True)
class NeuralModel:
    layers: tuple
    input_dim: int
    num_classes: int

    @property
    def final_dense_index(self) -> int:
        for i in range(len(self.layers) - 1, -1, -1):
            if isinstance(self.layers[i], DenseLayer):
                return i
        raise ModelFormatError("model has no dense layer")

    @property
    def penultimate_dim(self) -> int:
        return self.layers[self.final_dense_index].in_dim


@dataclass(frozen=True)
class ForwardResult:
    logits: np.ndarray
    penultimate: np.ndarray
    predicted: int
    probabilities: np.ndarray | None


@dataclass(frozen=True)
class BatchResult:
    """predictions[p, i] = predicted class of input i on pass p; the
    penultimate and logits matrices come from pass 0."""

    predictions: np.ndarray
    penultimate: np.ndarray
    logits: np.ndarray


def validate_model(model: NeuralModel) -> NeuralModel:
    if not model.layers:
        raise ModelFormatError("model has no layers")
    if not any(isinstance(l, DenseLayer) for l in model.layers):
        raise ModelFormatError("model has no dense layer")
    dim = model.input_dim
    for i, layer in enumerate(model.layers):
        if isinstance(layer, DenseLayer):
            if layer.weights.ndim != 2 or layer.bias.ndim != 1:
                raise ModelFormatError(f"layer {i}: dense weights must be 2-D, bias 1-D")
            if not (np.all(np.isfinite(layer.weights)) and np.all(np.isfinite(layer.bias))):
                raise ModelFormatError(f"layer {i}: non-finite dense parameters")
            if layer.bias.size != layer.out_dim:
                raise ShapeError(
                    f"layer {i}: bias length {layer.bias.size} != output dim {layer.out_dim}"
                )
            if layer.in_dim != dim:
                raise ShapeError(
                    f"layer {i}: dense expects {layer.in_dim} inputs, gets {dim}"
                )
            dim = layer.out_dim
        elif isinstance(layer, DropoutLayer):
            if not (0.0 <= layer.rate < 1.0):
                raise ModelFormatError(f"layer {i}: dropout rate must be in [0, 1)")
        elif isinstance(layer, SoftmaxLayer):
            if i != len(model.layers) - 1:
                raise ModelFormatError(f"layer {i}: softmax allowed only as the final layer")
        elif not isinstance(layer, ReluLayer):
            raise ModelFormatError(f"layer {i}: unknown layer kind {type(layer).__name__}")
    if dim != model.num_classes:
        raise ShapeError(f"final layer produces {dim} values, num_classes is {model.num_classes}")
    return model


def _layer_from_json(i: int, obj) -> object:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ModelFormatError(f"layer {i}: expected an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "dense":
        try:
            weights = np.asarray(obj["weights"], dtype=np.float64)
            bias = np.asarray(obj["bias"], dtype=np.float64)
        except (KeyError, ValueError) as e:
            raise ModelFormatError(f"layer {i}: bad dense parameters: {e}") from None
        return DenseLayer(weights=weights, bias=bias)
    if kind == "relu":
        return ReluLayer()
    if kind == "dropout":
        try:
            rate = float(obj["rate"])
        except (KeyError, TypeError, ValueError):
            raise ModelFormatError(f"layer {i}: dropout needs a numeric 'rate'") from None
        return DropoutLayer(rate=rate)
    if kind == "softmax":
        return SoftmaxLayer()
    raise ModelFormatError(f"layer {i}: unknown layer kind {kind!r}")


def model_from_json(obj) -> NeuralModel:
    if not isinstance(obj, dict):
        raise ModelFormatError("model JSON must be an object")
    try:
        input_dim = int(obj["input_dim"])
        num_classes = int(obj["num_classes"])
        layer_objs = obj["layers"]
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"bad model fields: {e}") from None
    if not isinstance(layer_objs, list):
        raise ModelFormatError("'layers' must be a list")
    layers = tuple(_layer_from_json(i, lo) for i, lo in enumerate(layer_objs))
    return validate_model(
        NeuralModel(layers=layers, input_dim=input_dim, num_classes=num_classes)
    )


def model_to_json(model: NeuralModel) -> dict:
    layers = []
    for layer in model.layers:
        if isinstance(layer, DenseLayer):
            layers.append(
                {
                    "kind": "dense",
                    "weights": layer.weights.tolist(),
                    "bias": layer.bias.tolist(),
                }
            )
        elif isinstance(layer, ReluLayer):
            layers.append({"kind": "relu"})
        elif isinstance(layer, DropoutLayer):
            layers.append({"kind": "dropout", "rate": layer.rate})
        else:
            layers.append({"kind": "softmax"})
    return {
        "input_dim": model.input_dim,
        "num_classes": model.num_classes,
        "layers": layers,
    }


def load_model(path) -> NeuralModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as e:
            raise ModelFormatError(f"{path}: not valid JSON: {e}") from None
    return model_from_json(obj)


def save_model(model: NeuralModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh)
        fh.write("\n")


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def dropout_mask(seed: int, layer_index: int, width: int, rate: float) -> np.ndarray:
    """Keep mask for one dropout layer; unit i's fate is the i-th draw of
    the (seed, layer_index) stream, so it is stable per (seed, layer, unit)."""
    return rng_for(seed, layer_index).random(width) >= rate


def forward(model: NeuralModel, x, dropout_seed: int | None = None) -> ForwardResult:
    """One forward pass.

    Without ``dropout_seed`` dropout layers are identity (inference mode).
    With it, each dropout layer zeroes units with probability ``rate`` and
    scales survivors by 1/(1-rate), deterministically for the seed.
    """
    h = np.asarray(x, dtype=np.float64).ravel()
    if h.size != model.input_dim:
        raise ShapeError(f"input length {h.size} != input_dim {model.input_dim}")
    final_dense = model.final_dense_index
    penultimate = None
    probabilities = None
    for i, layer in enumerate(model.layers):
        if isinstance(layer, DenseLayer):
            if i == final_dense:
                penultimate = h.copy()
            h = layer.weights @ h + layer.bias
        elif isinstance(layer, ReluLayer):
            h = np.maximum(h, 0.0)
        elif isinstance(layer, DropoutLayer):
            if dropout_seed is not None and layer.rate > 0.0:
                keep = dropout_mask(dropout_seed, i, h.size, layer.rate)
                h = np.where(keep, h / (1.0 - layer.rate), 0.0)
        else:
            # Softmax is validated to be the final layer; h stays the logits.
            probabilities = _softmax(h)
    predicted = int(np.argmax(h))
    return ForwardResult(
        logits=h,
        penultimate=penultimate,
        predicted=predicted,
        probabilities=probabilities,
    )


def predict_batch(
    model: NeuralModel, inputs, passes: int = 1, dropout_seed: int | None = None
) -> BatchResult:
    """Predictions for every input over ``passes`` stochastic passes.

    Pass p uses the derived seed mix(dropout_seed, p) and one dropout mask
    per layer shared by all inputs, so each pass behaves as a single
    thinned network instance. Each row goes through the same code path as
    ``forward``, so batch and single-input results agree exactly.
    """
    if passes < 1:
        raise ValueError(f"passes must be >= 1, got {passes}")
    rows = np.asarray(inputs, dtype=np.float64)
    if rows.ndim != 2:
        raise ShapeError(f"inputs must be 2-D, got shape {rows.shape}")
    if rows.shape[1] != model.input_dim:
        raise ShapeError(f"inputs have {rows.shape[1]} columns, input_dim is {model.input_dim}")
    n = rows.shape[0]
    predictions = np.empty((passes, n), dtype=np.int64)
    penultimate = np.empty((n, model.penultimate_dim), dtype=np.float64)
    logits = np.empty((n, model.num_classes), dtype=np.float64)
    for p in range(passes):
        seed_p = None if dropout_seed is None else mix(dropout_seed, p)
        for i in range(n):
            res = forward(model, rows[i], dropout_seed=seed_p)
            predictions[p, i] = res.predicted
            if p == 0:
                penultimate[i] = res.penultimate
                logits[i] = res.logits
    return BatchResult(predictions=predictions, penultimate=penultimate, logits=logits)
