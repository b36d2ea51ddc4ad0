"""Regenerate the exporter's cross-language test fixtures.

Run from the repository root:

    python3 exporter/fixtures/make_fixtures.py

Writes, into this directory:
  - stub_classifier.json  64 -> 12 relu -> 3 softmax dense net (seeded)
  - forward_oracle.json   5 inputs with penultimate/logits/predicted
                          computed by the Python runtime
  - ref_f64.atrc          2x3 f64 matrix, values 10*i + j
  - ref_f32.atrc          4x2 f32 matrix, values i - j/2
  - gray.png / rgb.png / rgba.png  deterministic pixel patterns

The TS test suite recomputes the pixel patterns and matrix values from the
same formulas, so these files are byte-level oracles for the decoder and
the ATRC reader/writer.
"""

import json
from pathlib import Path

import numpy as np
from PIL import Image

from surprisekit.nnrt import (
    DenseLayer,
    NeuralModel,
    ReluLayer,
    SoftmaxLayer,
    forward,
    save_model,
    validate_model,
)
from surprisekit.trace_store import write_trace_matrix

HERE = Path(__file__).parent


def make_classifier() -> NeuralModel:
    rng = np.random.default_rng(777)
    w1 = rng.normal(scale=0.4, size=(12, 64))
    b1 = rng.normal(scale=0.1, size=12)
    w2 = rng.normal(scale=0.6, size=(3, 12))
    b2 = rng.normal(scale=0.1, size=3)
    return validate_model(
        NeuralModel(
            layers=(
                DenseLayer(weights=w1, bias=b1),
                ReluLayer(),
                DenseLayer(weights=w2, bias=b2),
                SoftmaxLayer(),
            ),
            input_dim=64,
            num_classes=3,
        )
    )


def main() -> None:
    model = make_classifier()
    save_model(model, HERE / "stub_classifier.json")

    rng = np.random.default_rng(4242)
    cases = []
    for _ in range(5):
        x = rng.random(64)
        res = forward(model, x)
        cases.append(
            {
                "input": x.tolist(),
                "penultimate": res.penultimate.tolist(),
                "logits": res.logits.tolist(),
                "predicted": res.predicted,
            }
        )
    (HERE / "forward_oracle.json").write_text(json.dumps(cases, indent=2) + "\n")

    f64 = np.array([[10.0 * i + j for j in range(3)] for i in range(2)])
    write_trace_matrix(f64, HERE / "ref_f64.atrc")
    f32 = np.array([[i - j / 2 for j in range(2)] for i in range(4)], dtype=np.float32)
    write_trace_matrix(f32, HERE / "ref_f32.atrc")

    gray = np.fromfunction(lambda y, x: (x * 7 + y * 13) % 256, (5, 9), dtype=np.int64)
    Image.fromarray(gray.astype(np.uint8), mode="L").save(HERE / "gray.png")

    rgb = np.zeros((6, 7, 3), dtype=np.uint8)
    for y in range(6):
        for x in range(7):
            rgb[y, x] = [(x * 11 + y) % 256, (x + y * 17) % 256, (x * 5 + y * 29) % 256]
    Image.fromarray(rgb, mode="RGB").save(HERE / "rgb.png")

    rgba = np.zeros((4, 5, 4), dtype=np.uint8)
    for y in range(4):
        for x in range(5):
            rgba[y, x] = [(x * 3) % 256, (y * 50) % 256, (x * y * 9) % 256, (255 - x * 20) % 256]
    Image.fromarray(rgba, mode="RGBA").save(HERE / "rgba.png")

    print("fixtures written to", HERE)


if __name__ == "__main__":
    main()
