"""Regenerate the committed toy-model fixtures.

The committed files are canonical; this script records how they were
produced. Run from the repository root:

    python3 tests/data/make_fixtures.py

Produces in tests/data/:
  toy_model.json  2-16-16-2 dense classifier (relu, dropout, softmax)
  train.atrc      300 unlabeled training-distribution inputs (density fit)
  points.atrc     200 labeled test inputs
  labels.atrc     their true classes (0 = left of x1 = 0, 1 = right)

The classifier is handcrafted, not trained. The first layer holds eight
"rightward" and eight "leftward" direction detectors with a large shared
bias, the second layer is a noisy near-identity, and the output layer
sums each detector group. The bias keeps every detector active near
x1 = 0, so each logit is a large sum and the decision is their small
difference: multiplicative weight noise (Gaussian Fuzzing) visibly moves
the decision boundary instead of just rescaling both logits.

The training distribution is two well-separated blobs. The test set adds
a thin band of points hugging x1 = 0 that the training set never covers:
their activation traces are rare under the fitted density (top LSA) and
their margins are small (flippable by mutation), which is exactly the
population a surprise-ranked subset should surface.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "src"))

from surprisekit.nnrt import (  # noqa: E402
    DenseLayer,
    DropoutLayer,
    NeuralModel,
    ReluLayer,
    SoftmaxLayer,
    save_model,
    validate_model,
)
from surprisekit.trace_store import write_labels, write_trace_matrix  # noqa: E402

HERE = Path(__file__).resolve().parent

DETECTOR_BIAS = 2.0
DROPOUT_RATE = 0.005
BLOB_CENTER = 1.6
BLOB_SX = 0.6
BLOB_SY = 0.8
BAND_LO = 0.002
BAND_HI = 0.45


def build_toy_model(rng: np.random.Generator) -> NeuralModel:
    angles = np.linspace(-0.35, 0.35, 8)
    w1 = np.zeros((16, 2))
    w1[:8, 0] = np.cos(angles)
    w1[:8, 1] = np.sin(angles)
    w1[8:, 0] = -np.cos(angles)
    w1[8:, 1] = np.sin(angles)
    b1 = DETECTOR_BIAS + rng.normal(0.0, 0.05, 16)

    w2 = np.eye(16) + rng.normal(0.0, 0.08, (16, 16))
    b2 = rng.normal(0.0, 0.05, 16)

    w3 = np.zeros((2, 16))
    w3[1, :8] = 1.0
    w3[0, 8:] = 1.0
    w3 += rng.normal(0.0, 0.05, (2, 16))

    return validate_model(
        NeuralModel(
            layers=(
                DenseLayer(weights=w1, bias=b1),
                ReluLayer(),
                DropoutLayer(rate=DROPOUT_RATE),
                DenseLayer(weights=w2, bias=b2),
                ReluLayer(),
                DenseLayer(weights=w3, bias=np.zeros(2)),
                SoftmaxLayer(),
            ),
            input_dim=2,
            num_classes=2,
        )
    )


def sample_blobs(rng: np.random.Generator, per_class: int):
    left = rng.normal([-BLOB_CENTER, 0.0], [BLOB_SX, BLOB_SY], (per_class, 2))
    right = rng.normal([BLOB_CENTER, 0.0], [BLOB_SX, BLOB_SY], (per_class, 2))
    xs = np.vstack([left, right])
    ys = np.concatenate([np.zeros(per_class), np.ones(per_class)]).astype(np.int64)
    return xs, ys


def sample_band(rng: np.random.Generator, per_class: int):
    mag = rng.uniform(BAND_LO, BAND_HI, 2 * per_class)
    sign = np.concatenate([-np.ones(per_class), np.ones(per_class)])
    xs = np.column_stack([sign * mag, rng.normal(0.0, BLOB_SY, 2 * per_class)])
    ys = (sign > 0).astype(np.int64)
    return xs, ys


def main() -> None:
    model = build_toy_model(np.random.default_rng(20240811))
    save_model(model, HERE / "toy_model.json")

    train, _ = sample_blobs(np.random.default_rng(101), per_class=150)
    write_trace_matrix(train, HERE / "train.atrc")

    bx, by = sample_blobs(np.random.default_rng(202), per_class=70)
    nx, ny = sample_band(np.random.default_rng(303), per_class=30)
    order = np.random.default_rng(404).permutation(200)
    points = np.vstack([bx, nx])[order]
    labels = np.concatenate([by, ny])[order]
    write_trace_matrix(points, HERE / "points.atrc")
    write_labels(labels, HERE / "labels.atrc")
    print("wrote toy_model.json train.atrc points.atrc labels.atrc")


if __name__ == "__main__":
    main()
