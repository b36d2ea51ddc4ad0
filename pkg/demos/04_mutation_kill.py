"""Gauge test-set strength with Gaussian-Fuzzing mutation analysis.

Weights of a committed desk-scale network are perturbed (each selected
with probability rho, multiplied by 1 + N(0, sigma^2) noise) and the test
set must notice: either one previously-correct prediction flips
(single-instance criterion) or the accuracy gap over stochastic dropout
passes is statistically significant with a meaningful effect size
(statistical criterion). A bisection then finds the smallest killable rho.
"""

from pathlib import Path

import numpy as np

from surprisekit import (
    Criterion,
    KillConfig,
    MutationSpec,
    binary_search_rho,
    evaluate_kill,
    gaussian_fuzz,
    load_model,
    predict_batch,
)
from surprisekit.trace_store import load_labels, read_trace_matrix

DATA = Path(__file__).parent.parent / "tests" / "data"

model = load_model(DATA / "toy_model.json")
points = read_trace_matrix(DATA / "points.atrc")
labels = load_labels(DATA / "labels.atrc", num_classes=2)
acc = float(np.mean(predict_batch(model, points).predictions[0] == labels))
print(f"committed 2-16-16-2 model, {points.shape[0]} points, accuracy {acc:.2f}")

single = KillConfig(criterion=Criterion.SINGLE_INSTANCE)
statistical = KillConfig(criterion=Criterion.STATISTICAL)

for rho in (0.0, 0.1, 0.5):
    spec = MutationSpec(rho=rho, sigma=0.5, seed=42)
    mutant = gaussian_fuzz(model, spec)
    v_single = evaluate_kill(model, mutant, points, labels, single)
    v_stat = evaluate_kill(model, mutant, points, labels, statistical)
    print(f"rho={rho:.1f}: single-instance killed={v_single.killed}, "
          f"statistical killed={v_stat.killed} "
          f"(p={v_stat.p_value:.3g}, |d|={abs(v_stat.effect_size):.2f})")

result = binary_search_rho(
    model, points, labels, sigma=0.5, iters=10, kill_eval=single, seed=42,
)
print(f"smallest killable rho (10 bisection steps): {result.rho_star:.4f}")
print(f"bracket trace: {[(round(r, 4), k) for r, k in result.trace[:4]]} ...")
