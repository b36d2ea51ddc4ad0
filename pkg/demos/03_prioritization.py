"""Prioritize test inputs by surprise and compare against random order.

Executing the most surprising inputs first surfaces misbehavior early
when errors concentrate away from the training distribution. The
cumulative accuracy curve makes that visible: under descending-LSA order
it starts low (failures first) and converges to the overall accuracy,
which any order reaches at k = N.
"""

import numpy as np

from surprisekit import (
    SUBSET_PRESETS,
    cumulative_accuracy_curve,
    fit_density_model,
    rank_by_lsa,
    score_batch,
    select_top_k_correct,
)

rng = np.random.default_rng(3)
mixing = rng.normal(size=(16, 16)) * 0.3 + np.eye(16)

reference = rng.normal(size=(400, 16)) @ mixing
test = np.vstack([
    rng.normal(size=(150, 16)) @ mixing,        # in-distribution
    rng.normal(size=(50, 16)) @ mixing + 4.0,   # shifted
])
# a classifier that is accurate in-distribution and poor off it
correct = np.concatenate([rng.random(150) < 0.95, rng.random(50) < 0.15])

scores = score_batch(fit_density_model(reference), test).values
ranking = rank_by_lsa(scores)

lsa_curve = cumulative_accuracy_curve(ranking, correct)
random_curve = cumulative_accuracy_curve(rng.permutation(200), correct)

print("k      LSA-order acc   random acc")
for k in (10, 25, 50, 100, 200):
    print(f"{k:<6} {lsa_curve.acc[k - 1]:<15.3f} {random_curve.acc[k - 1]:.3f}")
print(f"overall accuracy: {correct.mean():.3f} (both curves end here exactly)")

# correctly-classified high-surprise subsets, e.g. for mutation testing
print(f"subset size presets: small={SUBSET_PRESETS['small']}")
sel = select_top_k_correct(ranking, correct, 30)
print(f"top-30 correct subset: {len(sel.indices)} indices, shortfall={sel.shortfall}")
