"""Score how surprising inputs are relative to a reference activation set.

A density model is fitted on reference activations (variance filter ->
PCA -> Gaussian KDE with Scott bandwidth). The likelihood-based surprise
of an input is the negative log density of its activation trace: inputs
from the reference distribution score low, outliers score high.
"""

import numpy as np

from surprisekit import fit_density_model, score_batch

rng = np.random.default_rng(7)

# reference activations: 500 samples of a correlated 16-D Gaussian
mixing = rng.normal(size=(16, 16)) * 0.4 + np.eye(16)
reference = rng.normal(size=(500, 16)) @ mixing

model = fit_density_model(reference)
print(f"fitted on {reference.shape[0]} traces, "
      f"{model.mask.kept_count} columns kept, pca k={model.pca.k}")

in_dist = rng.normal(size=(100, 16)) @ mixing
shifted = rng.normal(size=(100, 16)) @ mixing + 4.0

lsa_in = score_batch(model, in_dist).values
lsa_out = score_batch(model, shifted).values

print(f"in-distribution LSA: median {np.median(lsa_in):.2f}, "
      f"90th pct {np.percentile(lsa_in, 90):.2f}")
print(f"shifted LSA:         median {np.median(lsa_out):.2f}, "
      f"90th pct {np.percentile(lsa_out, 90):.2f}")

both = np.concatenate([lsa_in, lsa_out])
top10 = sorted(int(i) for i in np.argsort(-both)[:10])
print(f"10 most surprising inputs (indices 100+ are shifted): {top10}")
