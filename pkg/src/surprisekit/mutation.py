"""Gaussian-Fuzzing mutation of dense networks and kill criteria.

GF(W, rho, sigma) multiplies each selected weight by (1 + eps) with
eps ~ N(0, sigma^2); every weight is selected independently with
probability rho, biases are left alone by default, and unselected weights
stay bit-identical. Two kill criteria are provided:

* single-instance: the mutant misclassifies at least one input the
  original classified correctly;
* statistical: over paired stochastic (dropout) passes, the per-pass
  accuracies of original and mutant differ by Welch's t-test at level
  alpha with |Cohen's d| >= d_min.

Statistical evaluation uses common random numbers: original and mutant
see identical dropout masks per pass, so a rho = 0 "mutant" can never be
killed by noise alone.

Binary search assumes killability is monotone non-decreasing in rho and
returns the smallest rho observed killable, bracketed to 2^-iters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InsufficientData, NotKillable, ShapeError
from .diststat import student_t_sf_two_sided
from .nnrt import DenseLayer, NeuralModel, predict_batch
from .seeds import float_bits, mix, rng_for

D_SENTINEL = float(np.finfo(np.float64).max)


class Criterion(Enum):
    SINGLE_INSTANCE = "single_instance"
    STATISTICAL = "statistical"


@dataclass(frozen=True)
class MutationSpec:
    rho: float
    sigma: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must be in [0, 1], got {self.rho}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")


@dataclass(frozen=True)
class KillVerdict:
    killed: bool
    criterion: Criterion
    p_value: float | None = None
    effect_size: float | None = None
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class KillConfig:
    """How to decide whether a mutant is killed.

    ``passes`` and ``dropout_seed`` only matter for the statistical
    criterion; the same dropout seeds drive original and mutant.
    """

    criterion: Criterion = Criterion.STATISTICAL
    alpha: float = 0.05
    d_min: float = 0.5
    passes: int = 20
    dropout_seed: int = 0


@dataclass(frozen=True)
class SearchResult:
    rho_star: float
    trace: tuple
    non_monotone: bool


def gaussian_fuzz(
    model: NeuralModel, spec: MutationSpec, include_biases: bool = False
) -> NeuralModel:
    """Return a mutated copy of ``model``; the original is untouched.

    Selection and noise for layer L come from the (seed, L) child stream,
    so the mutant is a pure function of (model topology, spec).
    """
    layers = []
    for i, layer in enumerate(model.layers):
        if not isinstance(layer, DenseLayer):
            layers.append(layer)
            continue
        rng = rng_for(spec.seed, i)
        selected = rng.random(layer.weights.shape) < spec.rho
        eps = rng.normal(0.0, spec.sigma, layer.weights.shape)
        weights = np.where(selected, layer.weights * (1.0 + eps), layer.weights)
        bias = layer.bias
        if include_biases:
            sel_b = rng.random(bias.shape) < spec.rho
            eps_b = rng.normal(0.0, spec.sigma, bias.shape)
            bias = np.where(sel_b, bias * (1.0 + eps_b), bias)
        layers.append(DenseLayer(weights=weights, bias=bias))
    return NeuralModel(
        layers=tuple(layers), input_dim=model.input_dim, num_classes=model.num_classes
    )


def single_instance_kill(orig_pred, mut_pred, truth) -> KillVerdict:
    """Killed iff some input is correct under the original and wrong under
    the mutant."""
    o = np.asarray(orig_pred, dtype=np.int64).ravel()
    m = np.asarray(mut_pred, dtype=np.int64).ravel()
    t = np.asarray(truth, dtype=np.int64).ravel()
    if not (o.size == m.size == t.size):
        raise ShapeError(f"length mismatch: {o.size}, {m.size}, {t.size}")
    killing = np.flatnonzero((o == t) & (m != t))
    return KillVerdict(
        killed=killing.size > 0,
        criterion=Criterion.SINGLE_INSTANCE,
        details={"killing_indices": killing.tolist()},
    )


def cohens_d(a: np.ndarray, b: np.ndarray) -> float:
    """Cohen's d with the pooled standard deviation."""
    na, nb = a.size, b.size
    va = a.var(ddof=1)
    vb = b.var(ddof=1)
    pooled = np.sqrt(((na - 1) * va + (nb - 1) * vb) / (na + nb - 2))
    return float((a.mean() - b.mean()) / pooled)


def welch_t_pvalue(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sided Welch t-test p-value with Welch-Satterthwaite dof."""
    va = a.var(ddof=1) / a.size
    vb = b.var(ddof=1) / b.size
    t = (a.mean() - b.mean()) / np.sqrt(va + vb)
    dof = (va + vb) ** 2 / (va**2 / (a.size - 1) + vb**2 / (b.size - 1))
    return student_t_sf_two_sided(float(t), float(dof))


def statistical_kill(
    orig_acc, mut_acc, alpha: float = 0.05, d_min: float = 0.5
) -> KillVerdict:
    """Welch t + Cohen's d kill decision over per-pass accuracy samples.

    Both samples constant is decided by the mean gap alone: differing
    means give p = 0 and |d| = the largest finite float (an infinity
    sentinel); equal means give p = 1, d = 0.
    """
    a = np.asarray(orig_acc, dtype=np.float64).ravel()
    b = np.asarray(mut_acc, dtype=np.float64).ravel()
    if a.size < 2 or b.size < 2:
        raise InsufficientData("statistical kill needs at least 2 accuracy samples per side")
    for name, v in (("orig_acc", a), ("mut_acc", b)):
        if np.any((v < 0.0) | (v > 1.0)):
            raise ValueError(f"{name} values must lie in [0, 1]")

    if a.var(ddof=1) == 0.0 and b.var(ddof=1) == 0.0:
        gap = float(a.mean() - b.mean())
        if gap == 0.0:
            p, d = 1.0, 0.0
        else:
            p, d = 0.0, float(np.copysign(D_SENTINEL, gap))
    else:
        p = welch_t_pvalue(a, b)
        d = cohens_d(a, b)

    return KillVerdict(
        killed=p < alpha and abs(d) >= d_min,
        criterion=Criterion.STATISTICAL,
        p_value=p,
        effect_size=d,
        details={
            "orig_mean": float(a.mean()),
            "mut_mean": float(b.mean()),
            "n_orig": int(a.size),
            "n_mut": int(b.size),
        },
    )


def pass_accuracies(predictions: np.ndarray, truth) -> np.ndarray:
    """Per-pass accuracy of a passes x N prediction matrix."""
    t = np.asarray(truth, dtype=np.int64).ravel()
    if predictions.shape[1] != t.size:
        raise ShapeError(f"predictions have {predictions.shape[1]} columns, truth has {t.size}")
    return (predictions == t[None, :]).mean(axis=1)


def evaluate_kill(
    original: NeuralModel, mutant: NeuralModel, inputs, truth, config: KillConfig
) -> KillVerdict:
    """Run the configured criterion on original vs mutant over ``inputs``."""
    t = np.asarray(truth, dtype=np.int64).ravel()
    if config.criterion is Criterion.SINGLE_INSTANCE:
        orig = predict_batch(original, inputs).predictions[0]
        mut = predict_batch(mutant, inputs).predictions[0]
        return single_instance_kill(orig, mut, t)
    orig = predict_batch(
        original, inputs, passes=config.passes, dropout_seed=config.dropout_seed
    ).predictions
    mut = predict_batch(
        mutant, inputs, passes=config.passes, dropout_seed=config.dropout_seed
    ).predictions
    return statistical_kill(
        pass_accuracies(orig, t), pass_accuracies(mut, t), config.alpha, config.d_min
    )


def search_smallest_killable_rho(is_killed, iters: int) -> SearchResult:
    """Bisect the smallest killable rho given a kill predicate.

    Assumes killability is monotone non-decreasing in rho: lo starts at 0
    (assumed not killed), hi at 1 after verifying the predicate kills
    there. Returns the smallest rho observed killable; the bracket width
    is at most 2^-iters. A predicate that is secretly non-monotone is
    flagged, not fatal.
    """
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    if not is_killed(1.0):
        raise NotKillable("not killable at rho = 1")
    trace = [(1.0, True)]
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        killed = bool(is_killed(mid))
        trace.append((mid, killed))
        if killed:
            hi = mid
        else:
            lo = mid
    max_unkilled = max((r for r, k in trace if not k), default=-1.0)
    min_killed = min(r for r, k in trace if k)
    return SearchResult(
        rho_star=hi, trace=tuple(trace), non_monotone=max_unkilled > min_killed
    )


def binary_search_rho(
    model: NeuralModel,
    inputs,
    truth,
    sigma: float,
    iters: int,
    kill_eval: KillConfig,
    seed: int = 0,
) -> SearchResult:
    """Smallest mutation ratio at which a fresh mutant is killed.

    Each candidate rho gets its own mutant, seeded by (seed, rho), so the
    search is deterministic and candidates are independent.
    """

    def is_killed(rho: float) -> bool:
        spec = MutationSpec(rho=rho, sigma=sigma, seed=mix(seed, float_bits(rho)))
        mutant = gaussian_fuzz(model, spec)
        return evaluate_kill(model, mutant, inputs, truth, kill_eval).killed

    return search_smallest_killable_rho(is_killed, iters)
