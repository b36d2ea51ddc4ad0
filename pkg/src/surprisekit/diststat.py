"""Distribution-level comparison of two surprise-score samples.

Covers the three statistics used to compare a reference scoring against a
surrogate scoring: 1-D KDE curves for plotting, Jensen-Shannon divergence
between the (by default z-scored) score distributions, and Spearman rank
correlation with both a parametric and a permutation p-value.

JSD uses base-2 logarithms so the value lives in [0, 1]; both samples are
smoothed with Scott-bandwidth Gaussian KDEs evaluated on one shared grid
and renormalized to discrete distributions before the divergence is taken.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import betainc

from .errors import DegenerateData, InsufficientData, ShapeError
from .preprocess import zscore
from .seeds import rng_for

SQRT_2PI = float(np.sqrt(2.0 * np.pi))


@dataclass(frozen=True)
class DensityCurve:
    """1-D density curve on a uniform ascending grid; integrates to 1."""

    xs: np.ndarray
    ys: np.ndarray


@dataclass(frozen=True)
class DivergenceResult:
    jsd: float
    grid_size: int
    standardized: bool


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_parametric: float
    n: int
    p_permutation: float | None = None


class Strength(Enum):
    STRONG = "strong"
    NOT_STRONG = "not_strong"


def _check_sample(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size < 2:
        raise InsufficientData("need at least 2 samples")
    if v.std(ddof=1) == 0.0:
        raise DegenerateData("sample has zero variance")
    return v


def scott_bandwidth_1d(samples: np.ndarray) -> float:
    """Scott's rule in one dimension: n^(-1/5) * sample std (ddof=1)."""
    return len(samples) ** (-0.2) * float(np.std(samples, ddof=1))


def _gaussian_kde_grid(samples: np.ndarray, h: float, xs: np.ndarray) -> np.ndarray:
    z = (xs[:, None] - samples[None, :]) / h
    return np.exp(-0.5 * z * z).sum(axis=1) / (samples.size * h * SQRT_2PI)


def kde_curve_1d(samples, grid_size: int = 1000) -> DensityCurve:
    """Gaussian KDE curve on a uniform grid spanning [min-3h, max+3h].

    The curve is renormalized so its trapezoidal integral is exactly 1.
    """
    if grid_size < 16:
        raise ValueError(f"grid_size must be >= 16, got {grid_size}")
    v = _check_sample(samples)
    h = scott_bandwidth_1d(v)
    xs = np.linspace(v.min() - 3.0 * h, v.max() + 3.0 * h, grid_size)
    ys = _gaussian_kde_grid(v, h, xs)
    ys = ys / np.trapezoid(ys, xs)
    return DensityCurve(xs=xs, ys=ys)


def js_divergence(a, b, standardized: bool = True, grid_size: int = 1000) -> DivergenceResult:
    """Jensen-Shannon divergence between two score samples, in bits.

    With ``standardized`` (the default) each sample is z-scored first, so
    the comparison sees shape rather than location/scale. Both KDEs are
    evaluated on a shared grid covering the union of the sample ranges
    padded by 3x the larger bandwidth, then renormalized to discrete
    distributions. Zero-probability grid cells contribute nothing.
    """
    if grid_size < 16:
        raise ValueError(f"grid_size must be >= 16, got {grid_size}")
    va = _check_sample(a)
    vb = _check_sample(b)
    if standardized:
        va = zscore(va)
        vb = zscore(vb)

    ha = scott_bandwidth_1d(va)
    hb = scott_bandwidth_1d(vb)
    pad = 3.0 * max(ha, hb)
    lo = min(va.min(), vb.min()) - pad
    hi = max(va.max(), vb.max()) + pad
    xs = np.linspace(lo, hi, grid_size)

    p = _gaussian_kde_grid(va, ha, xs)
    q = _gaussian_kde_grid(vb, hb, xs)
    p = p / p.sum()
    q = q / q.sum()
    m = 0.5 * (p + q)

    def _kl(u, w):
        nz = u > 0.0
        return float(np.sum(u[nz] * np.log2(u[nz] / w[nz])))

    jsd = 0.5 * _kl(p, m) + 0.5 * _kl(q, m)
    return DivergenceResult(jsd=jsd, grid_size=grid_size, standardized=standardized)


def average_ranks(v: np.ndarray) -> np.ndarray:
    """Ranks starting at 1; tied values share the average of their ranks."""
    v = np.asarray(v, dtype=np.float64)
    order = np.argsort(v, kind="stable")
    sv = v[order]
    ranks = np.empty(v.size, dtype=np.float64)
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _pearson(a_c: np.ndarray, b_c: np.ndarray, denom: float) -> float:
    return float(a_c @ b_c) / denom


def _rank_setup(a, b):
    va = np.asarray(a, dtype=np.float64).ravel()
    vb = np.asarray(b, dtype=np.float64).ravel()
    if va.size != vb.size:
        raise ShapeError(f"length mismatch: {va.size} vs {vb.size}")
    if va.size < 3:
        raise InsufficientData("rank correlation needs at least 3 pairs")
    ra_c = average_ranks(va)
    rb_c = average_ranks(vb)
    ra_c -= ra_c.mean()
    rb_c -= rb_c.mean()
    sa = float(ra_c @ ra_c)
    sb = float(rb_c @ rb_c)
    if sa == 0.0 or sb == 0.0:
        raise DegenerateData("rank correlation undefined for constant input")
    return ra_c, rb_c, float(np.sqrt(sa * sb))


def student_t_sf_two_sided(t: float, dof: float) -> float:
    """P(|T| >= t) for Student's t, via the regularized incomplete beta."""
    t2 = t * t
    if not np.isfinite(t2):
        return 0.0
    return float(betainc(0.5 * dof, 0.5, dof / (dof + t2)))


def spearman(a, b) -> CorrelationResult:
    """Spearman rank correlation with a parametric two-sided p-value.

    Ties receive average ranks; the p-value uses the t approximation
    t = rho * sqrt((n-2) / (1-rho^2)) with n-2 degrees of freedom, and is
    exactly 0 at rho = +/-1.
    """
    ra_c, rb_c, denom = _rank_setup(a, b)
    n = ra_c.size
    rho = _pearson(ra_c, rb_c, denom)
    rho = min(1.0, max(-1.0, rho))
    if abs(rho) == 1.0:
        p = 0.0
    else:
        t = rho * np.sqrt((n - 2) / (1.0 - rho * rho))
        p = student_t_sf_two_sided(float(t), n - 2)
    return CorrelationResult(rho=rho, p_parametric=p, n=n)


def permutation_pvalue(a, b, n_perm: int, seed: int) -> float:
    """Permutation p-value for the Spearman correlation of ``a`` and ``b``.

    Counts permutations of ``b`` whose |rho| meets or exceeds the observed
    one: p = (1 + count) / (n_perm + 1). Each trial draws its permutation
    from an independently derived child seed, so the result is identical
    however the trials are scheduled.
    """
    if n_perm < 1:
        raise ValueError("n_perm must be >= 1")
    ra_c, rb_c, denom = _rank_setup(a, b)
    observed = abs(_pearson(ra_c, rb_c, denom))
    count = 0
    for trial in range(n_perm):
        perm = rng_for(seed, trial).permutation(ra_c.size)
        if abs(_pearson(ra_c, rb_c[perm], denom)) >= observed:
            count += 1
    return (1 + count) / (n_perm + 1)


def spearman_with_permutation(a, b, n_perm: int, seed: int) -> CorrelationResult:
    """Spearman correlation carrying both p-values."""
    base = spearman(a, b)
    p_perm = permutation_pvalue(a, b, n_perm=n_perm, seed=seed)
    return CorrelationResult(
        rho=base.rho, p_parametric=base.p_parametric, n=base.n, p_permutation=p_perm
    )


def strength_label(result: CorrelationResult) -> Strength:
    """Strong iff rho > 0.7 and the smallest available p-value is < 0.05."""
    ps = [result.p_parametric]
    if result.p_permutation is not None:
        ps.append(result.p_permutation)
    if result.rho > 0.7 and min(ps) < 0.05:
        return Strength.STRONG
    return Strength.NOT_STRONG
