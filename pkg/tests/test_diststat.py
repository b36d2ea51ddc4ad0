import numpy as np
import pytest
from scipy.spatial.distance import jensenshannon
from scipy.stats import gaussian_kde, rankdata, spearmanr
from scipy.stats import t as student_t

from surprisekit.diststat import (
    CorrelationResult,
    Strength,
    average_ranks,
    js_divergence,
    kde_curve_1d,
    permutation_pvalue,
    scott_bandwidth_1d,
    spearman,
    spearman_with_permutation,
    strength_label,
    student_t_sf_two_sided,
)
from surprisekit.errors import DegenerateData, InsufficientData, ShapeError

RNG = np.random.default_rng(2718)

# ranks of B are [2, 1, 4, 3, 5]: sum of squared rank differences = 4
RHO_08_A = np.array([10.0, 20.0, 30.0, 40.0, 50.0])
RHO_08_B = np.array([15.0, 5.0, 40.0, 30.0, 55.0])


def test_scott_bandwidth_formula():
    v = RNG.normal(size=40)
    assert scott_bandwidth_1d(v) == pytest.approx(
        40 ** (-0.2) * v.std(ddof=1), rel=1e-15
    )


def test_curve_integrates_to_one():
    curve = kde_curve_1d(RNG.normal(size=100))
    assert np.trapezoid(curve.ys, curve.xs) == pytest.approx(1.0, abs=1e-12)
    assert np.all(curve.ys >= 0.0)


def test_curve_grid_span_and_size():
    v = RNG.normal(size=50)
    h = scott_bandwidth_1d(v)
    curve = kde_curve_1d(v, grid_size=256)
    assert curve.xs.size == 256
    assert curve.ys.size == 256
    assert curve.xs[0] == pytest.approx(v.min() - 3.0 * h, rel=1e-15)
    assert curve.xs[-1] == pytest.approx(v.max() + 3.0 * h, rel=1e-15)
    assert np.all(np.diff(curve.xs) > 0)


def test_curve_matches_scipy_shape():
    v = RNG.normal(size=80)
    curve = kde_curve_1d(v, grid_size=512)
    ref = gaussian_kde(v)(curve.xs)  # identical Scott bandwidth in 1-D
    ref = ref / np.trapezoid(ref, curve.xs)
    assert np.allclose(curve.ys, ref, rtol=1e-10)


def test_curve_input_validation():
    with pytest.raises(ValueError):
        kde_curve_1d(RNG.normal(size=30), grid_size=8)
    with pytest.raises(InsufficientData):
        kde_curve_1d([1.0])
    with pytest.raises(DegenerateData):
        kde_curve_1d([2.0, 2.0, 2.0])


def reference_jsd(a, b, grid_size=1000):
    """Independent JSD from the definition, same grid rule."""
    ha = len(a) ** (-0.2) * np.std(a, ddof=1)
    hb = len(b) ** (-0.2) * np.std(b, ddof=1)
    pad = 3.0 * max(ha, hb)
    xs = np.linspace(min(a.min(), b.min()) - pad, max(a.max(), b.max()) + pad, grid_size)

    def pmf(v, h):
        y = np.exp(-0.5 * ((xs[:, None] - v[None, :]) / h) ** 2).sum(axis=1)
        return y / y.sum()

    return jensenshannon(pmf(a, ha), pmf(b, hb), base=2) ** 2


def test_jsd_matches_independent_oracle():
    a = RNG.normal(size=120)
    b = RNG.normal(loc=0.8, size=90)
    got = js_divergence(a, b, standardized=False)
    assert got.jsd == pytest.approx(reference_jsd(a, b), abs=1e-12)
    assert got.grid_size == 1000
    assert not got.standardized


def test_jsd_identity_is_zero():
    a = RNG.normal(size=60)
    assert js_divergence(a, a.copy()).jsd == 0.0


def test_jsd_symmetry_exact():
    a = RNG.normal(size=70)
    b = RNG.normal(loc=2.0, scale=0.5, size=50)
    assert js_divergence(a, b).jsd == js_divergence(b, a).jsd


def test_jsd_bounds():
    a = RNG.normal(size=40)
    b = RNG.normal(size=40) + 100.0  # essentially disjoint supports
    d = js_divergence(a, b, standardized=False).jsd
    assert 0.0 <= d <= 1.0
    assert d > 0.99


def test_jsd_standardized_ignores_location_and_scale():
    a = RNG.normal(size=100)
    b = RNG.normal(size=100)
    base = js_divergence(a, b).jsd
    moved = js_divergence(5.0 * a + 3.0, 5.0 * b + 3.0).jsd
    assert moved == pytest.approx(base, abs=1e-9)
    # without standardization a pure shift looks like divergence
    assert js_divergence(a, a + 10.0, standardized=False).jsd > 0.9
    assert js_divergence(a, a + 10.0, standardized=True).jsd == pytest.approx(0.0, abs=1e-12)


def test_jsd_grid_size_validation():
    with pytest.raises(ValueError):
        js_divergence(RNG.normal(size=10), RNG.normal(size=10), grid_size=4)


def test_average_ranks_match_scipy():
    v = np.array([3.0, 1.0, 3.0, 2.0, 3.0, 1.0])
    assert np.array_equal(average_ranks(v), rankdata(v, method="average"))
    w = RNG.integers(0, 5, size=50).astype(float)
    assert np.array_equal(average_ranks(w), rankdata(w, method="average"))


def test_student_t_sf_matches_scipy():
    for t in [0.0, 0.5, 2.1, -3.7, 10.0]:
        for dof in [1, 3, 18, 100]:
            want = 2.0 * student_t.sf(abs(t), dof)
            assert student_t_sf_two_sided(t, dof) == pytest.approx(want, abs=1e-14)
    assert student_t_sf_two_sided(np.inf, 5) == 0.0


def test_spearman_perfect_monotone():
    a = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    r = spearman(a, np.exp(a))  # nonlinear but monotone
    assert r.rho == 1.0
    assert r.p_parametric == 0.0
    rev = spearman(a, -(a**3))
    assert rev.rho == -1.0
    assert rev.p_parametric == 0.0


def test_spearman_closed_form_point_eight():
    r = spearman(RHO_08_A, RHO_08_B)
    assert r.rho == pytest.approx(0.8, abs=1e-15)
    assert r.n == 5


def test_spearman_matches_scipy_with_ties():
    a = RNG.integers(0, 8, size=60).astype(float)
    b = a + RNG.normal(scale=2.0, size=60)
    b[::7] = b[3]  # inject ties on both sides
    r = spearman(a, b)
    want_rho, want_p = spearmanr(a, b)
    assert r.rho == pytest.approx(want_rho, abs=1e-12)
    assert r.p_parametric == pytest.approx(want_p, abs=1e-12)


def test_spearman_input_validation():
    with pytest.raises(ShapeError):
        spearman([1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(InsufficientData):
        spearman([1.0, 2.0], [2.0, 1.0])
    with pytest.raises(DegenerateData):
        spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


def test_permutation_minimum_p():
    a = np.arange(30.0)
    p = permutation_pvalue(a, a * 2.0 + 1.0, n_perm=199, seed=0)
    assert p == 1.0 / 200.0


def test_permutation_deterministic_per_seed():
    a = RNG.normal(size=40)
    b = a + RNG.normal(scale=1.5, size=40)
    p1 = permutation_pvalue(a, b, n_perm=99, seed=7)
    p2 = permutation_pvalue(a, b, n_perm=99, seed=7)
    assert p1 == p2
    assert 1.0 / 100.0 <= p1 <= 1.0


def test_permutation_uncorrelated_is_insignificant():
    rng = np.random.default_rng(12)
    a = rng.normal(size=60)
    b = rng.normal(size=60)
    p = permutation_pvalue(a, b, n_perm=199, seed=3)
    assert p > 0.05


def test_permutation_validation():
    with pytest.raises(ValueError):
        permutation_pvalue([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], n_perm=0, seed=0)


def test_spearman_with_permutation_carries_both():
    a = np.arange(20.0)
    r = spearman_with_permutation(a, a**2, n_perm=99, seed=1)
    assert r.rho == 1.0
    assert r.p_parametric == 0.0
    assert r.p_permutation == 1.0 / 100.0


def test_strength_thresholds_are_strict():
    assert strength_label(CorrelationResult(0.71, 0.04, 10)) is Strength.STRONG
    assert strength_label(CorrelationResult(0.7, 0.001, 10)) is Strength.NOT_STRONG
    assert strength_label(CorrelationResult(0.9, 0.05, 10)) is Strength.NOT_STRONG
    assert strength_label(CorrelationResult(-0.99, 0.0, 10)) is Strength.NOT_STRONG


def test_strength_uses_smallest_available_p():
    weak_param = CorrelationResult(0.8, 0.2, 10, p_permutation=0.01)
    assert strength_label(weak_param) is Strength.STRONG
    no_perm = CorrelationResult(0.8, 0.2, 10)
    assert strength_label(no_perm) is Strength.NOT_STRONG
