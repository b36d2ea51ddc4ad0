"""Acceptance gate: one test per criterion, one pass/fail line each.

Each test prints a single summary line (visible with `pytest -v -rA` or
`-s`) and asserts the criterion at its stated tolerance. The numbered
criteria cover KDE/LSA oracle equivalence, the Scott-bandwidth hand case,
the statistics suite, a synthetic two-distribution end-to-end scenario,
prioritization curve behavior, the mutation suite, desk-scale mutation
kill rates on the committed toy model, and the trace file format.
"""

import json
import math
import subprocess
import time
from pathlib import Path

import numpy as np
from scipy.stats import ttest_ind

from surprisekit.diststat import (
    js_divergence,
    permutation_pvalue,
    spearman,
    spearman_with_permutation,
)
from surprisekit.errors import FormatError, NotKillable
from surprisekit.mutation import (
    Criterion,
    KillConfig,
    MutationSpec,
    binary_search_rho,
    evaluate_kill,
    gaussian_fuzz,
    search_smallest_killable_rho,
    single_instance_kill,
    statistical_kill,
)
from surprisekit.nnrt import load_model, predict_batch
from surprisekit.prioritize import (
    cumulative_accuracy_curve,
    rank_by_lsa,
    select_top_k_correct,
)
from surprisekit.seeds import mix, rng_for
from surprisekit.surprise import fit_density_model, kde_fit, lsa_score, score_batch
from surprisekit.trace_store import (
    load_labels,
    load_manifest,
    read_trace_matrix,
    write_trace_matrix,
)

DATA = Path(__file__).parent / "data"
EXPORTER = Path(__file__).parent.parent / "exporter"


def report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"acceptance {num} ({name}): {'PASS' if ok else 'FAIL'} [{detail}]")
    assert ok, f"acceptance {num} ({name}): {detail}"


# ------------------------------------------------------------ criterion 1


def brute_force_lsa(train, x):
    """-log kernel-sum density via explicit inverse/slogdet, in extended
    precision and log space (independent of the Cholesky route)."""
    pts = np.asarray(train, dtype=np.longdouble)
    q = np.asarray(x, dtype=np.longdouble).ravel()
    n, d = pts.shape
    cov = np.atleast_2d(np.cov(np.asarray(train, dtype=np.float64), rowvar=False, ddof=1))
    h = cov.astype(np.longdouble) * np.longdouble(n) ** (-2.0 / (d + 4))
    inv = np.linalg.inv(h.astype(np.float64)).astype(np.longdouble)
    _, logdet = np.linalg.slogdet(h.astype(np.float64))
    diffs = pts - q
    maha = np.einsum("ij,jk,ik->i", diffs, inv, diffs)
    m = maha.min()
    logsum = -0.5 * m + np.log(np.exp(-0.5 * (maha - m)).sum())
    log_norm = 0.5 * (d * np.log(2.0 * np.longdouble(np.pi)) + np.longdouble(logdet))
    return float(-(logsum - np.log(np.longdouble(n)) - log_norm))


def random_point_set(rng, n: int, d: int) -> np.ndarray:
    """Rotated anisotropic Gaussian sample with bounded condition number."""
    q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    scales = rng.uniform(0.6, 1.8, size=d)
    return (rng.normal(size=(n, d)) * scales) @ q.T + rng.normal(size=d)


def test_acceptance_1_kde_lsa_oracle_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    checks = 0
    for trial in range(50):
        rng = np.random.default_rng(10_000 + trial)
        d = int(rng.integers(1, 6))
        n = int(rng.integers(d + 2, 101))
        pts = random_point_set(rng, n, d)
        kde = kde_fit(pts)
        for _ in range(4):
            x = pts[rng.integers(n)] + rng.normal(scale=1.5, size=d)
            got = lsa_score(kde, x)
            want = brute_force_lsa(pts, x)
            err = abs(got - want) / max(abs(want), 1.0)
            worst = max(worst, err)
            checks += 1
            assert math.isclose(got, want, rel_tol=1e-9, abs_tol=1e-12)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5.0
    report(1, "KDE/LSA oracle equivalence", ok,
           f"50 sets, {checks} queries, worst rel err {worst:.2e}, {elapsed:.2f}s")


# ------------------------------------------------------------ criterion 2


def test_acceptance_2_scott_bandwidth_hand_case():
    kde = kde_fit(np.array([[0.0], [1.0]]))
    h2_expected = 2.0 ** (-2.0 / 5.0) * 0.5
    h2_err = abs(kde.bandwidth_cov[0, 0] - h2_expected)
    # hand derivation: both kernels sit 0.5 away, so the density at 0.5 is
    # exp(-0.125/h^2) / sqrt(2 pi h^2) and the surprise is its -log
    lsa_hand = 0.5 * math.log(2.0 * math.pi * h2_expected) + 0.125 / h2_expected
    got = lsa_score(kde, [0.5])
    lsa_err = abs(got - lsa_hand)
    ok = h2_err < 1e-12 and lsa_err < 1e-9
    report(2, "Scott bandwidth hand case", ok,
           f"H err {h2_err:.2e}, LSA(0.5) = {got:.10f}, err {lsa_err:.2e}")


# ------------------------------------------------------------ criterion 3


def test_acceptance_3_statistics_suite():
    a = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    rho_up = spearman(a, np.exp(a)).rho
    rho_down = spearman(a, -(a**3)).rho
    # ranks of b are [2, 1, 4, 3, 5]: sum of squared differences = 4,
    # so rho = 1 - 6*4 / (5*24) = 0.8
    b = np.array([15.0, 5.0, 40.0, 30.0, 55.0])
    rho_08 = spearman(a, b).rho
    closed_forms = rho_up == 1.0 and rho_down == -1.0 and abs(rho_08 - 0.8) < 1e-15

    rng = np.random.default_rng(33)
    s = rng.normal(size=80)
    t = rng.normal(loc=1.0, scale=2.0, size=60)
    jsd_self = js_divergence(s, s.copy()).jsd
    jsd_ab = js_divergence(s, t)
    jsd_ba = js_divergence(t, s)
    jsd_props = (
        abs(jsd_self) <= 1e-9
        and 0.0 <= jsd_ab.jsd <= 1.0
        and jsd_ab.jsd == jsd_ba.jsd
    )

    x = np.arange(30.0)
    p_min = permutation_pvalue(x, 2.0 * x + 1.0, n_perm=10000, seed=0)
    perm_ok = p_min == 1.0 / 10001.0 and abs(p_min - 9.9e-5) < 2e-6

    ok = closed_forms and jsd_props and perm_ok
    report(3, "statistics suite", ok,
           f"rho {rho_up}/{rho_down}/{rho_08:.3f}, jsd self {jsd_self:.1e}, "
           f"sym exact, min perm p {p_min:.3e}")


# ------------------------------------------------------------ criteria 4 & 5

# fixed Gaussian mixture: 3 components in 16-D with distinct means/scales
_MIXTURE_RNG = np.random.default_rng(20240601)
MIX_MEANS = _MIXTURE_RNG.uniform(-3.0, 3.0, size=(3, 16))
MIX_SCALES = _MIXTURE_RNG.uniform(0.5, 1.5, size=3)
MIX_WEIGHTS = np.array([0.5, 0.3, 0.2])
MIX_SIGMA = float(
    np.sqrt(
        (MIX_WEIGHTS[:, None] * (MIX_SCALES[:, None] ** 2 + MIX_MEANS**2)).sum(axis=0)
        - ((MIX_WEIGHTS[:, None] * MIX_MEANS).sum(axis=0)) ** 2
    ).mean()
)


def sample_mixture(n: int, rng) -> np.ndarray:
    comp = rng.choice(3, size=n, p=MIX_WEIGHTS)
    return MIX_MEANS[comp] + rng.normal(size=(n, 16)) * MIX_SCALES[comp, None]


def scenario(seed: int):
    """Reference/surrogate fits plus a half-shifted test set for one seed."""
    ref = sample_mixture(500, rng_for(seed, 0))
    sur = sample_mixture(500, rng_for(seed, 1))
    rng_t = rng_for(seed, 2)
    test = np.vstack(
        [sample_mixture(200, rng_t), sample_mixture(200, rng_t) + 6.0 * MIX_SIGMA]
    )
    model_a = fit_density_model(ref)
    model_b = fit_density_model(sur)
    lsa_a = score_batch(model_a, test).values
    lsa_b = score_batch(model_b, test).values
    return lsa_a, lsa_b


def test_acceptance_4_synthetic_rq1_rq2():
    t0 = time.perf_counter()
    good = 0
    rhos = []
    jsds = []
    for seed in range(100):
        lsa_a, lsa_b = scenario(seed)
        # n_perm = 1999 is the smallest odd-shaped count whose minimum
        # p-value (1/2000) clears the < 0.001 requirement
        res = spearman_with_permutation(lsa_a, lsa_b, n_perm=1999, seed=mix(seed, 3))
        jsd = js_divergence(lsa_a, lsa_b).jsd
        rhos.append(res.rho)
        jsds.append(jsd)
        if res.rho > 0.9 and res.p_permutation < 0.001 and jsd < 0.1:
            good += 1
    elapsed = time.perf_counter() - t0
    ok = good >= 95 and elapsed < 60.0
    report(4, "synthetic reference-vs-surrogate end-to-end", ok,
           f"{good}/100 seeds, median rho {np.median(rhos):.3f}, "
           f"median jsd {np.median(jsds):.4f}, {elapsed:.1f}s")


def test_acceptance_5_prioritization_curves():
    seed = 0
    ref = sample_mixture(500, rng_for(seed, 0))
    rng_t = rng_for(seed, 2)
    test = np.vstack(
        [sample_mixture(200, rng_t), sample_mixture(200, rng_t) + 6.0 * MIX_SIGMA]
    )
    scores = score_batch(fit_density_model(ref), test).values
    # toy classifier: right on 95% of in-distribution inputs, 10% of shifted
    rng_c = rng_for(seed, 4)
    correct = np.concatenate([rng_c.random(200) < 0.95, rng_c.random(200) < 0.10])

    lsa_curve = cumulative_accuracy_curve(rank_by_lsa(scores), correct)
    random_order = rng_for(seed, 5).permutation(400)
    random_curve = cumulative_accuracy_curve(random_order, correct)

    overall = float(correct.sum()) / 400.0
    starts_below = (
        lsa_curve.acc[0] <= random_curve.acc[0]
        and lsa_curve.acc[9] < random_curve.acc[9]
        and lsa_curve.acc[24] < random_curve.acc[24]
        and lsa_curve.acc[:50].mean() < random_curve.acc[:50].mean()
    )
    final_exact = (
        lsa_curve.acc[-1] == overall and random_curve.acc[-1] == overall
    )
    ok = starts_below and final_exact
    report(5, "prioritization curve behavior", ok,
           f"lsa acc@25 {lsa_curve.acc[24]:.3f} < random {random_curve.acc[24]:.3f}, "
           f"final point exactly {overall}")


# ------------------------------------------------------------ criterion 6


def test_acceptance_6_mutation_suite():
    model = load_model(DATA / "toy_model.json")
    dense_layers = [i for i, l in enumerate(model.layers) if hasattr(l, "weights")]

    # identity: rho = 0, and sigma so small that 1 + eps rounds to 1
    id_rho = gaussian_fuzz(model, MutationSpec(rho=0.0, sigma=0.5, seed=1))
    id_sigma = gaussian_fuzz(model, MutationSpec(rho=1.0, sigma=1e-300, seed=1))
    identity_ok = all(
        model.layers[i].weights.tobytes() == m.layers[i].weights.tobytes()
        and model.layers[i].bias.tobytes() == m.layers[i].bias.tobytes()
        for m in (id_rho, id_sigma)
        for i in dense_layers
    )

    # selection fraction on 1e5 weights
    rng = np.random.default_rng(5)
    big = np.ones((500, 200)) + rng.normal(scale=0.1, size=(500, 200))
    from surprisekit.nnrt import DenseLayer, NeuralModel, validate_model

    wide = validate_model(
        NeuralModel(
            layers=(DenseLayer(weights=big, bias=np.zeros(500)),),
            input_dim=200,
            num_classes=500,
        )
    )
    rho = 0.3
    mut = gaussian_fuzz(wide, MutationSpec(rho=rho, sigma=0.5, seed=6))
    changed = int(np.sum(mut.layers[0].weights != big))
    bound = 3.0 * math.sqrt(big.size * rho * (1.0 - rho))
    fraction_ok = abs(changed - big.size * rho) <= bound

    # single-instance truth table: flip kills, no flip doesn't, a fix doesn't
    tt_ok = (
        single_instance_kill([0, 1], [0, 0], [0, 1]).killed is True
        and single_instance_kill([0, 1], [0, 1], [0, 1]).killed is False
        and single_instance_kill([0, 0], [0, 1], [0, 1]).killed is False
    )

    # statistical kill against an independent Welch oracle
    stat_err = 0.0
    for trial in range(25):
        r = np.random.default_rng(400 + trial)
        orig = np.clip(r.normal(0.9, 0.05, 24), 0.0, 1.0)
        mutant = np.clip(r.normal(0.8, 0.08, 24), 0.0, 1.0)
        verdict = statistical_kill(orig, mutant)
        oracle_p = ttest_ind(orig, mutant, equal_var=False).pvalue
        stat_err = max(stat_err, abs(verdict.p_value - oracle_p))
    stat_ok = stat_err <= 1e-6

    # bisection: planted threshold at 0.3, bracket width 2^-10
    found = search_smallest_killable_rho(lambda r: r >= 0.3, iters=10)
    plant_ok = 0.3 <= found.rho_star < 0.3 + 2.0**-10

    # unkillable stub: truth never matches the original model's predictions
    points = read_trace_matrix(DATA / "points.atrc")[:30]
    anti = 1 - predict_batch(model, points).predictions[0]
    cfg = KillConfig(criterion=Criterion.SINGLE_INSTANCE)
    try:
        binary_search_rho(model, points, anti, sigma=0.5, iters=3, kill_eval=cfg, seed=1)
        unkillable_ok = False
    except NotKillable:
        unkillable_ok = True

    ok = identity_ok and fraction_ok and tt_ok and stat_ok and plant_ok and unkillable_ok
    report(6, "mutation suite", ok,
           f"identity bit-exact, selection |{changed} - {int(big.size * rho)}| <= {bound:.0f}, "
           f"truth table exact, welch err {stat_err:.1e}, "
           f"rho* {found.rho_star:.6f}, NotKillable raised")


# ------------------------------------------------------------ criterion 7


def test_acceptance_7_mutation_end_to_end():
    t0 = time.perf_counter()
    model = load_model(DATA / "toy_model.json")
    train = read_trace_matrix(DATA / "train.atrc")
    points = read_trace_matrix(DATA / "points.atrc")
    labels = load_labels(DATA / "labels.atrc", num_classes=2)
    assert points.shape[0] == 200

    density = fit_density_model(predict_batch(model, train).penultimate)
    test_batch = predict_batch(model, points)
    scores = score_batch(density, test_batch.penultimate)
    correct = test_batch.predictions[0] == labels
    sel = select_top_k_correct(rank_by_lsa(scores), correct, 30)
    assert not sel.shortfall
    sub_x = points[sel.indices]
    sub_t = labels[sel.indices]

    cfg_single = KillConfig(criterion=Criterion.SINGLE_INSTANCE)
    cfg_stat = KillConfig(criterion=Criterion.STATISTICAL)
    single = stat = 0
    for i in range(100):
        mutant = gaussian_fuzz(model, MutationSpec(rho=0.5, sigma=0.5, seed=900 + i))
        single += evaluate_kill(model, mutant, sub_x, sub_t, cfg_single).killed
        stat += evaluate_kill(model, mutant, sub_x, sub_t, cfg_stat).killed

    rho0_killed = False
    for i in range(10):
        null = gaussian_fuzz(model, MutationSpec(rho=0.0, sigma=0.5, seed=900 + i))
        rho0_killed |= evaluate_kill(model, null, sub_x, sub_t, cfg_single).killed
        rho0_killed |= evaluate_kill(model, null, sub_x, sub_t, cfg_stat).killed

    elapsed = time.perf_counter() - t0
    ok = single >= 90 and stat >= 90 and not rho0_killed and elapsed < 30.0
    report(7, "desk-scale mutation kill rates", ok,
           f"single {single}/100, statistical {stat}/100, rho=0 killed {rho0_killed}, "
           f"{elapsed:.1f}s")


# ------------------------------------------------------------ criterion 8


def test_acceptance_8_trace_format(tmp_path):
    rng = np.random.default_rng(99)
    path = tmp_path / "roundtrip.atrc"
    exact = 0
    for trial in range(1000):
        if trial == 0:
            rows, cols = 0, 3  # zero-row edge case
        elif trial == 1:
            rows, cols = 17, 1  # one-column edge case
        else:
            rows = int(rng.integers(0, 40))
            cols = int(rng.integers(1, 20))
        dtype = np.float32 if rng.random() < 0.5 else np.float64
        m = rng.normal(size=(rows, cols)).astype(dtype)
        write_trace_matrix(m, path)
        back = read_trace_matrix(path)
        if back.dtype == m.dtype and back.shape == m.shape and back.tobytes() == m.tobytes():
            exact += 1

    write_trace_matrix(np.ones((2, 2)), path)
    good = bytearray(path.read_bytes())
    kinds = []
    for corrupt, expected in (
        (lambda b: b.__setitem__(slice(0, 4), b"WAT?"), "magic"),
        (lambda b: b.__setitem__(6, 9), "dtype"),
        (lambda b: b.__delitem__(slice(-8, None)), "length"),
    ):
        raw = bytearray(good)
        corrupt(raw)
        path.write_bytes(bytes(raw))
        try:
            read_trace_matrix(path)
            kinds.append(None)
        except FormatError as e:
            kinds.append(e.kind)
    ok = exact == 1000 and kinds == ["magic", "dtype", "length"]
    report(8, "trace format round-trip", ok,
           f"{exact}/1000 bit-exact, malformed kinds {kinds}")


# ------------------------------------------------------------ criterion 9


def test_acceptance_9_cross_language_export(tmp_path):
    labels = ["ant", "bee", "cat"]
    per_label = 8
    rng = np.random.default_rng(555)
    for label in labels:
        d = tmp_path / "images" / label
        d.mkdir(parents=True)
        for k in range(per_label):
            pixels = rng.integers(0, 256, size=64, dtype=np.uint8).tobytes()
            (d / f"img_{k}.pgm").write_bytes(b"P5\n8 8\n255\n" + pixels)

    out_dir = tmp_path / "export"
    proc = subprocess.run(
        [
            "node", str(EXPORTER / "dist" / "cli.js"), "export-traces",
            "--model", str(EXPORTER / "fixtures" / "stub_classifier.json"),
            "--images", str(tmp_path / "images"),
            "--out", str(out_dir),
            "--input-size", "8x8",
            "--name", "stub-export",
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    echo = json.loads(proc.stdout.strip().splitlines()[-1])
    assert echo["labels"] == labels

    # load_manifest itself verifies every file parses and row counts match
    manifest = load_manifest(out_dir / "manifest.json")
    dims_ok = True
    for i, label in enumerate(labels):
        entry = manifest.entry(label)
        traces = manifest.load_traces(entry)
        logits = manifest.load_logits(entry)
        truth = manifest.load_true_labels(entry)
        dims_ok &= entry.count == per_label and entry.class_index == i
        dims_ok &= traces.shape == (per_label, 12) and traces.dtype == np.float32
        dims_ok &= logits.shape == (per_label, 3)
        dims_ok &= bool(np.all(truth == i))

    density = fit_density_model(manifest.load_traces(manifest.entry("ant")))
    scores = score_batch(density, manifest.load_traces(manifest.entry("bee")))
    scored_ok = scores.values.shape == (per_label,) and np.all(np.isfinite(scores.values))

    ok = dims_ok and bool(scored_ok)
    report(9, "cross-language export boundary", ok,
           f"3 labels x {per_label} images, traces {per_label}x12 f32, "
           f"scored fine, median LSA {np.median(scores.values):.2f}")
