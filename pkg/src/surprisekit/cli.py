"""`sk` command line: manifests in, JSON/CSV reports out.

Subcommands mirror the analysis pipeline: `lsa fit`/`lsa score` fit and
apply density models, `dist compare`/`corr` compare two score sets,
`prioritize` ranks inputs, `mutate fuzz`/`kill`/`search` drive mutation
testing, and `rq1`/`rq2`/`rq3` run the end-to-end recipes.

Every report embeds the resolved run configuration; reports are
byte-identical for the same argv and seed when --deterministic is set
(it drops the one nondeterministic field, the timestamp). Randomized
steps echo their seeds both in the report and on stdout. Exit codes:
0 success, 1 module error (single JSON line on stderr), 2 usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

import numpy as np

from .diststat import (
    js_divergence,
    kde_curve_1d,
    spearman,
    spearman_with_permutation,
    strength_label,
)
from .errors import SurpriseKitError, NotKillable
from .mutation import (
    Criterion,
    KillConfig,
    MutationSpec,
    binary_search_rho,
    evaluate_kill,
    gaussian_fuzz,
)
from .nnrt import load_model, predict_batch, save_model
from .preprocess import zscore
from .prioritize import (
    SUBSET_PRESETS,
    cumulative_accuracy_curve,
    rank_by_lsa,
    select_top_k_correct,
)
from .seeds import mix, rng_for
from .surprise import (
    DensityConfig,
    LsaScores,
    fit_density_model,
    load_density_model,
    save_density_model,
    score_batch,
)
from .trace_store import load_labels, load_manifest, read_trace_matrix


@dataclass(frozen=True)
class RunConfig:
    """Resolved knobs of one invocation, embedded in every report."""

    command: str
    reference_manifest: str | None = None
    surrogate_manifest: str | None = None
    test_manifest: str | None = None
    label: str | None = None
    variance_threshold: float | None = None
    pca_k: int | None = None
    grid_size: int | None = None
    standardized: bool | None = None
    n_perm: int | None = None
    seed: int | None = None
    subset_sizes: list | None = None
    rho: float | None = None
    sigma: float | None = None
    iters: int | None = None
    alpha: float | None = None
    d_min: float | None = None
    passes: int | None = None
    dropout_seed: int | None = None
    mutants: int | None = None
    criterion: str | None = None
    out: str | None = None

    @staticmethod
    def from_args(command: str, args: argparse.Namespace) -> "RunConfig":
        fields = {
            "reference_manifest": "ref",
            "surrogate_manifest": "surrogate",
            "test_manifest": "test_manifest",
            "label": "label",
            "variance_threshold": "variance_threshold",
            "pca_k": "pca_k",
            "grid_size": "grid_size",
            "standardized": "standardized",
            "n_perm": "n_perm",
            "seed": "seed",
            "subset_sizes": "subset_sizes",
            "rho": "rho",
            "sigma": "sigma",
            "iters": "iters",
            "alpha": "alpha",
            "d_min": "d_min",
            "passes": "passes",
            "dropout_seed": "dropout_seed",
            "mutants": "mutants",
            "criterion": "criterion",
            "out": "out",
        }
        values = {}
        for field_name, attr in fields.items():
            v = getattr(args, attr, None)
            if isinstance(v, Path):
                v = str(v)
            values[field_name] = v
        return RunConfig(command=command, **values)


def _jsonify(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON-serializable: {type(obj).__name__}")


def _write_json(obj, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonify)
        fh.write("\n")
    return path


def _write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _report(command: str, args: argparse.Namespace, payload: dict) -> dict:
    report = dict(payload)
    report["config"] = asdict(RunConfig.from_args(command, args))
    if not args.deterministic:
        report["generated_at"] = datetime.now(timezone.utc).isoformat()
    return report


def _echo(written, seed: int | None = None) -> None:
    line = {"written": [str(p) for p in written]}
    if seed is not None:
        line["seed"] = seed
    print(json.dumps(line, sort_keys=True))


def _load_scores(path) -> LsaScores:
    with open(path, "r", encoding="utf-8") as fh:
        return LsaScores.from_json(json.load(fh))


def _manifest_traces(manifest_path, label: str) -> np.ndarray:
    manifest = load_manifest(manifest_path)
    return manifest.load_traces(manifest.entry(label))


def _density_config(args) -> DensityConfig:
    return DensityConfig(
        variance_threshold=args.variance_threshold, pca_k=args.pca_k
    )


def _traces_from_args(args) -> tuple[np.ndarray, str]:
    if args.traces is not None:
        return read_trace_matrix(args.traces), Path(args.traces).stem
    if args.manifest is not None and args.label is not None:
        return _manifest_traces(args.manifest, args.label), args.label
    args._parser.error("provide either --traces or --manifest with --label")


def _curve_rows(curve) -> list:
    # csv stringifies Python floats with repr, the shortest round-trip form.
    return [(float(x), float(y)) for x, y in zip(curve.xs, curve.ys)]


def _accuracy_rows(curve) -> list:
    return [(int(k), float(a)) for k, a in zip(curve.ks, curve.acc)]


# ---------------------------------------------------------------- lsa


def cmd_lsa_fit(args) -> int:
    traces, source_id = _traces_from_args(args)
    model = fit_density_model(traces, _density_config(args), model_id=source_id)
    out = Path(args.out)
    save_density_model(model, out)
    report = _report(
        "lsa fit",
        args,
        {
            "model_id": model.model_id,
            "n_train": model.kde.n,
            "input_dim": model.input_dim,
            "kept_columns": model.mask.kept_count,
            "pca_k": model.pca.k,
        },
    )
    paths = [_write_json(report, out / "fit_report.json")]
    _echo([out] + paths)
    return 0


def cmd_lsa_score(args) -> int:
    model = load_density_model(args.model)
    traces, source_id = _traces_from_args(args)
    scores = score_batch(model, traces, dataset_id=source_id)
    out = Path(args.out)
    payload = scores.to_json()
    payload["n"] = len(scores)
    _write_json(_report("lsa score", args, payload), out)
    _echo([out])
    return 0


# ---------------------------------------------------------------- dist / corr


def cmd_dist_compare(args) -> int:
    a = _load_scores(args.a)
    b = _load_scores(args.b)
    standardized = not args.raw
    res = js_divergence(
        a.values, b.values, standardized=standardized, grid_size=args.grid_size
    )
    out = Path(args.out)
    args.standardized = standardized
    report = _report(
        "dist compare",
        args,
        {
            "jsd": res.jsd,
            "grid_size": res.grid_size,
            "standardized": res.standardized,
            "n_a": len(a),
            "n_b": len(b),
            "a": {"model_id": a.model_id, "dataset_id": a.dataset_id},
            "b": {"model_id": b.model_id, "dataset_id": b.dataset_id},
        },
    )
    written = [_write_json(report, out / "divergence.json")]
    for name, sample in (("a", a.values), ("b", b.values)):
        curve = kde_curve_1d(zscore(sample) if standardized else sample)
        written.append(
            _write_csv(out / f"curve_{name}.csv", ("xs", "ys"), _curve_rows(curve))
        )
    _echo(written)
    return 0


def cmd_corr(args) -> int:
    a = _load_scores(args.a)
    b = _load_scores(args.b)
    if args.n_perm > 0:
        res = spearman_with_permutation(
            a.values, b.values, n_perm=args.n_perm, seed=args.seed
        )
    else:
        res = spearman(a.values, b.values)
    out = Path(args.out)
    report = _report(
        "corr",
        args,
        {
            "rho": res.rho,
            "p_parametric": res.p_parametric,
            "p_permutation": res.p_permutation,
            "n": res.n,
            "strength": strength_label(res),
        },
    )
    _write_json(report, out)
    _echo([out], seed=args.seed)
    return 0


# ---------------------------------------------------------------- prioritize


def _correct_vector(args, n: int) -> np.ndarray:
    if args.correct is not None:
        with open(args.correct, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if isinstance(data, dict):
            data = data["correct"]
        return np.asarray(data).astype(bool)
    if args.manifest is not None and args.label is not None:
        manifest = load_manifest(args.manifest)
        entry = manifest.entry(args.label)
        logits = manifest.load_logits(entry)
        truth = manifest.load_true_labels(entry)
        return np.argmax(logits, axis=1) == truth
    args._parser.error("provide either --correct or --manifest with --label")


def _subset_sizes(args) -> list[int]:
    sizes = list(args.subset or [])
    if args.subset_preset is not None:
        sizes.extend(SUBSET_PRESETS[args.subset_preset])
    return sizes


def cmd_prioritize(args) -> int:
    scores = _load_scores(args.scores)
    correct = _correct_vector(args, len(scores))
    ranking = rank_by_lsa(scores)
    curve = cumulative_accuracy_curve(ranking, correct)
    out = Path(args.out)
    written = [_write_csv(out / "curve.csv", ("k", "accuracy"), _accuracy_rows(curve))]
    selections = {}
    sizes = _subset_sizes(args)
    args.subset_sizes = sizes or None
    for k in sizes:
        sel = select_top_k_correct(ranking, correct, k)
        selections[str(k)] = {
            "indices": sel.indices.tolist(),
            "shortfall": sel.shortfall,
        }
    report = _report(
        "prioritize",
        args,
        {
            "order": ranking.order.tolist(),
            "overall_accuracy": float(correct.mean()) if correct.size else 0.0,
            "n": int(correct.size),
            "selections": selections,
        },
    )
    written.insert(0, _write_json(report, out / "ranking.json"))
    _echo(written)
    return 0


# ---------------------------------------------------------------- mutate


def _criterion(name: str) -> Criterion:
    return {
        "single": Criterion.SINGLE_INSTANCE,
        "statistical": Criterion.STATISTICAL,
    }[name]


def _kill_config(args) -> KillConfig:
    return KillConfig(
        criterion=_criterion(args.criterion),
        alpha=args.alpha,
        d_min=args.d_min,
        passes=args.passes,
        dropout_seed=args.dropout_seed,
    )


def cmd_mutate_fuzz(args) -> int:
    model = load_model(args.model)
    spec = MutationSpec(rho=args.rho, sigma=args.sigma, seed=args.seed)
    mutant = gaussian_fuzz(model, spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(mutant, out)
    _echo([out], seed=args.seed)
    return 0


def cmd_mutate_kill(args) -> int:
    model = load_model(args.model)
    if args.mutant is not None:
        mutant = load_model(args.mutant)
    elif args.rho is not None:
        mutant = gaussian_fuzz(
            model, MutationSpec(rho=args.rho, sigma=args.sigma, seed=args.seed)
        )
    else:
        args._parser.error("provide either --mutant or --rho")
    inputs = read_trace_matrix(args.inputs)
    truth = load_labels(args.truth, num_classes=model.num_classes)
    verdict = evaluate_kill(model, mutant, inputs, truth, _kill_config(args))
    out = Path(args.out)
    report = _report(
        "mutate kill",
        args,
        {
            "label": args.label,
            "criterion": verdict.criterion,
            "subset_size": int(inputs.shape[0]),
            "source": args.source,
            "killed": verdict.killed,
            "p_value": verdict.p_value,
            "effect_size": verdict.effect_size,
            "rho_star": None,
            "details": verdict.details,
        },
    )
    _write_json(report, out)
    _echo([out], seed=args.seed)
    return 0


def cmd_mutate_search(args) -> int:
    model = load_model(args.model)
    inputs = read_trace_matrix(args.inputs)
    truth = load_labels(args.truth, num_classes=model.num_classes)
    payload = {
        "label": args.label,
        "criterion": args.criterion,
        "subset_size": int(inputs.shape[0]),
        "source": args.source,
    }
    try:
        res = binary_search_rho(
            model,
            inputs,
            truth,
            sigma=args.sigma,
            iters=args.iters,
            kill_eval=_kill_config(args),
            seed=args.seed,
        )
    except NotKillable:
        # An unkillable configuration is a legitimate finding, not a crash.
        payload.update({"killable": False, "killed": False, "rho_star": None, "trace": []})
    else:
        payload.update(
            {
                "killable": True,
                "killed": True,
                "rho_star": res.rho_star,
                "trace": [[r, k] for r, k in res.trace],
                "non_monotone": res.non_monotone,
            }
        )
    out = Path(args.out)
    _write_json(_report("mutate search", args, payload), out)
    _echo([out], seed=args.seed)
    return 0


# ---------------------------------------------------------------- rq recipes


def _shared_labels(ref, surrogate, test) -> list[str]:
    sur_labels = {e.label for e in surrogate.entries}
    test_labels = {e.label for e in test.entries}
    return [
        e.label
        for e in ref.entries
        if e.label in sur_labels and e.label in test_labels
    ]


def _fit_and_score_pair(args, label: str):
    """Fit reference and surrogate densities for one label and score the
    shared test traces with both."""
    ref = load_manifest(args.ref)
    surrogate = load_manifest(args.surrogate)
    test = load_manifest(args.test_manifest)
    config = _density_config(args)
    model_a = fit_density_model(
        ref.load_traces(ref.entry(label)), config, model_id=f"ref:{label}"
    )
    model_b = fit_density_model(
        surrogate.load_traces(surrogate.entry(label)), config, model_id=f"sur:{label}"
    )
    test_traces = test.load_traces(test.entry(label))
    scores_a = score_batch(model_a, test_traces, dataset_id=label)
    scores_b = score_batch(model_b, test_traces, dataset_id=label)
    return scores_a, scores_b


def cmd_rq1(args) -> int:
    ref = load_manifest(args.ref)
    surrogate = load_manifest(args.surrogate)
    test = load_manifest(args.test_manifest)
    labels = _shared_labels(ref, surrogate, test)
    out = Path(args.out)
    written = []
    standardized = not args.raw
    args.standardized = standardized
    per_label = {}
    for label in labels:
        scores_a, scores_b = _fit_and_score_pair(args, label)
        res = js_divergence(
            scores_a.values,
            scores_b.values,
            standardized=standardized,
            grid_size=args.grid_size,
        )
        per_label[label] = {
            "jsd": res.jsd,
            "n_test": len(scores_a),
        }
        for side, scores in (("ref", scores_a), ("sur", scores_b)):
            values = zscore(scores.values) if standardized else scores.values
            curve = kde_curve_1d(values, grid_size=args.grid_size)
            written.append(
                _write_csv(
                    out / f"curve_{label}_{side}.csv", ("xs", "ys"), _curve_rows(curve)
                )
            )
    report = _report("rq1", args, {"labels": per_label, "skipped": _skipped(ref, labels)})
    written.insert(0, _write_json(report, out / "rq1.json"))
    _echo(written)
    return 0


def _skipped(ref, labels) -> list[str]:
    return [e.label for e in ref.entries if e.label not in labels]


def cmd_rq2(args) -> int:
    ref = load_manifest(args.ref)
    surrogate = load_manifest(args.surrogate)
    test = load_manifest(args.test_manifest)
    labels = _shared_labels(ref, surrogate, test)
    per_label = {}
    for i, label in enumerate(labels):
        scores_a, scores_b = _fit_and_score_pair(args, label)
        if args.n_perm > 0:
            res = spearman_with_permutation(
                scores_a.values,
                scores_b.values,
                n_perm=args.n_perm,
                seed=mix(args.seed, i),
            )
        else:
            res = spearman(scores_a.values, scores_b.values)
        per_label[label] = {
            "rho": res.rho,
            "p_parametric": res.p_parametric,
            "p_permutation": res.p_permutation,
            "n": res.n,
            "strength": strength_label(res),
        }
    out = Path(args.out)
    report = _report(
        "rq2", args, {"labels": per_label, "skipped": _skipped(ref, labels)}
    )
    _write_json(report, out)
    _echo([out], seed=args.seed)
    return 0


def _rq3_paths(args) -> dict:
    return {
        "model": args.model,
        "train": args.train,
        "test": args.test,
        "truth": args.truth,
    }


def _rq3_pipeline(args):
    """Common RQ3 plumbing: run the classifier, fit the density on the
    training inputs' penultimate traces, and score/rank the test set."""
    model = load_model(args.model)
    train = read_trace_matrix(args.train)
    test = read_trace_matrix(args.test)
    truth = load_labels(args.truth, num_classes=model.num_classes)
    if truth.size != test.shape[0]:
        raise SurpriseKitError(
            f"truth has {truth.size} labels for {test.shape[0]} test rows"
        )
    train_batch = predict_batch(model, train)
    test_batch = predict_batch(model, test)
    density = fit_density_model(
        train_batch.penultimate, _density_config(args), model_id="train"
    )
    scores = score_batch(density, test_batch.penultimate, dataset_id="test")
    ranking = rank_by_lsa(scores)
    correct = test_batch.predictions[0] == truth
    return model, test, truth, ranking, correct


def cmd_rq3_accuracy(args) -> int:
    _, _, _, ranking, correct = _rq3_pipeline(args)
    curve = cumulative_accuracy_curve(ranking, correct)
    order = rng_for(args.seed).permutation(correct.size)
    random_curve = cumulative_accuracy_curve(order, correct)
    out = Path(args.out)
    written = [
        _write_csv(out / "curve.csv", ("k", "accuracy"), _accuracy_rows(curve)),
        _write_csv(
            out / "random_curve.csv", ("k", "accuracy"), _accuracy_rows(random_curve)
        ),
    ]
    report = _report(
        "rq3 accuracy",
        args,
        {
            "overall_accuracy": float(correct.mean()),
            "n": int(correct.size),
            "order": ranking.order.tolist(),
            "paths": _rq3_paths(args),
        },
    )
    written.insert(0, _write_json(report, out / "rq3_accuracy.json"))
    _echo(written, seed=args.seed)
    return 0


def cmd_rq3_kill(args) -> int:
    model, test, truth, ranking, correct = _rq3_pipeline(args)
    sizes = _subset_sizes(args) or [30]
    args.subset_sizes = sizes
    criteria = (
        [Criterion.SINGLE_INSTANCE, Criterion.STATISTICAL]
        if args.criterion == "both"
        else [_criterion(args.criterion)]
    )
    records = []
    aggregate_rows = []
    subsets = {}
    for size in sizes:
        sel = select_top_k_correct(ranking, correct, size)
        sub_inputs = test[sel.indices]
        sub_truth = truth[sel.indices]
        subsets[str(size)] = {
            "indices": sel.indices.tolist(),
            "shortfall": sel.shortfall,
        }
        for criterion in criteria:
            config = KillConfig(
                criterion=criterion,
                alpha=args.alpha,
                d_min=args.d_min,
                passes=args.passes,
                dropout_seed=args.dropout_seed,
            )
            kills = 0
            for m in range(args.mutants):
                spec = MutationSpec(
                    rho=args.rho, sigma=args.sigma, seed=mix(args.seed, m)
                )
                mutant = gaussian_fuzz(model, spec)
                verdict = evaluate_kill(model, mutant, sub_inputs, sub_truth, config)
                kills += int(verdict.killed)
                records.append(
                    {
                        "label": args.label,
                        "criterion": criterion,
                        "subset_size": size,
                        "source": args.source,
                        "killed": verdict.killed,
                        "p_value": verdict.p_value,
                        "effect_size": verdict.effect_size,
                        "rho_star": None,
                        "mutation_seed_index": m,
                    }
                )
            aggregate_rows.append(
                (size, criterion.value, kills, args.mutants, kills / args.mutants)
            )
    out = Path(args.out)
    report = _report(
        "rq3 kill",
        args,
        {
            "subsets": subsets,
            "paths": _rq3_paths(args),
            "records": records,
            "aggregate": [
                {
                    "subset_size": r[0],
                    "criterion": r[1],
                    "kills": r[2],
                    "total": r[3],
                    "rate": float(r[2]) / r[3],
                }
                for r in aggregate_rows
            ],
        },
    )
    written = [
        _write_json(report, out / "rq3_kill.json"),
        _write_csv(
            out / "rq3_kill.csv",
            ("subset_size", "criterion", "kills", "total", "rate"),
            aggregate_rows,
        ),
    ]
    _echo(written, seed=args.seed)
    return 0


# ---------------------------------------------------------------- parser


def _default_seed() -> int:
    raw = os.environ.get("SK_SEED")
    if raw is None:
        return 0
    return int(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sk",
        description="Surprise-adequacy toolkit: density fitting, scoring, "
        "distribution comparison, prioritization, and mutation testing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    seed_default = _default_seed()

    def add(name, func, parent=None, help=""):
        p = (parent or sub).add_parser(name, help=help)
        p.add_argument("--deterministic", action="store_true",
                       help="omit timestamps so reports are byte-stable")
        p.set_defaults(func=func, _parser=p)
        return p

    def add_density_flags(p):
        p.add_argument("--variance-threshold", type=float, default=1e-5)
        p.add_argument("--pca-k", type=int, default=None)

    def add_kill_flags(p, criteria=("single", "statistical")):
        p.add_argument("--criterion", choices=criteria, default="statistical")
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--d-min", type=float, default=0.5)
        p.add_argument("--passes", type=int, default=20)
        p.add_argument("--dropout-seed", type=int, default=0)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=seed_default)

    # lsa
    lsa = sub.add_parser("lsa", help="fit and apply density models")
    lsa_sub = lsa.add_subparsers(dest="lsa_command", required=True)
    p = add("fit", cmd_lsa_fit, lsa_sub, help="fit a density model from traces")
    p.add_argument("--manifest")
    p.add_argument("--label")
    p.add_argument("--traces")
    add_density_flags(p)
    p.add_argument("--out", required=True, help="model output directory")

    p = add("score", cmd_lsa_score, lsa_sub, help="score traces with a fitted model")
    p.add_argument("--model", required=True, help="model directory from `lsa fit`")
    p.add_argument("--manifest")
    p.add_argument("--label")
    p.add_argument("--traces")
    p.add_argument("--out", required=True, help="scores JSON path")

    # dist
    dist = sub.add_parser("dist", help="compare score distributions")
    dist_sub = dist.add_subparsers(dest="dist_command", required=True)
    p = add("compare", cmd_dist_compare, dist_sub, help="JSD between two score sets")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--raw", action="store_true", help="skip z-scoring")
    p.add_argument("--grid-size", type=int, default=1000)
    p.add_argument("--out", required=True, help="output directory")

    # corr
    p = add("corr", cmd_corr, help="Spearman correlation of two score sets")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--n-perm", type=int, default=10000,
                   help="permutation trials; 0 disables the permutation test")
    add_seed(p)
    p.add_argument("--out", required=True, help="report JSON path")

    # prioritize
    p = add("prioritize", cmd_prioritize, help="rank inputs by surprise")
    p.add_argument("--scores", required=True)
    p.add_argument("--correct", help="JSON 0/1 vector of original-model correctness")
    p.add_argument("--manifest", help="derive correctness from logits + true labels")
    p.add_argument("--label")
    p.add_argument("--subset", type=int, action="append",
                   help="top-k selection size; repeatable")
    p.add_argument("--subset-preset", choices=sorted(SUBSET_PRESETS))
    p.add_argument("--out", required=True, help="output directory")

    # mutate
    mutate = sub.add_parser("mutate", help="Gaussian-Fuzzing mutation testing")
    mutate_sub = mutate.add_subparsers(dest="mutate_command", required=True)
    p = add("fuzz", cmd_mutate_fuzz, mutate_sub, help="write a mutant model")
    p.add_argument("--model", required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--sigma", type=float, default=0.5)
    add_seed(p)
    p.add_argument("--out", required=True, help="mutant model JSON path")

    p = add("kill", cmd_mutate_kill, mutate_sub, help="evaluate a kill criterion")
    p.add_argument("--model", required=True)
    p.add_argument("--mutant")
    p.add_argument("--rho", type=float)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--inputs", required=True, help="test inputs (ATRC)")
    p.add_argument("--truth", required=True, help="true labels (ATRC)")
    p.add_argument("--label", default="")
    p.add_argument("--source", default="original")
    add_kill_flags(p)
    add_seed(p)
    p.add_argument("--out", required=True, help="report JSON path")

    p = add("search", cmd_mutate_search, mutate_sub,
            help="binary-search the smallest killable rho")
    p.add_argument("--model", required=True)
    p.add_argument("--inputs", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--iters", type=int, default=10)
    p.add_argument("--label", default="")
    p.add_argument("--source", default="original")
    add_kill_flags(p)
    add_seed(p)
    p.add_argument("--out", required=True, help="report JSON path")

    # rq1 / rq2
    for name, func, help_text in (
        ("rq1", cmd_rq1, "per-label JSD between reference- and surrogate-fitted scores"),
        ("rq2", cmd_rq2, "per-label correlation between reference- and surrogate-fitted scores"),
    ):
        p = add(name, func, help=help_text)
        p.add_argument("--ref", required=True, help="reference manifest")
        p.add_argument("--surrogate", required=True, help="surrogate manifest")
        p.add_argument("--test", dest="test_manifest", required=True,
                       help="test manifest")
        add_density_flags(p)
        p.add_argument("--grid-size", type=int, default=1000)
        if name == "rq1":
            p.add_argument("--raw", action="store_true")
            p.add_argument("--out", required=True, help="output directory")
        else:
            p.add_argument("--n-perm", type=int, default=10000)
            add_seed(p)
            p.add_argument("--out", required=True, help="report JSON path")

    # rq3
    rq3 = sub.add_parser("rq3", help="prioritization and mutation-kill recipes")
    rq3_sub = rq3.add_subparsers(dest="rq3_command", required=True)

    def add_rq3_common(p):
        p.add_argument("--model", required=True, help="classifier model JSON")
        p.add_argument("--train", required=True, help="training inputs (ATRC)")
        p.add_argument("--test", required=True, help="test inputs (ATRC)")
        p.add_argument("--truth", required=True, help="test labels (ATRC)")
        add_density_flags(p)

    p = add("accuracy", cmd_rq3_accuracy, rq3_sub,
            help="accuracy-vs-rank curves under LSA and random ordering")
    add_rq3_common(p)
    add_seed(p)
    p.add_argument("--out", required=True, help="output directory")

    p = add("kill", cmd_rq3_kill, rq3_sub,
            help="kill rates for prioritized subsets")
    add_rq3_common(p)
    p.add_argument("--subset", type=int, action="append")
    p.add_argument("--subset-preset", choices=sorted(SUBSET_PRESETS))
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--mutants", type=int, default=1,
                   help="number of mutation seeds to evaluate")
    p.add_argument("--label", default="")
    p.add_argument("--source", default="original")
    add_kill_flags(p, criteria=("single", "statistical", "both"))
    add_seed(p)
    p.add_argument("--out", required=True, help="output directory")

    return parser


def main(argv=None) -> int:
    try:
        _default_seed()
    except ValueError:
        print(
            json.dumps({"error": "UsageError", "message": "SK_SEED must be an integer"}),
            file=sys.stderr,
        )
        return 2
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SurpriseKitError, OSError, json.JSONDecodeError, KeyError, ValueError) as e:
        message = " ".join(str(e).split())
        print(
            json.dumps({"error": type(e).__name__, "message": message}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
