"""surprisekit: training-data-free DNN test adequacy.

Fits Likelihood-based Surprise Adequacy (LSA) density models from
penultimate-layer activation traces, scores and prioritizes test inputs,
compares score distributions statistically, and evaluates prioritized
subsets with Gaussian-Fuzzing mutation testing.
"""

from .errors import (
    DegenerateData,
    FormatError,
    InsufficientData,
    ManifestError,
    ModelFormatError,
    NotKillable,
    ShapeError,
    SingularCovariance,
    SurpriseKitError,
)
from .trace_store import (
    DatasetManifest,
    ManifestEntry,
    load_labels,
    load_manifest,
    read_header,
    read_trace_matrix,
    write_labels,
    write_manifest,
    write_trace_matrix,
)
from .preprocess import (
    ColumnMask,
    PcaModel,
    apply_mask,
    pca_fit,
    pca_transform,
    variance_filter_fit,
    zscore,
)
from .surprise import (
    DensityConfig,
    DensityModel,
    KdeModel,
    LsaScores,
    fit_density_model,
    kde_fit,
    load_density_model,
    lsa_score,
    lsa_score_many,
    save_density_model,
    score_batch,
    scott_factor,
    transform_traces,
)
from .diststat import (
    CorrelationResult,
    DensityCurve,
    DivergenceResult,
    Strength,
    js_divergence,
    kde_curve_1d,
    permutation_pvalue,
    spearman,
    spearman_with_permutation,
    strength_label,
)
from .prioritize import (
    SUBSET_PRESETS,
    AccuracyCurve,
    Direction,
    Ranking,
    Selection,
    cumulative_accuracy_curve,
    rank_by_lsa,
    select_top_k_correct,
)
from .nnrt import (
    BatchResult,
    DenseLayer,
    DropoutLayer,
    ForwardResult,
    NeuralModel,
    ReluLayer,
    SoftmaxLayer,
    forward,
    load_model,
    model_from_json,
    model_to_json,
    predict_batch,
    save_model,
)
from .mutation import (
    Criterion,
    KillConfig,
    KillVerdict,
    MutationSpec,
    SearchResult,
    binary_search_rho,
    evaluate_kill,
    gaussian_fuzz,
    pass_accuracies,
    search_smallest_killable_rho,
    single_instance_kill,
    statistical_kill,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyCurve",
    "BatchResult",
    "ColumnMask",
    "CorrelationResult",
    "Criterion",
    "DatasetManifest",
    "DegenerateData",
    "DenseLayer",
    "DensityConfig",
    "DensityCurve",
    "DensityModel",
    "Direction",
    "DivergenceResult",
    "DropoutLayer",
    "FormatError",
    "ForwardResult",
    "InsufficientData",
    "KdeModel",
    "KillConfig",
    "KillVerdict",
    "LsaScores",
    "ManifestEntry",
    "ManifestError",
    "ModelFormatError",
    "MutationSpec",
    "NeuralModel",
    "NotKillable",
    "PcaModel",
    "Ranking",
    "ReluLayer",
    "SUBSET_PRESETS",
    "SearchResult",
    "Selection",
    "ShapeError",
    "SingularCovariance",
    "SoftmaxLayer",
    "Strength",
    "SurpriseKitError",
    "apply_mask",
    "binary_search_rho",
    "cumulative_accuracy_curve",
    "evaluate_kill",
    "fit_density_model",
    "forward",
    "gaussian_fuzz",
    "js_divergence",
    "kde_curve_1d",
    "kde_fit",
    "load_density_model",
    "load_labels",
    "load_manifest",
    "load_model",
    "lsa_score",
    "lsa_score_many",
    "model_from_json",
    "model_to_json",
    "pass_accuracies",
    "pca_fit",
    "pca_transform",
    "permutation_pvalue",
    "predict_batch",
    "rank_by_lsa",
    "read_header",
    "read_trace_matrix",
    "save_density_model",
    "save_model",
    "score_batch",
    "scott_factor",
    "search_smallest_killable_rho",
    "select_top_k_correct",
    "single_instance_kill",
    "spearman",
    "spearman_with_permutation",
    "statistical_kill",
    "strength_label",
    "transform_traces",
    "variance_filter_fit",
    "write_labels",
    "write_manifest",
    "write_trace_matrix",
    "zscore",
]
