"""Likelihood-based surprise scoring.

A reference trace set is reduced (variance filter -> PCA) and modeled with
a Gaussian kernel density estimate whose full-covariance bandwidth follows
Scott's rule, H = n^(-2/(d+4)) * sample_cov. The surprise of an input is
the negative natural log of the estimated density of its reduced trace:
low values mean the input looks like the reference data, high values mean
the model is in unfamiliar territory.

Per-kernel log densities are combined with log-sum-exp, so scores stay
finite far into the tails instead of underflowing to -log(0).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ShapeError, SingularCovariance
from .preprocess import (
    ColumnMask,
    PcaModel,
    apply_mask,
    pca_fit,
    pca_transform,
    variance_filter_fit,
)
from .trace_store import read_trace_matrix, write_trace_matrix

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class KdeModel:
    """Gaussian KDE with a Scott-rule full-covariance bandwidth."""

    points: np.ndarray         # (n, d) reference samples
    bandwidth_cov: np.ndarray  # (d, d) bandwidth matrix H
    chol: np.ndarray           # (d, d) lower Cholesky factor of H
    log_norm: float            # log((2*pi)^(d/2) * |H|^(1/2))
    n: int
    d: int


@dataclass(frozen=True)
class DensityConfig:
    variance_threshold: float = 1e-5
    pca_k: int | None = None

    def to_json(self) -> dict:
        return {"variance_threshold": self.variance_threshold, "pca_k": self.pca_k}


@dataclass(frozen=True)
class DensityModel:
    """Fitted surprise pipeline: column mask -> PCA -> KDE."""

    mask: ColumnMask
    pca: PcaModel
    kde: KdeModel
    config: DensityConfig
    model_id: str = ""

    @property
    def input_dim(self) -> int:
        return len(self.mask)


@dataclass(frozen=True)
class LsaScores:
    """Per-input surprise values plus provenance."""

    values: np.ndarray
    model_id: str = ""
    dataset_id: str = ""

    def __len__(self) -> int:
        return int(self.values.size)

    def to_json(self) -> dict:
        return {
            "model_id": self.model_id,
            "dataset_id": self.dataset_id,
            "values": self.values.tolist(),
        }

    @staticmethod
    def from_json(data) -> "LsaScores":
        return LsaScores(
            values=np.asarray(data["values"], dtype=np.float64),
            model_id=data.get("model_id", ""),
            dataset_id=data.get("dataset_id", ""),
        )


def scott_factor(n: int, d: int) -> float:
    """Scott's per-dimension bandwidth factor n^(-1/(d+4))."""
    return float(n) ** (-1.0 / (d + 4))


def kde_fit(points) -> KdeModel:
    """Fit the Gaussian KDE on reference points.

    H = n^(-2/(d+4)) * sample covariance (ddof=1). A covariance whose
    Cholesky factorization fails raises SingularCovariance; for traces this
    usually means the PCA dimension is too high for the sample count.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise ShapeError(f"expected 2-D point matrix, got ndim={pts.ndim}")
    n, d = pts.shape
    if n < 2:
        raise SingularCovariance("KDE needs at least 2 reference points")
    if not np.all(np.isfinite(pts)):
        raise ShapeError("reference points must be finite")

    cov = np.atleast_2d(np.cov(pts, rowvar=False, ddof=1))
    bandwidth_cov = scott_factor(n, d) ** 2 * cov
    try:
        chol = np.linalg.cholesky(bandwidth_cov)
    except np.linalg.LinAlgError as err:
        raise SingularCovariance(
            "sample covariance of the reference points is singular; "
            "reduce pca_k (or drop duplicate reference rows)"
        ) from err

    log_norm = 0.5 * d * LOG_2PI + float(np.sum(np.log(np.diag(chol))))
    return KdeModel(
        points=pts, bandwidth_cov=bandwidth_cov, chol=chol, log_norm=log_norm, n=n, d=d
    )


def _log_density(kde: KdeModel, x: np.ndarray) -> float:
    diff = kde.points - x                      # (n, d)
    z = solve_triangular(kde.chol, diff.T, lower=True)
    maha = np.einsum("ij,ij->j", z, z)         # squared Mahalanobis distances
    exponents = -0.5 * maha
    peak = exponents.max()
    return float(peak + np.log(np.exp(exponents - peak).sum())) - np.log(kde.n) - kde.log_norm


def lsa_score(kde: KdeModel, x) -> float:
    """Surprise of a single reduced trace: -log of the kernel density at x."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != kde.d:
        raise ShapeError(f"query has length {x.size}, KDE dimension is {kde.d}")
    return -_log_density(kde, x)


def lsa_score_many(kde: KdeModel, xs) -> np.ndarray:
    """Vector of surprise values, one per row of ``xs``."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != kde.d:
        raise ShapeError(f"queries must be (m, {kde.d}), got {xs.shape}")
    return np.array([-_log_density(kde, x) for x in xs], dtype=np.float64)


def fit_density_model(train, config: DensityConfig = DensityConfig(), model_id: str = "") -> DensityModel:
    """Fit the full surprise pipeline on a reference trace matrix.

    ``config.pca_k=None`` defaults to min(rows - 1, columns surviving the
    variance filter); an explicit out-of-range value raises ShapeError.
    """
    train = np.asarray(train, dtype=np.float64)
    if train.ndim != 2:
        raise ShapeError(f"expected 2-D trace matrix, got ndim={train.ndim}")

    mask = variance_filter_fit(train, config.variance_threshold)
    reduced = apply_mask(train, mask)
    k_max = min(reduced.shape[0] - 1, reduced.shape[1])
    k = k_max if config.pca_k is None else config.pca_k
    pca = pca_fit(reduced, k)
    kde = kde_fit(pca_transform(pca, reduced))
    return DensityModel(mask=mask, pca=pca, kde=kde, config=config, model_id=model_id)


def transform_traces(model: DensityModel, inputs) -> np.ndarray:
    """Apply the fitted mask + PCA stages to raw traces."""
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2:
        raise ShapeError(f"expected 2-D trace matrix, got ndim={inputs.ndim}")
    if inputs.shape[1] != model.input_dim:
        raise ShapeError(
            f"inputs have {inputs.shape[1]} cols, model expects {model.input_dim}"
        )
    return pca_transform(model.pca, apply_mask(inputs, model.mask))


def score_batch(model: DensityModel, inputs, dataset_id: str = "") -> LsaScores:
    """Surprise values for each row of a raw trace matrix, order preserved."""
    reduced = transform_traces(model, inputs)
    if reduced.shape[0] == 0:
        values = np.empty(0, dtype=np.float64)
    else:
        values = lsa_score_many(model.kde, reduced)
    return LsaScores(values=values, model_id=model.model_id, dataset_id=dataset_id)


def save_density_model(model: DensityModel, directory) -> None:
    """Serialize a fitted model to a directory (JSON metadata + ATRC arrays)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {
        "model_id": model.model_id,
        "config": model.config.to_json(),
        "mask": model.mask.to_json(),
        "pca_mean": model.pca.mean.tolist(),
        "explained_variance": model.pca.explained_variance.tolist(),
        "dims": {
            "input_dim": model.input_dim,
            "masked_dim": model.pca.input_dim,
            "k": model.pca.k,
        },
    }
    (directory / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    write_trace_matrix(model.pca.components.astype(np.float64), directory / "components.atrc")
    write_trace_matrix(model.kde.points.astype(np.float64), directory / "points.atrc")


def load_density_model(directory) -> DensityModel:
    """Load a model saved by :func:`save_density_model`.

    The KDE bandwidth is refit from the stored points, which reproduces the
    saved model exactly since the fit is deterministic.
    """
    directory = Path(directory)
    meta = json.loads((directory / "meta.json").read_text())
    mask = ColumnMask.from_json(meta["mask"])
    pca = PcaModel(
        mean=np.asarray(meta["pca_mean"], dtype=np.float64),
        components=np.asarray(read_trace_matrix(directory / "components.atrc"), dtype=np.float64),
        explained_variance=np.asarray(meta["explained_variance"], dtype=np.float64),
    )
    kde = kde_fit(read_trace_matrix(directory / "points.atrc"))
    cfg = meta.get("config", {})
    config = DensityConfig(
        variance_threshold=cfg.get("variance_threshold", 1e-5),
        pca_k=cfg.get("pca_k"),
    )
    return DensityModel(
        mask=mask, pca=pca, kde=kde, config=config, model_id=meta.get("model_id", "")
    )
