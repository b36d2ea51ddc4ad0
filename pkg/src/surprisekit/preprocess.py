"""Trace preprocessing: low-variance column filtering, PCA, z-scoring.

These are the stages applied to activation traces before density fitting
(filter -> PCA -> KDE) and to score samples before distribution plots
(z-score). All sample statistics use ddof=1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateData, InsufficientData, ShapeError


@dataclass(frozen=True)
class ColumnMask:
    """Boolean keep-mask over trace columns."""

    keep: np.ndarray  # bool vector, length = original column count

    @property
    def kept_count(self) -> int:
        return int(np.count_nonzero(self.keep))

    def __len__(self) -> int:
        return int(self.keep.size)

    def to_json(self) -> list[bool]:
        return [bool(b) for b in self.keep]

    @staticmethod
    def from_json(data) -> "ColumnMask":
        return ColumnMask(keep=np.asarray(data, dtype=bool))


@dataclass(frozen=True)
class PcaModel:
    """Principal directions of a centered training matrix.

    ``components`` rows are orthonormal; ``explained_variance[i]`` is the
    variance of the training data along component i (sigma_i^2 / (N-1)).
    """

    mean: np.ndarray               # (d_in,)
    components: np.ndarray         # (k, d_in), rows orthonormal
    explained_variance: np.ndarray  # (k,), non-increasing

    @property
    def k(self) -> int:
        return self.components.shape[0]

    @property
    def input_dim(self) -> int:
        return self.components.shape[1]

    def to_json(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
        }

    @staticmethod
    def from_json(data) -> "PcaModel":
        return PcaModel(
            mean=np.asarray(data["mean"], dtype=np.float64),
            components=np.asarray(data["components"], dtype=np.float64),
            explained_variance=np.asarray(data["explained_variance"], dtype=np.float64),
        )


def variance_filter_fit(train, threshold: float = 1e-5) -> ColumnMask:
    """Keep columns whose sample variance (ddof=1) strictly exceeds ``threshold``.

    Raises InsufficientData for fewer than 2 rows and DegenerateData when
    every column would be dropped.
    """
    m = np.asarray(train, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected 2-D matrix, got ndim={m.ndim}")
    if m.shape[0] < 2:
        raise InsufficientData("variance filter needs at least 2 rows")
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    keep = np.var(m, axis=0, ddof=1) > threshold
    if not keep.any():
        raise DegenerateData("all columns fall below the variance threshold")
    return ColumnMask(keep=keep)


def apply_mask(m, mask: ColumnMask) -> np.ndarray:
    """Drop masked-out columns, preserving column order."""
    m = np.asarray(m)
    if m.ndim != 2:
        raise ShapeError(f"expected 2-D matrix, got ndim={m.ndim}")
    if m.shape[1] != len(mask):
        raise ShapeError(f"matrix has {m.shape[1]} cols, mask expects {len(mask)}")
    return m[:, mask.keep]


def pca_fit(train, k: int) -> PcaModel:
    """Fit the top-k principal directions via SVD of the centered matrix.

    SVD of the data matrix (rather than eigendecomposition of the
    covariance) keeps the computation well conditioned for the nearly
    rank-deficient traces this pipeline exists to handle. Sign convention:
    in each component the entry of largest magnitude is non-negative.
    """
    m = np.asarray(train, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected 2-D matrix, got ndim={m.ndim}")
    n, d = m.shape
    if not 1 <= k <= min(n - 1, d):
        raise ShapeError(f"k={k} outside valid range [1, {min(n - 1, d)}] for {n}x{d} data")

    mean = m.mean(axis=0)
    centered = m - mean
    _u, s, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:k].copy()
    explained = (s[:k] ** 2) / (n - 1)

    # fix the sign of each direction deterministically
    pivot = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(k), pivot])
    signs[signs == 0] = 1.0
    components *= signs[:, None]

    return PcaModel(mean=mean, components=components, explained_variance=explained)


def pca_transform(model: PcaModel, m) -> np.ndarray:
    """Project rows onto the principal directions: (x - mean) @ components.T."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected 2-D matrix, got ndim={m.ndim}")
    if m.shape[1] != model.input_dim:
        raise ShapeError(
            f"matrix has {m.shape[1]} cols, PCA model expects {model.input_dim}"
        )
    return (m - model.mean) @ model.components.T


def zscore(values) -> np.ndarray:
    """Standardize to mean 0 and unit sample std (ddof=1)."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size < 2:
        raise InsufficientData("z-score needs at least 2 values")
    std = v.std(ddof=1)
    if std == 0.0:
        raise DegenerateData("z-score undefined for constant input")
    return (v - v.mean()) / std
