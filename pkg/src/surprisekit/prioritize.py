"""Rank test inputs by surprise and evaluate the ranking.

Surprising inputs are the ones a model is most likely to get wrong, so
executing them first surfaces failures early. This module ranks inputs by
LSA (descending by default), computes cumulative prefix-accuracy curves,
and selects the top-k correctly-classified inputs for mutation-kill
evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ShapeError

# Subset-size presets for kill evaluation at two scales.
SUBSET_PRESETS = {
    "small": (30, 50, 70),
    "large": (100, 300, 500),
}


class Direction(Enum):
    DESCENDING = "descending"
    ASCENDING = "ascending"


@dataclass(frozen=True)
class Ranking:
    """A permutation of input indices ordered by score."""

    order: np.ndarray
    scores: np.ndarray
    direction: Direction

    def __len__(self) -> int:
        return int(self.order.size)


@dataclass(frozen=True)
class AccuracyCurve:
    """Cumulative accuracy of the first k ranked inputs, k = 1..N."""

    ks: np.ndarray
    acc: np.ndarray


@dataclass(frozen=True)
class Selection:
    """Top-k correctly-classified indices; shortfall set when fewer than
    k correct inputs existed."""

    indices: np.ndarray
    requested_k: int
    shortfall: bool


def _score_values(scores) -> np.ndarray:
    values = getattr(scores, "values", scores)
    return np.asarray(values, dtype=np.float64).ravel()


def rank_by_lsa(scores, direction: Direction = Direction.DESCENDING) -> Ranking:
    """Stable sort of input indices by score; ties keep original order.

    ``scores`` may be an LsaScores or any 1-D array.
    """
    values = _score_values(scores)
    if values.size and not np.all(np.isfinite(values)):
        raise ValueError("scores must be finite")
    key = -values if direction is Direction.DESCENDING else values
    order = np.argsort(key, kind="stable")
    return Ranking(order=order, scores=values, direction=direction)


def _order_of(ranking) -> np.ndarray:
    order = np.asarray(getattr(ranking, "order", ranking), dtype=np.int64).ravel()
    return order


def cumulative_accuracy_curve(ranking, correct) -> AccuracyCurve:
    """acc[k-1] = (number correct among the first k ranked inputs) / k.

    ``ranking`` may be a Ranking or a bare index permutation, so random or
    externally produced orderings can be evaluated with the same code.
    """
    order = _order_of(ranking)
    flags = np.asarray(correct).ravel().astype(bool)
    if order.size != flags.size:
        raise ShapeError(f"ranking has {order.size} entries, correct has {flags.size}")
    if order.size and not np.array_equal(np.sort(order), np.arange(order.size)):
        raise ShapeError("order is not a permutation of input indices")
    ks = np.arange(1, order.size + 1, dtype=np.int64)
    acc = np.cumsum(flags[order].astype(np.float64)) / ks
    return AccuracyCurve(ks=ks, acc=acc)


def select_top_k_correct(ranking, original_correct, k: int) -> Selection:
    """First k ranked indices the original model classified correctly.

    If fewer than k correct inputs exist, all of them are returned and the
    shortfall flag is set; the caller decides whether that matters.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    order = _order_of(ranking)
    flags = np.asarray(original_correct).ravel().astype(bool)
    if order.size != flags.size:
        raise ShapeError(f"ranking has {order.size} entries, correct has {flags.size}")
    picked = order[flags[order]][:k]
    return Selection(
        indices=picked, requested_k=k, shortfall=picked.size < k
    )
