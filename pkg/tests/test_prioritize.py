import numpy as np
import pytest

from surprisekit.errors import ShapeError
from surprisekit.prioritize import (
    SUBSET_PRESETS,
    Direction,
    Ranking,
    cumulative_accuracy_curve,
    rank_by_lsa,
    select_top_k_correct,
)
from surprisekit.surprise import LsaScores

RNG = np.random.default_rng(555)


def test_presets():
    assert SUBSET_PRESETS["small"] == (30, 50, 70)
    assert SUBSET_PRESETS["large"] == (100, 300, 500)


def test_rank_descending_default():
    r = rank_by_lsa([3.0, 1.0, 2.0])
    assert r.order.tolist() == [0, 2, 1]
    assert r.direction is Direction.DESCENDING
    assert len(r) == 3


def test_rank_ascending():
    r = rank_by_lsa([3.0, 1.0, 2.0], direction=Direction.ASCENDING)
    assert r.order.tolist() == [1, 2, 0]


def test_rank_accepts_lsa_scores():
    scores = LsaScores(values=np.array([0.5, 2.5, 1.5]))
    assert rank_by_lsa(scores).order.tolist() == [1, 2, 0]


def test_rank_ties_keep_original_order():
    r = rank_by_lsa([2.0, 5.0, 2.0, 5.0, 1.0])
    assert r.order.tolist() == [1, 3, 0, 2, 4]
    asc = rank_by_lsa([2.0, 5.0, 2.0, 5.0, 1.0], direction=Direction.ASCENDING)
    assert asc.order.tolist() == [4, 0, 2, 1, 3]


def test_rank_rejects_non_finite():
    with pytest.raises(ValueError):
        rank_by_lsa([1.0, np.nan, 2.0])
    with pytest.raises(ValueError):
        rank_by_lsa([1.0, np.inf])


def test_rank_is_permutation():
    scores = RNG.normal(size=200)
    order = rank_by_lsa(scores).order
    assert np.array_equal(np.sort(order), np.arange(200))
    assert np.all(np.diff(scores[order]) <= 0)


def test_curve_hand_example():
    ranking = rank_by_lsa([3.0, 1.0, 2.0])
    curve = cumulative_accuracy_curve(ranking, [True, False, True])
    assert curve.ks.tolist() == [1, 2, 3]
    assert curve.acc.tolist() == [1.0, 1.0, 2.0 / 3.0]


def test_curve_final_point_is_overall_accuracy():
    flags = RNG.random(97) < 0.7
    scores = RNG.normal(size=97)
    ranked = cumulative_accuracy_curve(rank_by_lsa(scores), flags)
    shuffled = cumulative_accuracy_curve(RNG.permutation(97), flags)
    overall = flags.sum() / 97.0
    # final point is exactly the overall accuracy however the inputs are ordered
    assert ranked.acc[-1] == overall
    assert shuffled.acc[-1] == overall


def test_curve_accepts_bare_permutation():
    curve = cumulative_accuracy_curve(np.array([2, 0, 1]), [True, False, True])
    assert curve.acc.tolist() == [1.0, 1.0, 2.0 / 3.0]


def test_curve_validation():
    ranking = rank_by_lsa([1.0, 2.0, 3.0])
    with pytest.raises(ShapeError):
        cumulative_accuracy_curve(ranking, [True, False])
    with pytest.raises(ShapeError):
        cumulative_accuracy_curve(np.array([0, 0, 2]), [True, False, True])


def test_select_top_k_correct():
    # order by descending score: 4, 3, 2, 1, 0
    ranking = rank_by_lsa([1.0, 2.0, 3.0, 4.0, 5.0])
    correct = [True, False, True, True, False]
    sel = select_top_k_correct(ranking, correct, 2)
    assert sel.indices.tolist() == [3, 2]
    assert sel.requested_k == 2
    assert not sel.shortfall


def test_select_shortfall():
    ranking = rank_by_lsa([1.0, 2.0, 3.0])
    sel = select_top_k_correct(ranking, [False, True, False], 2)
    assert sel.indices.tolist() == [1]
    assert sel.shortfall


def test_select_validation():
    ranking = rank_by_lsa([1.0, 2.0])
    with pytest.raises(ValueError):
        select_top_k_correct(ranking, [True, True], 0)
    with pytest.raises(ShapeError):
        select_top_k_correct(ranking, [True], 1)


def test_select_respects_ranking_order():
    scores = RNG.normal(size=50)
    correct = RNG.random(50) < 0.6
    ranking = rank_by_lsa(scores)
    sel = select_top_k_correct(ranking, correct, 10)
    # the selection is the first 10 correct entries in ranked order
    want = [i for i in ranking.order if correct[i]][:10]
    assert sel.indices.tolist() == want


def test_ranking_dataclass_shape():
    r = Ranking(order=np.array([1, 0]), scores=np.array([1.0, 2.0]), direction=Direction.DESCENDING)
    assert len(r) == 2
