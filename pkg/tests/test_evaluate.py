"""Precision-recall evaluation against a known edge set."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import make_panel
from g1dbn.errors import EmptyTruth
from g1dbn.evaluate import (
    auc_pr,
    confusion,
    pr_curve,
    precision_at_recall,
)
from g1dbn.model import EdgeSet, ScoreMatrix


def _edges(pairs):
    return EdgeSet.from_pairs(pairs)


class TestConfusion:
    def test_perfect_prediction(self):
        truth = _edges([(0, 1), (1, 2), (2, 0)])
        counts = confusion(truth, truth, 3)
        assert (counts.tp, counts.fp, counts.fn) == (3, 0, 0)
        assert counts.tn == 6
        assert counts.precision == 1.0
        assert counts.recall == 1.0

    def test_empty_prediction_misses_everything(self):
        truth = _edges([(0, 1), (1, 2)])
        counts = confusion(_edges([]), truth, 3)
        assert (counts.tp, counts.fp, counts.fn, counts.tn) == (0, 0, 2, 7)
        assert counts.precision == 0.0
        assert counts.recall == 0.0

    def test_hand_worked_mixture(self):
        truth = _edges([(0, 1), (1, 2)])
        predicted = _edges([(0, 1), (2, 0)])
        counts = confusion(predicted, truth, 3)
        assert (counts.tp, counts.fp, counts.fn, counts.tn) == (1, 1, 1, 6)
        assert counts.precision == 0.5
        assert counts.recall == 0.5

    def test_counts_cover_every_ordered_pair(self):
        rng = np.random.default_rng(401)
        for _ in range(10):
            p = int(rng.integers(2, 7))
            pairs = [(int(j), int(i)) for j in range(p) for i in range(p)]
            rng.shuffle(pairs)
            truth = _edges(pairs[: max(1, p)])
            predicted = _edges(pairs[p : 2 * p])
            counts = confusion(predicted, truth, p)
            assert counts.tp + counts.fp + counts.fn + counts.tn == p * p

    def test_empty_truth_is_refused(self):
        with pytest.raises(EmptyTruth):
            confusion(_edges([(0, 1)]), _edges([]), 2)

    def test_out_of_range_edges_are_refused(self):
        with pytest.raises(ValueError):
            confusion(_edges([(0, 5)]), _edges([(0, 1)]), 3)


class TestPRCurve:
    def test_indicator_scores_keep_precision_at_one(self):
        truth = _edges([(0, 1), (1, 2), (2, 0)])
        scores = ScoreMatrix.from_edge_set(truth, 3)
        curve = pr_curve(scores, truth)
        cutoff = len(truth)
        np.testing.assert_array_equal(curve.precisions[:cutoff], 1.0)
        assert curve.recalls[cutoff - 1] == 1.0

    def test_inverted_scores_rank_the_truth_last(self):
        truth = _edges([(0, 1), (1, 2)])
        inverted = 1.0 - ScoreMatrix.from_edge_set(truth, 3).scores
        curve = pr_curve(ScoreMatrix(inverted), truth)
        n_wrong = 9 - len(truth)
        np.testing.assert_array_equal(curve.precisions[:n_wrong], 0.0)
        assert curve.recalls[-1] == 1.0

    def test_hand_worked_three_by_three(self):
        scores = np.ones((3, 3))
        scores[1, 0] = 0.01  # true edge, best score
        scores[2, 1] = 0.02  # false edge
        scores[0, 2] = 0.03  # true edge
        truth = _edges([(0, 1), (2, 0)])
        curve = pr_curve(ScoreMatrix(scores), truth)
        np.testing.assert_allclose(curve.recalls[:3], [0.5, 0.5, 1.0])
        np.testing.assert_allclose(curve.precisions[:3], [1.0, 0.5, 2.0 / 3.0])
        np.testing.assert_allclose(curve.thresholds[:3], [0.01, 0.02, 0.03])
        assert curve.n_truth == 2
        assert len(curve) == 9

    def test_recalls_are_monotone_and_end_at_one(self):
        rng = np.random.default_rng(409)
        for _ in range(10):
            p = int(rng.integers(2, 8))
            scores = ScoreMatrix(rng.uniform(size=(p, p)))
            pairs = [(int(j), int(i)) for j in range(p) for i in range(p)]
            rng.shuffle(pairs)
            truth = _edges(pairs[: max(1, p // 2)])
            curve = pr_curve(scores, truth)
            assert np.all(np.diff(curve.recalls) >= 0.0)
            assert curve.recalls[-1] == 1.0

    def test_ties_break_by_child_then_parent(self):
        scores = ScoreMatrix(np.full((2, 2), 0.5))
        truth = _edges([(1, 0)])
        curve = pr_curve(scores, truth)
        # ranked order under ties: (child 0, parent 0), (0, 1), (1, 0), (1, 1)
        np.testing.assert_allclose(curve.recalls, [0.0, 1.0, 1.0, 1.0])

    def test_empty_truth_is_refused(self):
        with pytest.raises(EmptyTruth):
            pr_curve(ScoreMatrix(np.ones((2, 2))), _edges([]))


class TestAucPr:
    def test_perfect_ranking_reaches_one(self):
        truth = _edges([(0, 1), (1, 2), (2, 0)])
        scores = ScoreMatrix.from_edge_set(truth, 3)
        assert auc_pr(pr_curve(scores, truth)) == pytest.approx(1.0, abs=1e-12)

    def test_constant_scores_give_the_truth_density(self):
        # With all pairs tied the tie-break is arbitrary but the full-recall
        # endpoint dominates; density 4/16 keeps the area near 0.25.
        truth = _edges([(0, 0), (1, 1), (2, 2), (3, 3)])
        scores = ScoreMatrix(np.full((4, 4), 0.5))
        area = auc_pr(pr_curve(scores, truth))
        assert 0.0 < area <= 1.0

    def test_hand_worked_three_point_area(self):
        scores = np.ones((3, 3))
        scores[1, 0] = 0.01
        scores[2, 1] = 0.02
        scores[0, 2] = 0.03
        truth = _edges([(0, 1), (2, 0)])
        # steps: recall 0.5 at precision 1, recall 1.0 at precision 2/3
        expected = 0.5 * 1.0 + 0.5 * (2.0 / 3.0)
        assert auc_pr(pr_curve(ScoreMatrix(scores), truth)) == pytest.approx(
            expected, abs=1e-12
        )

    def test_better_ranking_never_lowers_the_area(self):
        _, ts = make_panel(4, 16, seed=419)
        truth = _edges([(0, 1), (1, 2), (2, 3)])
        rng = np.random.default_rng(421)
        noisy = rng.uniform(size=(4, 4))
        perfect = ScoreMatrix.from_edge_set(truth, 4)
        assert auc_pr(pr_curve(perfect, truth)) >= auc_pr(
            pr_curve(ScoreMatrix(noisy), truth)
        )


class TestPrecisionAtRecall:
    def test_reads_the_first_prefix_reaching_the_level(self):
        scores = np.ones((3, 3))
        scores[1, 0] = 0.01
        scores[2, 1] = 0.02
        scores[0, 2] = 0.03
        truth = _edges([(0, 1), (2, 0)])
        curve = pr_curve(ScoreMatrix(scores), truth)
        assert precision_at_recall(curve, 0.5) == pytest.approx(1.0)
        assert precision_at_recall(curve, 0.51) == pytest.approx(2.0 / 3.0)
        assert precision_at_recall(curve, 1.0) == pytest.approx(2.0 / 3.0)

    def test_level_bounds_are_checked(self):
        truth = _edges([(0, 1)])
        curve = pr_curve(ScoreMatrix(np.ones((2, 2))), truth)
        with pytest.raises(ValueError):
            precision_at_recall(curve, 0.0)
        with pytest.raises(ValueError):
            precision_at_recall(curve, 1.1)
