"""Precision-recall evaluation of scored edges against a known truth.

Every ordered pair (including self-loops) is a candidate edge, so a p x p
score matrix yields p^2 ranked candidates.  Ranking is by ascending score
with deterministic tie-breaking by (score, child, parent).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyTruth
from .model import EdgeSet, ScoreMatrix

__all__ = [
    "ConfusionCounts",
    "PRCurve",
    "confusion",
    "pr_curve",
    "auc_pr",
    "precision_at_recall",
]


@dataclass(frozen=True)
class ConfusionCounts:
    """Edge-level confusion counts over all p^2 ordered pairs."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self) -> float:
        predicted = self.tp + self.fp
        return self.tp / predicted if predicted else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn)


def confusion(predicted: EdgeSet, truth: EdgeSet, p: int) -> ConfusionCounts:
    """Confusion counts of a predicted edge set against a nonempty truth."""
    if len(truth) == 0:
        raise EmptyTruth("cannot evaluate against an empty true edge set")
    predicted.in_degrees(p)
    truth.in_degrees(p)
    tp = len(predicted.edges & truth.edges)
    fp = len(predicted.edges - truth.edges)
    fn = len(truth.edges - predicted.edges)
    tn = p * p - tp - fp - fn
    return ConfusionCounts(tp, fp, fn, tn)


@dataclass(frozen=True)
class PRCurve:
    """One precision-recall point per ranking prefix.

    Point k (0-based) corresponds to predicting the k+1 best-scored pairs;
    thresholds[k] is the score of the last pair included.  recalls is
    non-decreasing and ends at 1.
    """

    recalls: np.ndarray
    precisions: np.ndarray
    thresholds: np.ndarray
    n_truth: int

    def __post_init__(self):
        for name in ("recalls", "precisions", "thresholds"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.recalls.shape[0]


def pr_curve(scores: ScoreMatrix, truth: EdgeSet) -> PRCurve:
    """Rank all pairs by ascending score and trace precision over recall."""
    if len(truth) == 0:
        raise EmptyTruth("cannot evaluate against an empty true edge set")
    p = scores.p
    truth.in_degrees(p)
    flat = scores.scores.ravel()
    child_idx, parent_idx = np.divmod(np.arange(p * p), p)
    # primary key last in lexsort; ties fall back to child then parent
    order = np.lexsort((parent_idx, child_idx, flat))
    truth_mask = np.zeros((p, p), dtype=bool)
    for parent, child in truth:
        truth_mask[child, parent] = True
    hits = truth_mask.ravel()[order]
    tp = np.cumsum(hits)
    ranks = np.arange(1, p * p + 1)
    return PRCurve(tp / len(truth), tp / ranks, flat[order], len(truth))


def auc_pr(curve: PRCurve) -> float:
    """Area under the precision-recall steps.

    Right-continuous step integration: each prefix contributes its
    precision times the recall gained at that prefix.
    """
    prev = np.concatenate(([0.0], curve.recalls[:-1]))
    return float(np.sum((curve.recalls - prev) * curve.precisions))


def precision_at_recall(curve: PRCurve, recall_level: float) -> float:
    """Precision of the first prefix whose recall reaches the given level."""
    if not 0 < recall_level <= 1:
        raise ValueError(f"recall_level must lie in (0, 1], got {recall_level}")
    reached = np.nonzero(curve.recalls >= recall_level - 1e-12)[0]
    idx = int(reached[0])
    return float(curve.precisions[idx])
