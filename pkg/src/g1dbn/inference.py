"""Two-step edge score computation and selection.

Step 1 scores every ordered pair (parent j, child i) by the worst-case
p-value of the lag-1 effect of j on i over all single conditioning
variables: each candidate effect is re-estimated with every other variable
k != j added to the regression, and the score keeps the largest of the
resulting two-sided p-values.  Low scores therefore mean the effect
survived every attempt to explain it away with one other variable.

Step 2 re-examines only the edges retained by thresholding Step 1: each
child is regressed on all of its retained parents at once and the edge
score is the p-value of the parent coefficient in that full regression.
Scores of edges not retained are fixed at 1.

Selection is a strict threshold on the scores, or Benjamini-Hochberg over
the retained edges when a false-discovery level is preferred.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ._engine import ESTIMATOR_CODES, kernel, resolve_engine
from .errors import EmptyGrid, RankDeficiencyWarning, RankDeficient, TooManyParents
from .model import (
    EdgeSet,
    InferenceConfig,
    ScoreMatrix,
    TimeSeries,
    lagged_pairs,
    validate_timeseries,
)
from .regress import _two_sided_tail, fit_ls, fit_m_estimator

__all__ = [
    "step1_scores",
    "step1_score_rows",
    "step2_scores",
    "threshold_edges",
    "feasible_alpha1",
    "bh_select",
    "select_alpha1",
    "infer",
    "InferenceResult",
    "Alpha1GridPoint",
    "Alpha1Selection",
]


class InferenceResult(NamedTuple):
    s1: ScoreMatrix
    step1_edges: EdgeSet
    s2: ScoreMatrix
    edges: EdgeSet


def _fit_pair_pvalue(y, x_pair, cfg: InferenceConfig, dof: int) -> float:
    """p-value of the first predictor in y ~ 1 + x_pair, 1.0 if singular."""
    try:
        if cfg.estimator == "ls":
            fit = fit_ls(y, x_pair, dof=dof)
        else:
            fit = fit_m_estimator(
                y,
                x_pair,
                cfg.estimator,
                tuning=cfg.tuning(),
                tol=cfg.irls_tol,
                max_iter=cfg.irls_max_iter,
                dof=dof,
            )
    except RankDeficient:
        return 1.0
    return float(fit.p_values[0])


def _loop_row(y, z, cfg: InferenceConfig, dof: int) -> np.ndarray:
    """Reference path: one regression per (j, k), max p-value over k."""
    p = z.shape[1]
    row = np.empty(p)
    for j in range(p):
        worst = 0.0
        for k in range(p):
            if k == j:
                continue
            pv = _fit_pair_pvalue(y, z[:, [j, k]], cfg, dof)
            if pv > worst:
                worst = pv
        row[j] = worst
    return row


def step1_score_rows(
    ts: TimeSeries,
    config: InferenceConfig | None = None,
    targets: Sequence[int] | None = None,
    n_threads: int = 1,
    engine: str | None = None,
) -> np.ndarray:
    """First-step score rows for selected targets (all by default).

    Returns an array of shape (len(targets), p); row order follows
    ``targets``.  Rows are independent, so this is the natural unit for
    farming the computation out over threads or separate processes.
    """
    cfg = config or InferenceConfig()
    validate_timeseries(ts, for_step1=True)
    if n_threads < 1:
        raise ValueError("n_threads must be >= 1")
    z, responses = lagged_pairs(ts)
    p = ts.p
    if targets is None:
        targets = range(p)
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError("targets must not repeat")
    for t in targets:
        if not 0 <= t < p:
            raise ValueError(f"target {t} out of range for p={p}")
    dof = ts.n - 4
    name = resolve_engine(engine)

    if name == "loop":
        def one(i: int) -> np.ndarray:
            return _loop_row(np.ascontiguousarray(responses[:, i]), z, cfg, dof)
    else:
        mod = kernel(name)
        gram = z.T @ z
        col_sums = z.sum(axis=0)
        code = ESTIMATOR_CODES[cfg.estimator]

        def one(i: int) -> np.ndarray:
            tmin = mod.row_min_abs_t(
                np.ascontiguousarray(responses[:, i]),
                z,
                gram,
                col_sums,
                code,
                cfg.tuning(),
                cfg.irls_tol,
                cfg.irls_max_iter,
            )
            return _two_sided_tail(tmin, dof)

    if n_threads == 1 or len(targets) <= 1:
        rows = [one(i) for i in targets]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            rows = list(pool.map(one, targets))
    return np.vstack(rows) if rows else np.empty((0, p))


def step1_scores(
    ts: TimeSeries,
    config: InferenceConfig | None = None,
    n_threads: int = 1,
    engine: str | None = None,
) -> ScoreMatrix:
    """Full first-step score matrix, entry [child, parent]."""
    rows = step1_score_rows(ts, config, None, n_threads, engine)
    return ScoreMatrix(rows)


def step2_scores(
    ts: TimeSeries,
    retained: EdgeSet,
    config: InferenceConfig | None = None,
) -> ScoreMatrix:
    """Second-step scores given the edges retained after Step 1.

    Each child with at least one retained parent is regressed on all of its
    retained parents jointly; the edge score is the two-sided p-value of
    the parent's coefficient against a t reference with n - 1 - #parents
    degrees of freedom.  Edges outside ``retained`` score 1.  A child may
    keep at most n - 3 parents; beyond that the regression is declared
    overparameterized (TooManyParents).  A rank-deficient parent design is
    downgraded to a warning and scores 1 for that child's edges.
    """
    cfg = config or InferenceConfig()
    validate_timeseries(ts)
    retained.in_degrees(ts.p)  # range check against this series
    z, responses = lagged_pairs(ts)
    p = ts.p
    limit = ts.n - 3
    scores = np.ones((p, p))
    for child in range(p):
        parents = retained.parents_of(child)
        if not parents:
            continue
        if len(parents) > limit:
            raise TooManyParents(child, len(parents), limit)
        dof = ts.n - 1 - len(parents)
        y = np.ascontiguousarray(responses[:, child])
        x = z[:, list(parents)]
        try:
            if cfg.estimator == "ls":
                fit = fit_ls(y, x, dof=dof)
            else:
                fit = fit_m_estimator(
                    y,
                    x,
                    cfg.estimator,
                    tuning=cfg.tuning(),
                    tol=cfg.irls_tol,
                    max_iter=cfg.irls_max_iter,
                    dof=dof,
                )
        except RankDeficient:
            warnings.warn(
                f"parent design for child {child} is rank deficient; "
                "its edge scores stay at 1",
                RankDeficiencyWarning,
                stacklevel=2,
            )
            continue
        for idx, parent in enumerate(parents):
            scores[child, parent] = fit.p_values[idx]
    return ScoreMatrix(scores)


def threshold_edges(scores: ScoreMatrix, alpha: float) -> EdgeSet:
    """Edges whose score is strictly below alpha."""
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    child_idx, parent_idx = np.nonzero(scores.scores < alpha)
    return EdgeSet.from_pairs(
        (int(j), int(i)) for i, j in zip(child_idx, parent_idx)
    )


def feasible_alpha1(scores: ScoreMatrix, n: int, alpha1: float) -> float:
    """Largest retention threshold <= alpha1 the second step can support.

    On a series of ``n`` time points the second-step regression
    accommodates at most n - 3 parents per child, so a retention
    threshold is feasible exactly when every row of the first-step score
    matrix holds fewer than n - 2 entries strictly below it.  With
    strict-< retention that is equivalent to the threshold not exceeding
    any row's (n - 2)-th smallest score, so the clamp is an order
    statistic of ``scores`` and needs no score recomputation.  Returns
    ``alpha1`` unchanged whenever it is already feasible, in particular
    whenever the series has more time points than variables plus two.

    Raises TooManyParents when no positive threshold is feasible, which
    requires some child to have n - 2 parents scoring exactly zero.
    """
    if not 0 < alpha1 <= 1:
        raise ValueError(f"alpha1 must lie in (0, 1], got {alpha1}")
    if n < 4:
        raise ValueError(f"need at least 4 time points, got {n}")
    limit = n - 3
    if scores.p <= limit:
        return alpha1
    caps = np.partition(scores.scores, limit, axis=1)[:, limit]
    cap = caps.min()
    if cap <= 0.0:
        child = int(caps.argmin())
        blocked = int(np.count_nonzero(scores.scores[child] == 0.0))
        raise TooManyParents(child, blocked, limit)
    return min(alpha1, float(cap))


def bh_select(
    tested: Iterable[tuple[tuple[int, int], float]],
    fdr_level: float,
) -> EdgeSet:
    """Benjamini-Hochberg step-up over the tested edges.

    ``tested`` holds ((parent, child), p_value) pairs; m is the number of
    pairs given, so callers must pass exactly the edges that were actually
    tested.  Selects the k edges with the smallest p-values where k is the
    largest rank i with p_(i) <= (i/m) * fdr_level, breaking ties by
    (p, child, parent); selects none if no rank qualifies.
    """
    if not 0 < fdr_level < 1:
        raise ValueError(f"fdr_level must lie in (0, 1), got {fdr_level}")
    items = []
    for edge, pv in tested:
        parent, child = int(edge[0]), int(edge[1])
        pv = float(pv)
        if not 0 <= pv <= 1:
            raise ValueError(f"p-value {pv} out of [0, 1] for edge {edge}")
        items.append(((parent, child), pv))
    if not items:
        return EdgeSet()
    items.sort(key=lambda item: (item[1], item[0][1], item[0][0]))
    m = len(items)
    k = 0
    for rank, (_, pv) in enumerate(items, start=1):
        if pv <= rank * fdr_level / m:
            k = rank
    return EdgeSet.from_pairs(edge for edge, _ in items[:k])


@dataclass(frozen=True)
class Alpha1GridPoint:
    """In-degree census of the Step-1 graph at one candidate threshold."""

    alpha: float
    n_edges: int
    n_zero: int
    n_one: int
    n_multi: int
    qualifies: bool


@dataclass(frozen=True)
class Alpha1Selection:
    alpha1: float
    degenerate: bool
    grid: tuple[Alpha1GridPoint, ...]


def select_alpha1(
    ts: TimeSeries,
    grid: Sequence[float],
    config: InferenceConfig | None = None,
    s1: ScoreMatrix | None = None,
    n_threads: int = 1,
    engine: str | None = None,
) -> Alpha1Selection:
    """Pick a Step-1 threshold from the in-degree census over a grid.

    A grid point qualifies when the number of single-parent children is
    positive, at least the number of multi-parent children, and at most the
    number of parentless children; the largest qualifying threshold wins.
    If nothing qualifies the largest grid value is returned with
    ``degenerate=True`` so callers know the census never took the expected
    sparse shape.
    """
    values = sorted({float(a) for a in grid})
    if not values:
        raise EmptyGrid("threshold grid is empty")
    for alpha in values:
        if not 0 < alpha <= 1:
            raise ValueError(f"grid thresholds must lie in (0, 1], got {alpha}")
    if s1 is None:
        s1 = step1_scores(ts, config, n_threads, engine)
    points = []
    for alpha in values:
        indeg = (s1.scores < alpha).sum(axis=1)
        n_zero = int((indeg == 0).sum())
        n_one = int((indeg == 1).sum())
        n_multi = int((indeg >= 2).sum())
        qualifies = n_one >= 1 and n_one >= n_multi and n_one <= n_zero
        points.append(
            Alpha1GridPoint(alpha, int(indeg.sum()), n_zero, n_one, n_multi, qualifies)
        )
    chosen = [pt.alpha for pt in points if pt.qualifies]
    if chosen:
        return Alpha1Selection(max(chosen), False, tuple(points))
    return Alpha1Selection(values[-1], True, tuple(points))


def infer(
    ts: TimeSeries,
    config: InferenceConfig | None = None,
    n_threads: int = 1,
    engine: str | None = None,
) -> InferenceResult:
    """Run both steps and the final selection.

    The final edge set comes from Benjamini-Hochberg over the retained
    edges when ``config.fdr_level`` is set, otherwise from the strict
    threshold ``config.alpha2`` on the second-step scores.
    """
    cfg = config or InferenceConfig()
    s1 = step1_scores(ts, cfg, n_threads, engine)
    retained = threshold_edges(s1, cfg.alpha1)
    s2 = step2_scores(ts, retained, cfg)
    if cfg.fdr_level is not None:
        tested = [((j, i), float(s2[i, j])) for j, i in retained]
        edges = bh_select(tested, cfg.fdr_level)
    else:
        edges = threshold_edges(s2, cfg.alpha2)
    return InferenceResult(s1, retained, s2, edges)
