"""Core data types: time series, AR(1) models, score matrices, edge sets.

Conventions used throughout the package:

* variables are indexed 0..p-1 internally (file formats are 1-based),
* an edge is the ordered pair ``(parent, child)`` meaning the parent acts on
  the child with a one-step lag,
* score matrices are indexed ``[child, parent]`` and lower scores mean
  stronger edges,
* self-loops are ordinary edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import NonFinite, TooFewTimePoints, TooFewVariables

__all__ = [
    "TimeSeries",
    "AR1Model",
    "ScoreMatrix",
    "EdgeSet",
    "InferenceConfig",
    "validate_timeseries",
    "lagged_pairs",
]

ESTIMATORS = ("ls", "huber", "tukey")

# Residual-scale constants for the bounded-influence estimators (95%
# efficiency at the Gaussian model).
HUBER_K = 1.345
TUKEY_C = 4.685


def _frozen_array(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TimeSeries:
    """An n x p panel of observations, rows ordered by time.

    The constructor only enforces shape; statistical preconditions (length,
    finiteness) are checked by :func:`validate_timeseries` so that tests and
    simulators can build degenerate panels on purpose.
    """

    data: np.ndarray
    variable_names: tuple[str, ...] | None = None

    def __post_init__(self):
        arr = np.array(self.data, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"series data must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"series data must be non-empty, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        if self.variable_names is not None:
            names = tuple(str(v) for v in self.variable_names)
            if len(names) != arr.shape[1]:
                raise ValueError(
                    f"{len(names)} variable names for {arr.shape[1]} variables"
                )
            object.__setattr__(self, "variable_names", names)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class AR1Model:
    """First-order vector autoregression ``X_t = A X_{t-1} + B + eps_t``.

    ``a[i, j]`` is the effect of variable j at time t-1 on variable i at
    time t, so the nonzero pattern of ``a`` read as ``(parent=j, child=i)``
    is the network the inference procedures try to recover.  ``sigma`` is
    either a length-p vector of noise variances or a full p x p covariance
    matrix; it must be strictly positive definite.
    """

    a: np.ndarray
    b: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        a = _frozen_array(self.a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"coefficient matrix must be square, got {a.shape}")
        p = a.shape[0]
        b = _frozen_array(self.b)
        if b.shape != (p,):
            raise ValueError(f"intercept must have shape ({p},), got {b.shape}")
        sigma = _frozen_array(self.sigma)
        if sigma.shape == (p,):
            if not np.all(sigma > 0):
                raise ValueError("noise variances must be strictly positive")
        elif sigma.shape == (p, p):
            if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-12):
                raise ValueError("noise covariance must be symmetric")
            if np.min(np.linalg.eigvalsh(sigma)) <= 0:
                raise ValueError("noise covariance must be positive definite")
        else:
            raise ValueError(
                f"sigma must have shape ({p},) or ({p}, {p}), got {sigma.shape}"
            )
        for name, arr in (("a", a), ("b", b), ("sigma", sigma)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"model component {name} has non-finite entries")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "sigma", sigma)

    @property
    def p(self) -> int:
        return self.a.shape[0]

    @property
    def has_full_sigma(self) -> bool:
        return self.sigma.ndim == 2

    def sigma_matrix(self) -> np.ndarray:
        """Noise covariance as a full p x p matrix."""
        if self.has_full_sigma:
            return np.array(self.sigma)
        return np.diag(self.sigma)

    def spectral_radius(self) -> float:
        """max |eigenvalue| of A; the process is stable iff this is < 1."""
        return float(np.max(np.abs(np.linalg.eigvals(self.a))))

    def is_stable(self) -> bool:
        return self.spectral_radius() < 1.0


@dataclass(frozen=True)
class ScoreMatrix:
    """p x p matrix of edge scores in [0, 1], indexed ``[child, parent]``.

    Lower scores mean stronger evidence for the edge parent -> child.
    """

    scores: np.ndarray

    def __post_init__(self):
        arr = np.array(self.scores, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"score matrix must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("score matrix has non-finite entries")
        if np.any(arr < 0) or np.any(arr > 1):
            raise ValueError("scores must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "scores", arr)

    @property
    def p(self) -> int:
        return self.scores.shape[0]

    def __getitem__(self, key) -> float:
        return self.scores[key]

    @classmethod
    def from_edge_set(cls, edges: "EdgeSet", p: int) -> "ScoreMatrix":
        """Indicator scores: 0 on the given edges, 1 elsewhere."""
        arr = np.ones((p, p))
        for parent, child in edges:
            arr[child, parent] = 0.0
        return cls(arr)


@dataclass(frozen=True)
class EdgeSet:
    """Immutable set of ``(parent, child)`` pairs with non-negative indices.

    Iteration order is deterministic (sorted by parent, then child).
    """

    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        cleaned = set()
        for pair in self.edges:
            try:
                parent, child = pair
            except (TypeError, ValueError):
                raise ValueError(f"edge must be a (parent, child) pair, got {pair!r}")
            parent = int(parent)
            child = int(child)
            if parent < 0 or child < 0:
                raise ValueError(f"edge indices must be >= 0, got {pair!r}")
            cleaned.add((parent, child))
        object.__setattr__(self, "edges", frozenset(cleaned))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "EdgeSet":
        return cls(frozenset(tuple(pair) for pair in pairs))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self.edges))

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.edges

    def issubset(self, other: "EdgeSet") -> bool:
        return self.edges <= other.edges

    def parents_of(self, child: int) -> tuple[int, ...]:
        return tuple(sorted(j for j, i in self.edges if i == child))

    def in_degrees(self, p: int) -> np.ndarray:
        """Number of parents of each of the p children."""
        counts = np.zeros(p, dtype=int)
        for parent, child in self.edges:
            if parent >= p or child >= p:
                raise ValueError(f"edge {(parent, child)} out of range for p={p}")
            counts[child] += 1
        return counts

    def max_in_degree(self, p: int) -> int:
        if not self.edges:
            return 0
        return int(self.in_degrees(p).max())


@dataclass(frozen=True)
class InferenceConfig:
    """Knobs for the two-step inference procedure.

    alpha1 thresholds the first-step scores (strict <) to form the retained
    graph; the final selection uses alpha2, or Benjamini-Hochberg at
    fdr_level when that is set (fdr_level takes precedence).
    """

    estimator: str = "ls"
    alpha1: float = 0.7
    alpha2: float = 0.05
    fdr_level: float | None = None
    huber_k: float = HUBER_K
    tukey_c: float = TUKEY_C
    irls_tol: float = 1e-6
    irls_max_iter: int = 50

    def __post_init__(self):
        est = str(self.estimator).lower()
        if est not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}, got {self.estimator!r}")
        object.__setattr__(self, "estimator", est)
        for name in ("alpha1", "alpha2"):
            value = getattr(self, name)
            if not (0 < value <= 1):
                raise ValueError(f"{name} must lie in (0, 1], got {value}")
        if self.fdr_level is not None and not (0 < self.fdr_level < 1):
            raise ValueError(f"fdr_level must lie in (0, 1), got {self.fdr_level}")
        if self.huber_k <= 0 or self.tukey_c <= 0:
            raise ValueError("estimator tuning constants must be positive")
        if self.irls_tol <= 0:
            raise ValueError("irls_tol must be positive")
        if self.irls_max_iter < 1:
            raise ValueError("irls_max_iter must be >= 1")

    def tuning(self) -> float:
        """Tuning constant for the configured estimator (0.0 for plain LS)."""
        if self.estimator == "huber":
            return self.huber_k
        if self.estimator == "tukey":
            return self.tukey_c
        return 0.0


def validate_timeseries(ts: TimeSeries, for_step1: bool = False) -> None:
    """Check that a series is usable: finite entries, n >= 2, p >= 2.

    First-step scoring regresses each variable on two lagged predictors plus
    an intercept, which needs n >= 5 so the t reference has positive degrees
    of freedom; pass ``for_step1=True`` to enforce that.
    """
    min_n = 5 if for_step1 else 2
    if ts.n < min_n:
        raise TooFewTimePoints(ts.n, min_n)
    if ts.p < 2:
        raise TooFewVariables(ts.p, 2)
    finite = np.isfinite(ts.data)
    if not finite.all():
        row, col = np.argwhere(~finite)[0]
        raise NonFinite(int(row), int(col))


def lagged_pairs(ts: TimeSeries) -> tuple[np.ndarray, np.ndarray]:
    """Split a series into (predictors, responses) for one-step regressions.

    Row t of the predictors is ``data[t]`` and row t of the responses is
    ``data[t+1]``; both have n-1 rows.
    """
    if ts.n < 2:
        raise TooFewTimePoints(ts.n, 2)
    return ts.data[:-1], ts.data[1:]
