"""Exception hierarchy shared by all g1dbn modules."""

from __future__ import annotations


class G1dbnError(Exception):
    """Base class for every error raised by this package."""


class NonFinite(G1dbnError):
    """A data matrix contains a NaN or infinite entry."""

    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"non-finite entry at row {row}, column {col}")


class TooFewTimePoints(G1dbnError):
    """The series is too short for the requested operation."""

    def __init__(self, n: int, minimum: int):
        self.n = n
        self.minimum = minimum
        super().__init__(f"series has {n} time points, need at least {minimum}")


class TooFewVariables(G1dbnError):
    """The series has fewer variables than the operation supports."""

    def __init__(self, p: int, minimum: int):
        self.p = p
        self.minimum = minimum
        super().__init__(f"series has {p} variables, need at least {minimum}")


class TooFewRows(G1dbnError):
    """A regression design has no residual degrees of freedom."""

    def __init__(self, n_rows: int, n_coef: int):
        self.n_rows = n_rows
        self.n_coef = n_coef
        super().__init__(
            f"{n_rows} rows cannot support {n_coef} coefficients with a "
            "positive residual degree of freedom"
        )


class RankDeficient(G1dbnError):
    """The regression design matrix is rank deficient."""


class InvalidDof(G1dbnError):
    """Degrees of freedom must be a positive integer."""

    def __init__(self, dof):
        self.dof = dof
        super().__init__(f"degrees of freedom must be an integer >= 1, got {dof!r}")


class TooManyParents(G1dbnError):
    """A Step-2 target has more retained parents than the series can fit.

    The classical advice for this situation is kept verbatim in the message:
    choose a higher threshold alpha1.
    """

    def __init__(self, target: int, n_parents: int, limit: int):
        self.target = target
        self.n_parents = n_parents
        self.limit = limit
        super().__init__(
            f"target {target} has {n_parents} retained parents but the series "
            f"supports at most {limit}; choose a higher threshold alpha1"
        )


class EmptyGrid(G1dbnError):
    """select_alpha1 was given an empty threshold grid."""


class EmptyTruth(G1dbnError):
    """Evaluation against an empty true edge set is undefined."""


class Unstable(G1dbnError):
    """The AR(1) process has no stationary distribution."""

    def __init__(self, spectral_radius: float):
        self.spectral_radius = spectral_radius
        super().__init__(
            f"spectral radius {spectral_radius:.6g} >= 1; no stationary covariance"
        )


class StabilityNotReached(G1dbnError):
    """Rejection sampling failed to draw a stable model."""

    def __init__(self, attempts: int):
        self.attempts = attempts
        super().__init__(f"no stable model found in {attempts} attempts")


class SingularConditioning(G1dbnError):
    """A conditioning covariance block is numerically singular."""


class BudgetExceeded(G1dbnError):
    """An exhaustive oracle enumeration would exceed its work budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"enumeration needs ~{required} subset evaluations, budget is {budget}"
        )


class RankDeficiencyWarning(UserWarning):
    """Soft diagnostic: a full regression was rank deficient and its scores
    were set to 1."""
