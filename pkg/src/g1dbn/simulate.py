"""Random sparse AR(1) models and simulated panels.

The default draw matches the benchmark protocol this package is tested
against: a given fraction of coefficients is nonzero, nonzero coefficients
and intercepts are uniform on [-0.95, -0.05] union [0.05, 0.95], and noise
variances are uniform on [0.03, 0.08].  Series start at X_1 = B + eps_1 and
are short on purpose; pass ``burn_in`` to discard a transient instead.
"""

from __future__ import annotations

import numpy as np

from .errors import StabilityNotReached
from .model import AR1Model, TimeSeries

__all__ = ["random_ar1_model", "simulate_series"]

# eigenvalue floor when projecting a perturbed noise covariance back to the
# symmetric positive-definite cone
SPD_FLOOR = 1e-8


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _signed_uniform(rng, low, high, size):
    """Uniform magnitudes on [low, high] with independent random signs."""
    magnitude = rng.uniform(low, high, size)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return magnitude * sign


def _spectral_radius(a: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(a))))


def random_ar1_model(
    p: int,
    density: float,
    seed,
    require_stable: bool = False,
    sigma_offdiag_density: float = 0.0,
    coef_low: float = 0.05,
    coef_high: float = 0.95,
    var_low: float = 0.03,
    var_high: float = 0.08,
    max_attempts: int = 100,
) -> AR1Model:
    """Draw a sparse random AR(1) model.

    Each coefficient matrix entry is nonzero independently with probability
    ``density``; nonzero coefficients and all intercepts are signed-uniform
    on [coef_low, coef_high].  Noise variances are uniform on
    [var_low, var_high].  With ``sigma_offdiag_density`` > 0 that fraction
    of off-diagonal covariance entries is made nonzero (signed-uniform on
    the variance range) and the result is projected to the nearest
    symmetric positive-definite matrix, so the written values may shift
    slightly.

    ``require_stable`` redraws the coefficient matrix until its spectral
    radius is below 1, raising StabilityNotReached after ``max_attempts``.
    The same seed always yields the same model.
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    if not 0 <= density <= 1:
        raise ValueError(f"density must lie in [0, 1], got {density}")
    if not 0 <= sigma_offdiag_density <= 1:
        raise ValueError(
            f"sigma_offdiag_density must lie in [0, 1], got {sigma_offdiag_density}"
        )
    if not 0 < coef_low <= coef_high:
        raise ValueError("coefficient bounds must satisfy 0 < low <= high")
    if not 0 < var_low <= var_high:
        raise ValueError("variance bounds must satisfy 0 < low <= high")
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    rng = _rng(seed)

    attempts = max_attempts if require_stable else 1
    a = None
    for _ in range(attempts):
        mask = rng.random((p, p)) < density
        coefs = _signed_uniform(rng, coef_low, coef_high, (p, p))
        candidate = np.where(mask, coefs, 0.0)
        if not require_stable or _spectral_radius(candidate) < 1.0:
            a = candidate
            break
    if a is None:
        raise StabilityNotReached(max_attempts)

    b = _signed_uniform(rng, coef_low, coef_high, p)
    variances = rng.uniform(var_low, var_high, p)
    if sigma_offdiag_density == 0.0:
        return AR1Model(a, b, variances)

    sigma = np.diag(variances)
    rows, cols = np.triu_indices(p, k=1)
    mask = rng.random(rows.size) < sigma_offdiag_density
    values = np.where(mask, _signed_uniform(rng, var_low, var_high, rows.size), 0.0)
    sigma[rows, cols] = values
    sigma[cols, rows] = values
    eigvals, eigvecs = np.linalg.eigh(sigma)
    eigvals = np.maximum(eigvals, SPD_FLOOR)
    sigma = (eigvecs * eigvals) @ eigvecs.T
    sigma = (sigma + sigma.T) / 2
    return AR1Model(a, b, sigma)


def simulate_series(
    model: AR1Model,
    n: int,
    seed,
    noise: str = "gaussian",
    uniform_low: float = -2.0,
    uniform_high: float = 2.0,
    burn_in: int = 0,
) -> TimeSeries:
    """Simulate n observations of X_t = A X_{t-1} + B + eps_t.

    ``noise="gaussian"`` draws eps_t from N(0, Sigma) using the model's
    noise covariance.  ``noise="uniform"`` draws each coordinate uniformly
    on [uniform_low, uniform_high], deliberately ignoring Sigma (a
    heavy-handed mismatch used to stress the estimators).  The first kept
    row is X_1 = B + eps_1 unless ``burn_in`` > 0, in which case that many
    initial rows are simulated and discarded.  The same seed always yields
    the same series.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")
    if noise not in ("gaussian", "uniform"):
        raise ValueError(f"noise must be 'gaussian' or 'uniform', got {noise!r}")
    if noise == "uniform" and not uniform_low < uniform_high:
        raise ValueError("uniform noise bounds must satisfy low < high")
    rng = _rng(seed)
    p = model.p

    if noise == "gaussian":
        if model.has_full_sigma:
            chol = np.linalg.cholesky(model.sigma_matrix())

            def eps():
                return chol @ rng.standard_normal(p)
        else:
            root = np.sqrt(model.sigma)

            def eps():
                return root * rng.standard_normal(p)
    else:
        def eps():
            return rng.uniform(uniform_low, uniform_high, p)

    total = n + burn_in
    data = np.empty((total, p))
    data[0] = model.b + eps()
    for t in range(1, total):
        data[t] = model.a @ data[t - 1] + model.b + eps()
    return TimeSeries(data[burn_in:])
