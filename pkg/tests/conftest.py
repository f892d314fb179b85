"""Shared fixtures: small deterministic models and panels."""

from __future__ import annotations

import numpy as np
import pytest

from g1dbn.model import TimeSeries
from g1dbn.simulate import random_ar1_model, simulate_series


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)


def make_panel(p, n, seed, density=0.3):
    """A stable random model and a short panel simulated from it."""
    rng = np.random.default_rng(seed)
    model = random_ar1_model(p, density, rng, require_stable=True)
    series = simulate_series(model, n, rng)
    return model, series


def make_noise_series(p, n, seed):
    """Pure white-noise panel (no dependence between variables)."""
    rng = np.random.default_rng(seed)
    return TimeSeries(rng.standard_normal((n, p)))


@pytest.fixture
def small_panel():
    return make_panel(4, 12, seed=7)


@pytest.fixture
def noise_series():
    return make_noise_series(5, 14, seed=11)
