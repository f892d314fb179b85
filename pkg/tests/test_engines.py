"""Engine discovery, resolution, and cross-engine agreement."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import make_noise_series, make_panel
from g1dbn._engine import available_engines, default_engine, resolve_engine
from g1dbn.inference import step1_scores


class TestDiscovery:
    def test_fallback_engines_are_always_available(self):
        names = available_engines()
        assert "numpy" in names
        assert "loop" in names

    def test_native_listed_first_when_built(self):
        names = available_engines()
        if "native" in names:
            assert names[0] == "native"

    def test_default_prefers_native(self):
        if "native" in available_engines():
            assert default_engine() == "native"
        else:
            assert default_engine() == "numpy"


class TestResolution:
    def test_none_and_auto_resolve_to_the_default(self, monkeypatch):
        monkeypatch.delenv("G1DBN_ENGINE", raising=False)
        assert resolve_engine(None) == default_engine()
        assert resolve_engine("auto") == default_engine()

    def test_environment_variable_overrides_auto(self, monkeypatch):
        monkeypatch.setenv("G1DBN_ENGINE", "loop")
        assert resolve_engine(None) == "loop"
        assert resolve_engine("auto") == "loop"

    def test_explicit_name_beats_the_environment(self, monkeypatch):
        monkeypatch.setenv("G1DBN_ENGINE", "loop")
        assert resolve_engine("numpy") == "numpy"

    def test_unknown_name_is_rejected(self):
        with pytest.raises(ValueError):
            resolve_engine("fortran")

    def test_unknown_environment_value_is_rejected(self, monkeypatch):
        monkeypatch.setenv("G1DBN_ENGINE", "fortran")
        with pytest.raises(ValueError):
            resolve_engine("auto")


class TestAgreement:
    def test_engines_agree_on_random_panels(self):
        for seed in (211, 223, 227):
            _, ts = make_panel(6, 18, seed=seed)
            results = {
                name: step1_scores(ts, engine=name).scores
                for name in available_engines()
            }
            baseline = results.pop("loop")
            for name, scores in results.items():
                np.testing.assert_allclose(
                    scores, baseline, atol=1e-9, err_msg=name
                )

    def test_engines_agree_on_white_noise(self):
        ts = make_noise_series(5, 14, seed=229)
        results = [
            step1_scores(ts, engine=name).scores
            for name in available_engines()
        ]
        for scores in results[1:]:
            np.testing.assert_allclose(scores, results[0], atol=1e-9)

    def test_reruns_are_bit_identical_within_an_engine(self):
        _, ts = make_panel(5, 16, seed=233)
        for name in available_engines():
            first = step1_scores(ts, engine=name).scores
            second = step1_scores(ts, engine=name).scores
            np.testing.assert_array_equal(first, second)

    def test_thread_count_never_changes_the_bits(self):
        _, ts = make_panel(6, 18, seed=239)
        for name in available_engines():
            serial = step1_scores(ts, n_threads=1, engine=name).scores
            for n_threads in (2, 4):
                threaded = step1_scores(
                    ts, n_threads=n_threads, engine=name
                ).scores
                np.testing.assert_array_equal(threaded, serial)
