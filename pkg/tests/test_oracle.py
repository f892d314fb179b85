"""Population quantities: stationary covariance, partials, and edge sets."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import brentq

from _oracles import lyapunov_residual
from g1dbn.errors import BudgetExceeded, SingularConditioning, Unstable
from g1dbn.model import AR1Model
from g1dbn.oracle import (
    joint_lag_covariance,
    partial_covariance,
    population_gmin,
    population_gq,
    property_report,
    stationary_covariance,
)
from g1dbn.simulate import random_ar1_model, simulate_series


def _diag_model(coefs, variance=0.05):
    coefs = np.asarray(coefs, dtype=float)
    p = coefs.size
    return AR1Model(np.diag(coefs), np.zeros(p), np.full(p, variance))


class TestStationaryCovariance:
    def test_zero_coefficients_return_the_noise_covariance(self):
        model = AR1Model(np.zeros((3, 3)), np.zeros(3), np.array([0.03, 0.05, 0.08]))
        np.testing.assert_allclose(
            stationary_covariance(model), np.diag([0.03, 0.05, 0.08]), atol=1e-15
        )

    def test_scalar_chain_has_the_closed_form_variance(self):
        model = AR1Model(np.array([[0.5]]), np.zeros(1), np.array([0.04]))
        gamma = stationary_covariance(model)
        assert gamma[0, 0] == pytest.approx(0.04 / 0.75, rel=1e-12)

    def test_fixed_point_residual_is_tiny_on_random_models(self):
        for seed in range(300, 310):
            model = random_ar1_model(6, 0.3, seed=seed, require_stable=True)
            gamma = stationary_covariance(model)
            assert lyapunov_residual(model, gamma) < 1e-12

    def test_result_is_symmetric(self):
        model = random_ar1_model(5, 0.4, seed=311, require_stable=True)
        gamma = stationary_covariance(model)
        np.testing.assert_array_equal(gamma, gamma.T)

    def test_unstable_models_are_refused(self):
        with pytest.raises(Unstable):
            stationary_covariance(_diag_model([1.2, 0.5]))
        with pytest.raises(Unstable):
            stationary_covariance(_diag_model([1.0, 0.5]))

    def test_long_simulation_reproduces_the_covariance(self):
        model = random_ar1_model(3, 0.4, seed=313, require_stable=True)
        gamma = stationary_covariance(model)
        ts = simulate_series(model, 100000, seed=317, burn_in=500)
        centered = ts.data - ts.data.mean(axis=0)
        empirical = centered.T @ centered / (ts.n - 1)
        scale = float(np.max(np.abs(gamma)))
        assert np.max(np.abs(empirical - gamma)) < 0.05 * scale


class TestJointLagCovariance:
    def test_blocks_are_gamma_and_the_lag_cross_covariance(self):
        model = random_ar1_model(4, 0.4, seed=331, require_stable=True)
        gamma = stationary_covariance(model)
        cross = model.a @ gamma
        joint = joint_lag_covariance(model)
        p = model.p
        np.testing.assert_allclose(joint[:p, :p], gamma, atol=1e-14)
        np.testing.assert_allclose(joint[p:, p:], gamma, atol=1e-14)
        np.testing.assert_allclose(joint[:p, p:], cross, atol=1e-14)
        np.testing.assert_allclose(joint[p:, :p], cross.T, atol=1e-14)

    def test_shape_and_symmetry(self):
        model = random_ar1_model(3, 0.4, seed=337, require_stable=True)
        joint = joint_lag_covariance(model)
        assert joint.shape == (6, 6)
        np.testing.assert_allclose(joint, joint.T, atol=1e-14)


class TestPartialCovariance:
    def test_empty_conditioning_is_the_plain_cross_entry(self):
        model = random_ar1_model(4, 0.5, seed=347, require_stable=True)
        joint = joint_lag_covariance(model)
        cross = model.a @ stationary_covariance(model)
        for child in range(4):
            for parent in range(4):
                got = partial_covariance(joint, child, parent)
                assert got == pytest.approx(cross[child, parent], abs=1e-12)

    def test_independent_chains_have_zero_cross_covariance(self):
        joint = joint_lag_covariance(_diag_model([0.5, -0.4, 0.3]))
        assert partial_covariance(joint, 0, 1) == pytest.approx(0.0, abs=1e-12)
        assert partial_covariance(joint, 2, 0, (1,)) == pytest.approx(0.0, abs=1e-12)

    def test_full_order_partial_tracks_the_coefficient_support(self):
        model = random_ar1_model(4, 0.5, seed=349, require_stable=True)
        joint = joint_lag_covariance(model)
        for child in range(4):
            for parent in range(4):
                others = tuple(k for k in range(4) if k != parent)
                value = partial_covariance(joint, child, parent, others)
                if model.a[child, parent] != 0.0:
                    assert abs(value) > 1e-9
                else:
                    assert abs(value) <= 1e-9

    def test_singular_conditioning_block_is_reported(self):
        model = _diag_model([0.5, 0.4])
        joint = joint_lag_covariance(model)
        joint[3, 3] = 0.0
        with pytest.raises(SingularConditioning):
            partial_covariance(joint, 0, 0, (1,))

    def test_argument_validation(self):
        model = _diag_model([0.5, 0.4])
        joint = joint_lag_covariance(model)
        with pytest.raises(ValueError):
            partial_covariance(joint[:3, :3], 0, 1)
        with pytest.raises(ValueError):
            partial_covariance(joint, 2, 0)
        with pytest.raises(ValueError):
            partial_covariance(joint, 0, 1, (1,))
        with pytest.raises(ValueError):
            partial_covariance(joint, 0, 1, (0, 0))


class TestPopulationGmin:
    def test_edges_follow_the_support(self):
        a = np.zeros((3, 3))
        a[0, 1] = 0.5
        a[2, 0] = -0.4
        model = AR1Model(a, np.zeros(3), np.full(3, 0.05))
        assert population_gmin(model).edges == frozenset({(1, 0), (0, 2)})

    def test_tolerance_is_a_strict_cutoff(self):
        a = np.zeros((2, 2))
        a[0, 1] = 1e-12
        a[1, 1] = 0.5
        model = AR1Model(a, np.zeros(2), np.full(2, 0.05))
        assert population_gmin(model).edges == frozenset({(1, 1)})
        assert population_gmin(model, tol=0.0).edges == frozenset(
            {(1, 0), (1, 1)}
        )

    def test_negative_tolerance_is_rejected(self):
        with pytest.raises(ValueError):
            population_gmin(_diag_model([0.5, 0.4]), tol=-1e-3)


class TestPopulationGq:
    def test_full_order_recovers_the_direct_graph(self):
        for seed in (353, 359, 367):
            model = random_ar1_model(4, 0.4, seed=seed, require_stable=True)
            full = population_gq(model, 3)
            assert full.edges == population_gmin(model).edges

    def test_independent_chains_show_only_self_loops_at_every_order(self):
        model = _diag_model([0.5, -0.4, 0.3])
        loops = frozenset({(0, 0), (1, 1), (2, 2)})
        for q in (0, 1, 2):
            assert population_gq(model, q).edges == loops

    def test_order_two_suffices_for_in_degree_two(self):
        a = np.zeros((5, 5))
        a[0, 1], a[0, 2] = 0.5, -0.4
        a[1, 3] = 0.6
        a[2, 4], a[2, 0] = 0.5, 0.3
        a[3, 3] = 0.4
        model = AR1Model(a, np.zeros(5), np.full(5, 0.05))
        gmin = population_gmin(model)
        assert gmin.max_in_degree(5) == 2
        assert population_gq(model, 2).edges == gmin.edges
        low = population_gq(model, 1)
        assert gmin.issubset(low)
        assert len(low) > len(gmin)

    def test_order_bounds_are_checked(self):
        model = _diag_model([0.5, 0.4, 0.3])
        with pytest.raises(ValueError):
            population_gq(model, -1)
        with pytest.raises(ValueError):
            population_gq(model, 3)

    def test_subset_budget_guards_the_enumeration(self):
        model = random_ar1_model(8, 0.3, seed=373, require_stable=True)
        with pytest.raises(BudgetExceeded):
            population_gq(model, 3, budget=10)

    def test_low_order_graph_contains_the_direct_graph_on_random_models(self):
        checked = 0
        for seed in range(700, 760):
            p = 4 + seed % 5
            model = random_ar1_model(p, 0.25, seed=seed, require_stable=True)
            gmin = population_gmin(model)
            maxdeg = gmin.max_in_degree(p)
            if maxdeg > p - 1:
                continue
            checked += 1
            for q in range(maxdeg + 1):
                assert gmin.issubset(population_gq(model, q))
            assert population_gq(model, maxdeg).edges == gmin.edges
        assert checked >= 50


class TestUnfaithfulCancellation:
    def test_tuned_coefficient_hides_an_edge_from_the_marginal_graph(self):
        def marginal_cross(a01):
            a = np.array([[0.5, a01], [0.5, -0.5]])
            model = AR1Model(a, np.zeros(2), np.full(2, 0.05))
            return (model.a @ stationary_covariance(model))[0, 1]

        root = brentq(marginal_cross, -0.2, -0.05, xtol=1e-14)
        a = np.array([[0.5, root], [0.5, -0.5]])
        model = AR1Model(a, np.zeros(2), np.full(2, 0.05))
        assert model.spectral_radius() < 1.0
        gmin = population_gmin(model)
        assert (1, 0) in gmin
        assert (1, 0) not in population_gq(model, 0)
        assert (1, 0) in population_gq(model, 1)
        report, _, _ = property_report(model, 0)
        statuses = {c.label: c.status for c in report.checks}
        assert statuses["direct graph subset of G(0)"] == "FAIL"


class TestChainMotif:
    def test_order_one_graph_carries_a_spurious_grandparent_edge(self):
        a = np.array(
            [
                [0.5, 0.6, 0.0],
                [0.7, 0.0, 0.0],
                [0.0, 0.8, 0.0],
            ]
        )
        model = AR1Model(a, np.zeros(3), np.full(3, 0.05))
        gmin = population_gmin(model)
        g1 = population_gq(model, 1)
        assert (2, 0) not in gmin
        assert (2, 0) in g1
        assert gmin.issubset(g1)
        assert population_gq(model, 2).edges == gmin.edges


class TestPropertyReport:
    def test_all_checks_pass_when_the_order_covers_the_in_degree(self):
        a = np.zeros((5, 5))
        a[0, 1], a[0, 2] = 0.5, -0.4
        a[1, 3] = 0.6
        a[2, 4], a[2, 0] = 0.5, 0.3
        a[3, 3] = 0.4
        model = AR1Model(a, np.zeros(5), np.full(5, 0.05))
        report, gmin, gq = property_report(model, 2)
        assert report.q == 2
        assert report.max_in_degree == 2
        assert report.n_gmin == len(gmin) == 6
        assert report.n_gq == len(gq) == 6
        assert all(c.status == "PASS" for c in report.checks)
        labels = [c.label for c in report.checks]
        assert "G(2) == direct graph (self-certified)" in labels

    def test_insufficient_order_skips_the_subset_guarantee(self):
        a = np.array(
            [
                [0.5, 0.6, 0.0],
                [0.7, 0.0, 0.0],
                [0.0, 0.8, 0.0],
            ]
        )
        model = AR1Model(a, np.zeros(3), np.full(3, 0.05))
        report, _, _ = property_report(model, 1)
        statuses = {c.label: c.status for c in report.checks}
        assert statuses["G(1) subset of direct graph"] == "SKIPPED"
        assert statuses["direct graph subset of G(1)"] == "PASS"
