import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from csdex import (
    Panel,
    alpha_for_cutoff,
    autocov_hat,
    autocov_profile,
    concentrated_objective,
    cutoff_for_alpha,
    joint_estimate,
    joint_objective,
    joint_objective_parts,
    marginal_alpha,
    profiled_kappa,
    select_tau,
)
from csdex.errors import DegenerateDataError, InvalidKappaError, InvalidLagError
from csdex.estimators import _ProfileSums, _kappa_from_parts

from conftest import (
    numeric_golden_min,
    numeric_parabolic_min,
    oracle_exhaustive_joint,
    oracle_joint_objective,
    oracle_profile,
    random_panel,
)


def synthetic_piecewise_profile(n_sections, cutoff, kappa):
    """Noise-free profile: level kappa up to the cutoff, exact decay beyond."""
    n = np.arange(1, n_sections + 1, dtype=float)
    sigma = np.where(n <= cutoff, kappa, kappa * cutoff**2 / n**2)
    return sigma


class TestJointObjective:
    def test_nonnegative(self, rng):
        p = random_panel(rng, 7, 18)
        for alpha in (0.0, 0.3, 0.7, 1.0):
            assert joint_objective(p, alpha, 0.11, 1) >= 0.0

    def test_matches_bruteforce(self, rng):
        data = rng.standard_normal((6, 20))
        p = Panel(data)
        sigma = oracle_profile(data, 1)
        cutoff = cutoff_for_alpha(6, 0.5)
        expected = oracle_joint_objective(sigma, cutoff, 0.3)
        assert joint_objective(p, 0.5, 0.3, 1) == pytest.approx(expected, rel=1e-10)

    def test_zero_at_perfect_fit(self):
        sigma = synthetic_piecewise_profile(50, 50, 0.7)  # alpha = 1: flat level
        sums = _ProfileSums(sigma)
        assert sums.objective(50, 0.7) == pytest.approx(0.0, abs=1e-18)


class TestProfiledKappa:
    def test_recovers_exact_level(self):
        sigma = synthetic_piecewise_profile(50, 10, 2.0)
        sums = _ProfileSums(sigma)
        kappa = _kappa_from_parts(sums.parts(10), 10)
        assert kappa == pytest.approx(2.0, rel=1e-12)

    def test_alpha_one_is_weighted_average(self, rng):
        p = random_panel(rng, 8, 25)
        sigma = autocov_profile(p, 1).sigma_hat
        n = np.arange(1, 9, dtype=float)
        expected = (n**3 * sigma).sum() / (n**3).sum()
        assert profiled_kappa(p, 1.0, 1) == pytest.approx(expected, rel=1e-12)

    def test_agrees_with_numeric_minimizer(self, rng):
        for _ in range(5):
            p = random_panel(rng, 7, 16)
            for alpha in (0.2, 0.55, 0.9):
                kappa = profiled_kappa(p, alpha, 1)

                def objective(k, _alpha=alpha):
                    return joint_objective(p, _alpha, k, 1)

                numeric = numeric_parabolic_min(objective)
                assert abs(kappa - numeric) <= 1e-9
                # comparison-only search agrees at its attainable resolution
                golden = numeric_golden_min(objective, kappa - 2.0, kappa + 2.0)
                assert abs(kappa - golden) <= 5e-8
                # scipy's brent lands in the same noise floor
                result = minimize_scalar(
                    objective,
                    bracket=(kappa - 1.0, kappa + 1.0),
                    method="brent",
                    options={"xtol": 1e-12},
                )
                assert abs(kappa - result.x) <= 5e-8

    def test_kappa_optimality(self, rng):
        p = random_panel(rng, 9, 20)
        for cutoff in range(1, 10):
            alpha = alpha_for_cutoff(9, cutoff)
            kappa = profiled_kappa(p, alpha, 2)
            at_opt = joint_objective(p, alpha, kappa, 2)
            eps = 1e-3 * (1.0 + abs(kappa))
            assert joint_objective(p, alpha, kappa + eps, 2) > at_opt
            assert joint_objective(p, alpha, kappa - eps, 2) > at_opt


class TestConcentratedObjective:
    def test_concentration_identity(self, rng):
        for _ in range(5):
            p = random_panel(rng, 6, 20)
            parts = joint_objective_parts(p, 0.5, 1)
            for cutoff in range(1, 7):
                alpha = alpha_for_cutoff(6, cutoff)
                kappa = profiled_kappa(p, alpha, 1)
                lhs = joint_objective(p, alpha, kappa, 1) + concentrated_objective(
                    p, alpha, 1
                )
                assert lhs == pytest.approx(parts.q_total, rel=1e-8)

    def test_argmax_equals_argmin(self, rng):
        p = random_panel(rng, 8, 22)
        cutoffs = range(1, 9)
        conc = [concentrated_objective(p, alpha_for_cutoff(8, k), 1) for k in cutoffs]
        direct = [
            joint_objective(
                p, alpha_for_cutoff(8, k), profiled_kappa(p, alpha_for_cutoff(8, k), 1), 1
            )
            for k in cutoffs
        ]
        assert int(np.argmax(conc)) == int(np.argmin(direct))

    def test_noise_free_profile_peaks_at_true_cutoff(self):
        sigma = synthetic_piecewise_profile(50, 10, 2.0)
        sums = _ProfileSums(sigma)
        scores = sums.concentrated()
        assert int(np.argmax(scores)) + 1 == 10


class TestJointEstimate:
    def test_noise_free_recovery(self):
        sigma = synthetic_piecewise_profile(50, 10, 2.0)
        sums = _ProfileSums(sigma)
        cutoff = int(np.argmax(sums.concentrated())) + 1
        kappa = _kappa_from_parts(sums.parts(cutoff), cutoff)
        assert cutoff == 10
        assert kappa == pytest.approx(2.0, rel=1e-12)
        assert alpha_for_cutoff(50, cutoff) == pytest.approx(
            math.log(10) / math.log(50)
        )

    def test_matches_exhaustive_oracle(self, rng):
        for _ in range(20):
            n = int(rng.integers(4, 13))
            t = int(rng.integers(6, 16))
            data = rng.standard_normal((n, t))
            tau = int(rng.integers(0, min(3, t - 2) + 1))
            result = joint_estimate(Panel(data), tau)
            _, oracle_cutoff, oracle_kappa = oracle_exhaustive_joint(data, tau)
            assert result.cutoff_n == oracle_cutoff
            assert result.kappa == pytest.approx(oracle_kappa, abs=1e-6)

    def test_scale_equivariance(self, rng):
        data = rng.standard_normal((10, 30))
        base = joint_estimate(Panel(data), 1)
        scaled = joint_estimate(Panel(3.0 * data), 1)
        assert scaled.cutoff_n == base.cutoff_n
        assert scaled.alpha == base.alpha
        assert scaled.kappa == pytest.approx(9.0 * base.kappa, rel=1e-10)
        assert scaled.diagnostics["concentrated"] == pytest.approx(
            81.0 * base.diagnostics["concentrated"], rel=1e-10
        )

    def test_lag_zero_uses_generic_path(self, rng):
        p = random_panel(rng, 8, 20)
        result = joint_estimate(p, 0)
        sigma = autocov_profile(p, 0).sigma_hat
        sums = _ProfileSums(sigma)
        cutoff = int(np.argmax(sums.concentrated())) + 1
        assert result.cutoff_n == cutoff
        assert result.objective_value == pytest.approx(
            sums.objective(cutoff, result.kappa), rel=1e-12
        )

    def test_result_fields(self, rng):
        p = random_panel(rng, 6, 15)
        result = joint_estimate(p, 1)
        assert result.method == "joint"
        assert result.objective_value >= 0.0
        assert 1 <= result.cutoff_n <= 6
        assert cutoff_for_alpha(6, result.alpha) == result.cutoff_n
        assert "kappa_quartic_numerator" in result.diagnostics

    def test_invalid_lag(self, rng):
        with pytest.raises(InvalidLagError):
            joint_estimate(random_panel(rng, 4, 8), 7)


class TestMarginalAlpha:
    def test_kappa_equal_sigma_gives_one(self, rng):
        p = random_panel(rng, 5, 12)
        sigma = autocov_hat(p, 5, 1)
        result = marginal_alpha(p, 1, sigma)
        assert result.alpha == pytest.approx(1.0, abs=1e-12)
        assert result.method == "marginal"

    def test_sigma_equal_kappa_over_n4_gives_zero(self, rng):
        p = random_panel(rng, 5, 12)
        sigma = autocov_hat(p, 5, 1)
        kappa = sigma * 5**2  # then sigma^2 = kappa^2 / N^4
        result = marginal_alpha(p, 1, kappa)
        assert result.alpha == pytest.approx(0.0, abs=1e-12)

    def test_out_of_range_flag(self, rng):
        p = random_panel(rng, 5, 12)
        sigma = autocov_hat(p, 5, 1)
        inside = marginal_alpha(p, 1, sigma)
        outside = marginal_alpha(p, 1, sigma / 5**3)
        assert not inside.diagnostics["out_of_range"]
        assert outside.alpha > 1.0
        assert outside.diagnostics["out_of_range"]

    def test_zero_kappa_rejected(self, rng):
        with pytest.raises(InvalidKappaError):
            marginal_alpha(random_panel(rng, 4, 10), 1, 0.0)

    def test_constant_panel_degenerate(self):
        with pytest.raises(DegenerateDataError):
            marginal_alpha(Panel(np.full((3, 8), 2.0)), 1, 1.0)

    def test_objective_is_nan(self, rng):
        result = marginal_alpha(random_panel(rng, 4, 10), 1, 0.5)
        assert math.isnan(result.objective_value)


class TestSelectTau:
    def test_single_candidate(self, rng):
        p = random_panel(rng, 5, 14)
        best, results = select_tau(p, [2])
        assert best == 2
        assert len(results) == 1
        assert results[0].tau == 2

    def test_results_carry_scores(self, rng):
        p = random_panel(rng, 5, 14)
        best, results = select_tau(p, [0, 1, 2])
        scores = [r.diagnostics["selection_score"] for r in results]
        assert best == results[int(np.argmax(scores))].tau
        for r in results:
            assert "selection_ratio_plain" in r.diagnostics

    def test_scale_invariant_selection(self, rng):
        data = rng.standard_normal((8, 30))
        best_a, _ = select_tau(Panel(data), [0, 1, 2, 3])
        best_b, _ = select_tau(Panel(7.0 * data), [0, 1, 2, 3])
        assert best_a == best_b

    def test_perfect_fit_wins_with_flag(self):
        # identical rows: the partial-average profile is exactly flat, so
        # the full-cutoff fit is exact at every lag and the smallest wins
        p = Panel([[1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0]])
        best, results = select_tau(p, [0, 1])
        assert best == 0
        assert results[0].diagnostics["degenerate_fit"]

    def test_empty_candidates(self, rng):
        with pytest.raises(ValueError):
            select_tau(random_panel(rng, 4, 10), [])

    def test_out_of_range_candidate(self, rng):
        with pytest.raises(InvalidLagError):
            select_tau(random_panel(rng, 4, 10), [0, 9])
