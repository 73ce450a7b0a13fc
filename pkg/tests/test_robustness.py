import numpy as np
import pytest
from scipy.stats import norm

from geodaug import (
    ConditionalGaussianModel,
    LinearClassifier,
    dro_worst_case_check,
    linf_robust_error,
    monte_carlo_error,
    q_function,
    robustness_gain_trial,
    smoothed_error,
    standard_error,
)
from geodaug.robustness import write_trials_csv


def unit_model(d=3, norm_mu=1.0, sigma=1.0):
    mu = np.zeros(d)
    mu[0] = norm_mu
    return ConditionalGaussianModel(mu, sigma)


class TestQFunction:
    def test_at_zero(self):
        assert q_function(0.0) == pytest.approx(0.5)

    def test_deep_tail(self):
        assert q_function(40.0) < 1e-300

    def test_against_normal_sf_oracle(self):
        for x in (-2.0, -0.5, 0.3, 1.96, 3.7):
            assert q_function(x) == pytest.approx(norm.sf(x), abs=1e-12)
        assert q_function(1.96) == pytest.approx(0.025, abs=1e-4)

    def test_complement_identity(self, rng):
        x = rng.normal(size=20)
        np.testing.assert_allclose(q_function(x) + q_function(-x), 1.0, atol=1e-12)

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            q_function(float("nan"))


class TestAnalyticErrors:
    def test_standard_error_aligned(self):
        model = unit_model()
        clf = LinearClassifier(model.mu.copy())
        assert standard_error(model, clf) == pytest.approx(norm.sf(1.0), abs=1e-12)

    def test_standard_error_orthogonal_is_chance(self):
        model = unit_model()
        clf = LinearClassifier(np.array([0.0, 1.0, 0.0]))
        assert standard_error(model, clf) == pytest.approx(0.5)

    def test_anti_aligned_worse_than_chance(self):
        model = unit_model()
        assert standard_error(model, LinearClassifier(-model.mu)) > 0.5

    def test_zero_theta_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            standard_error(unit_model(), LinearClassifier(np.zeros(3)))

    def test_intercept_rejected(self):
        with pytest.raises(ValueError, match="homogeneous"):
            standard_error(unit_model(), LinearClassifier(np.ones(3), beta=0.5))

    def test_linf_at_zero_radius_equals_standard(self, rng):
        model = unit_model()
        clf = LinearClassifier(rng.normal(size=3))
        assert linf_robust_error(model, clf, 0.0) == standard_error(model, clf)

    def test_linf_consumes_margin_fully(self):
        model = unit_model(d=1)
        clf = LinearClassifier(np.array([1.0]))
        assert linf_robust_error(model, clf, 1.0) == pytest.approx(0.5)

    def test_linf_monotone_in_radius(self, rng):
        model = unit_model()
        clf = LinearClassifier(rng.normal(size=3))
        radii = np.linspace(0, 2, 41)
        errors = [linf_robust_error(model, clf, e) for e in radii]
        assert np.all(np.diff(errors) >= -1e-15)
        assert errors[-1] <= 1.0

    def test_smoothed_at_zero_noise_equals_standard(self, rng):
        model = unit_model()
        clf = LinearClassifier(rng.normal(size=3))
        assert smoothed_error(model, clf, 0.0) == standard_error(model, clf)

    def test_smoothed_convolution_variance(self):
        model = unit_model()
        clf = LinearClassifier(model.mu.copy())
        assert smoothed_error(model, clf, 1.0) == pytest.approx(norm.sf(1 / np.sqrt(2)), abs=1e-12)

    def test_smoothed_additive_convention_differs(self):
        model = unit_model()
        clf = LinearClassifier(model.mu.copy())
        additive = smoothed_error(model, clf, 1.0, paper_convention=True)
        assert additive == pytest.approx(norm.sf(0.5), abs=1e-12)
        assert additive != smoothed_error(model, clf, 1.0)

    def test_smoothed_tends_to_chance(self):
        model = unit_model()
        clf = LinearClassifier(model.mu.copy())
        sig = np.linspace(0, 50, 26)
        errors = [smoothed_error(model, clf, s) for s in sig]
        assert np.all(np.diff(errors) >= -1e-15)
        assert errors[-1] == pytest.approx(0.5, abs=1e-2)

    def test_scale_invariance(self, rng):
        model = unit_model()
        theta = rng.normal(size=3)
        for c in (0.01, 1.0, 250.0):
            a, b = LinearClassifier(theta), LinearClassifier(c * theta)
            assert standard_error(model, a) == pytest.approx(standard_error(model, b), abs=1e-12)
            assert linf_robust_error(model, a, 0.1) == pytest.approx(
                linf_robust_error(model, b, 0.1), abs=1e-12
            )
            assert smoothed_error(model, a, 0.7) == pytest.approx(
                smoothed_error(model, b, 0.7), abs=1e-12
            )

    def test_standard_below_robust_orderings(self, rng):
        model = unit_model()
        clf = LinearClassifier(rng.normal(size=3))
        e1 = linf_robust_error(model, clf, 0.05)
        e2 = linf_robust_error(model, clf, 0.15)
        assert standard_error(model, clf) <= e1 <= e2


class TestMonteCarlo:
    def test_orthogonal_is_chance(self):
        model = unit_model()
        clf = LinearClassifier(np.array([0.0, 1.0, 0.0]))
        report = monte_carlo_error(model, clf, 100_000, seed=0)
        assert abs(report.standard_error - 0.5) <= 3 * report.std_error

    def test_matches_analytic_standard(self, rng):
        model = unit_model()
        clf = LinearClassifier(rng.normal(size=3))
        report = monte_carlo_error(model, clf, 100_000, seed=1)
        assert abs(report.standard_error - standard_error(model, clf)) <= 3 * max(report.std_error, 1e-6)

    def test_fgsm_matches_analytic_linf(self, rng):
        model = unit_model()
        clf = LinearClassifier(rng.normal(size=3))
        report = monte_carlo_error(model, clf, 100_000, attack=("fgsm", 0.1), seed=2)
        assert abs(report.robust_error - linf_robust_error(model, clf, 0.1)) <= 3 * max(
            report.std_error, 1e-6
        )
        # Attacks only create errors, never fix them, sample by sample.
        assert report.robust_error >= report.standard_error

    def test_gaussian_noise_matches_analytic_smoothed(self, rng):
        model = unit_model()
        clf = LinearClassifier(rng.normal(size=3))
        report = monte_carlo_error(model, clf, 100_000, attack=("gaussian", 0.8), seed=3)
        assert abs(report.smoothed_error - smoothed_error(model, clf, 0.8)) <= 3 * max(
            report.std_error, 1e-6
        )

    def test_fixed_seed_bit_identical(self):
        model = unit_model()
        clf = LinearClassifier(model.mu.copy())
        a = monte_carlo_error(model, clf, 5000, attack=("fgsm", 0.1), seed=42)
        b = monte_carlo_error(model, clf, 5000, attack=("fgsm", 0.1), seed=42)
        assert a == b

    def test_zero_samples_rejected(self):
        with pytest.raises(ValueError):
            monte_carlo_error(unit_model(), LinearClassifier(np.ones(3)), 0)

    def test_unknown_attack_rejected(self):
        with pytest.raises(ValueError, match="attack"):
            monte_carlo_error(unit_model(), LinearClassifier(np.ones(3)), 10, attack=("pgd", 0.1))


class TestGainTrial:
    def test_full_strength_augmentation_usually_improves(self):
        model = unit_model(d=10)
        outcomes = [
            robustness_gain_trial(model, 20, 400, 1.0, 0.1, seed).improved for seed in range(60)
        ]
        assert np.mean(outcomes) >= 0.9

    def test_no_augmentation_is_a_tie(self):
        model = unit_model(d=4)
        trial = robustness_gain_trial(model, 20, 0, 0.9, 0.1, seed=0)
        assert trial.pe_orig == trial.pe_aug
        assert not trial.improved

    def test_empirical_route_runs(self):
        model = unit_model(d=2)
        trial = robustness_gain_trial(model, 20, 60, 0.8, 0.1, seed=3, route="empirical")
        assert 0.0 <= trial.pe_aug <= 1.0
        assert trial.n1 == 60

    def test_invalid_r_rejected(self):
        with pytest.raises(ValueError):
            robustness_gain_trial(unit_model(), 10, 10, 1.5, 0.1, seed=0)

    def test_trials_csv(self, tmp_path):
        model = unit_model(d=4)
        trials = [robustness_gain_trial(model, 10, 50, 0.9, 0.1, s) for s in range(3)]
        path = tmp_path / "trials.csv"
        write_trials_csv(trials, path, header_lines=["n0=10"])
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "# n0=10"
        assert lines[1] == "trial,n0,n1,r,eps,pe_orig,pe_aug,improved"
        assert len(lines) == 2 + 3


class TestDroCheck:
    def test_zero_radius_keeps_original(self):
        result = dro_worst_case_check(unit_model(d=2), 0.0, grid=201)
        assert result.s_star == 1.0 and result.v_star == 1.0
        assert result.error_star == pytest.approx(q_function(1.0))

    def test_high_dimension_recovers_pure_mean_shift(self):
        # With isotropic scaling, inflating the variance costs d (sqrt(v)-1)^2
        # of the budget; at large d the worst case is the mean-shift endpoint.
        model = unit_model(d=10_000)
        for eps in (0.1, 0.3):
            result = dro_worst_case_check(model, eps, grid=201)
            s_step = result.s_grid[1] - result.s_grid[0]
            assert abs(result.s_star - (1.0 - eps)) <= s_step + 1e-15
            assert result.v_star == pytest.approx(1.0, abs=1e-12)
            assert abs(result.error_star - q_function(1.0 - eps)) <= 1e-10

    def test_low_dimension_inflates_variance(self):
        # At small d the ball is cheap to spend on variance, and the true grid
        # maximizer trades some mean shift for scale > 1.
        result = dro_worst_case_check(unit_model(d=2), 0.3, grid=201)
        assert result.v_star > 1.02
        assert result.error_star > q_function(0.7)

    def test_error_at_endpoint_cell_is_exact(self):
        result = dro_worst_case_check(unit_model(d=10_000), 0.3, grid=201)
        i = int(np.argmin(np.abs(result.s_grid - 0.7)))
        j = int(np.argmin(np.abs(result.v_grid - 1.0)))
        assert result.errors[i, j] == q_function(0.7)

    def test_explicit_grid_and_empty_grid(self):
        model = unit_model(d=2)
        result = dro_worst_case_check(model, 0.2, grid=([1.0, 0.9, 0.8], [1.0]))
        assert result.s_star == pytest.approx(0.8)
        with pytest.raises(ValueError, match="nonempty"):
            dro_worst_case_check(model, 0.2, grid=([], [1.0]))

    def test_zero_mean_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            dro_worst_case_check(ConditionalGaussianModel(np.zeros(2), 1.0), 0.1)
