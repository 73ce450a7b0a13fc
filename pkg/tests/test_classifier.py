import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geodaug import (
    LabeledDataset,
    LinearClassifier,
    LinearGeodesicClassifier,
    TrainConfig,
    fgsm_attack,
    load_classifier,
    mean_estimator,
    pooled_estimator,
    save_classifier,
    train,
)


class TestLinearClassifier:
    def test_sign_zero_is_positive(self):
        clf = LinearClassifier(np.array([1.0, 0.0]))
        assert clf.predict(np.array([[0.0, 5.0]]))[0] == 1

    def test_decision_function(self):
        clf = LinearClassifier(np.array([2.0, -1.0]), beta=0.5)
        assert clf.decision_function(np.array([1.0, 1.0])) == pytest.approx(1.5)

    def test_scale_invariance_of_decisions(self, rng):
        theta = rng.normal(size=4)
        x = rng.normal(size=(50, 4))
        base = LinearClassifier(theta).predict(x)
        for c in (0.1, 3.0, 1e6):
            assert np.array_equal(LinearClassifier(c * theta).predict(x), base)


class TestMeanEstimator:
    def test_single_positive_sample(self):
        data = LabeledDataset(np.array([[2.0, -1.0]]), np.array([1]))
        np.testing.assert_allclose(mean_estimator(data).theta, [2.0, -1.0])
        assert mean_estimator(data).beta == 0.0

    def test_symmetric_duplication_invariance(self, rng):
        x = rng.normal(size=(10, 3))
        y = rng.choice([-1, 1], size=10)
        base = LabeledDataset(x, y)
        doubled = LabeledDataset(np.vstack([x, -x]), np.concatenate([y, -y]))
        np.testing.assert_allclose(mean_estimator(base).theta, mean_estimator(doubled).theta, atol=1e-15)

    def test_law_of_large_numbers(self):
        from geodaug import ConditionalGaussianModel, sample_conditional_gaussian

        d = 4
        mu = np.zeros(d)
        mu[0] = 1.0
        data = sample_conditional_gaussian(ConditionalGaussianModel(mu, 1.0), 10_000, seed=2)
        theta = mean_estimator(data).theta
        assert np.linalg.norm(theta - mu) <= 4 * np.sqrt(d / 10_000)

    def test_empty_rejected(self):
        data = LabeledDataset(np.empty((0, 2)), np.array([], dtype=np.int64))
        with pytest.raises(ValueError):
            mean_estimator(data)

    def test_requires_binary_labels(self):
        data = LabeledDataset(np.zeros((2, 1)), np.array([0, 1]))
        with pytest.raises(ValueError, match="binary"):
            mean_estimator(data)


class TestPooledEstimator:
    def test_empty_augmented_equals_mean(self, rng):
        data = LabeledDataset(rng.normal(size=(8, 2)), rng.choice([-1, 1], size=8))
        np.testing.assert_allclose(
            pooled_estimator(data, None).theta, mean_estimator(data).theta
        )

    def test_duplicated_data_same_theta(self, rng):
        data = LabeledDataset(rng.normal(size=(6, 2)), rng.choice([-1, 1], size=6))
        np.testing.assert_allclose(
            pooled_estimator(data, data).theta, mean_estimator(data).theta, atol=1e-15
        )

    def test_expectation_mixes_by_counts(self):
        # E[theta] = (n0 + r n1) / (n0 + n1) mu for augmented draws at r mu.
        from geodaug import ConditionalGaussianModel, sample_conditional_gaussian
        from geodaug._rng import spawn_rngs

        mu = np.array([0.6, -0.8, 0.0])
        model = ConditionalGaussianModel(mu, 1.0)
        contracted = ConditionalGaussianModel(0.9 * mu, 1.0)
        trials = 300
        thetas = []
        for seq in np.random.SeedSequence(99).spawn(trials):
            r0, r1 = spawn_rngs(seq, 2)
            orig = sample_conditional_gaussian(model, 20, r0)
            aug = sample_conditional_gaussian(contracted, 200, r1)
            thetas.append(pooled_estimator(orig, aug).theta)
        mean_theta = np.mean(thetas, axis=0)
        target = (20 + 0.9 * 200) / 220 * mu
        se = 1.0 / np.sqrt(220 * trials)
        assert np.all(np.abs(mean_theta - target) <= 3 * se)


class TestTrain:
    def _population_dataset(self, mu):
        # mu_hat = mean(y x) equals mu exactly for the pair {(mu, +1), (-mu, -1)}.
        return LabeledDataset(np.vstack([mu, -mu]), np.array([1, -1]))

    def test_ridge_only_closed_form(self):
        mu = np.zeros(10)
        mu[0] = 1.0
        clf = train(self._population_dataset(mu), None, TrainConfig(loss="linear_yfx", lambda2=1.0))
        np.testing.assert_allclose(clf.theta, mu, atol=1e-6)

    def test_geodesic_term_closed_form(self):
        # theta* = (lambda1 mu mu^T + lambda2 I)^{-1} mu = mu / 2 at unit norm.
        mu = np.zeros(10)
        mu[0] = 1.0
        clf = train(
            self._population_dataset(mu),
            None,
            TrainConfig(loss="linear_yfx", lambda1=1.0, lambda2=1.0),
        )
        np.testing.assert_allclose(clf.theta, mu / 2, atol=1e-6)

    def test_linear_loss_needs_ridge(self):
        mu = np.array([1.0])
        with pytest.raises(ValueError, match="unbounded"):
            train(self._population_dataset(mu), None, TrainConfig(loss="linear_yfx", lambda2=0.0))

    def test_zero_one_not_trainable(self):
        mu = np.array([1.0])
        with pytest.raises(ValueError, match="not differentiable"):
            train(self._population_dataset(mu), None, TrainConfig(loss="zero_one"))

    def test_logistic_stays_in_span_on_symmetric_data(self, rng):
        # Data closed under reflecting the off-axis coordinates and under
        # (x, y) -> (-x, -y): gradients then cancel off the mu_hat axis and the
        # intercept gradient vanishes, so GD never leaves the span.
        x = rng.normal(size=(20, 3))
        y = rng.choice([-1, 1], size=20)
        reflected = x * np.array([1.0, -1.0, -1.0])
        features = np.vstack([x, reflected, -x, -reflected])
        labels = np.concatenate([y, y, -y, -y])
        data = LabeledDataset(features, labels)
        clf = train(data, None, TrainConfig(loss="logistic", steps=500))
        mu_hat = (data.labels[:, None] * data.features).mean(axis=0)
        direction = mu_hat / np.linalg.norm(mu_hat)
        residual = clf.theta - (clf.theta @ direction) * direction
        assert np.linalg.norm(residual) <= 1e-10
        assert clf.beta == pytest.approx(0.0, abs=1e-10)

    def test_augmented_batches_feed_soft_labels(self, rng):
        from geodaug.barycentric import AugmentationBatch

        data = LabeledDataset(rng.normal(size=(10, 2)), rng.choice([-1, 1], size=10))
        batch = AugmentationBatch(
            samples=rng.normal(size=(4, 2)),
            soft_labels=np.array([0.5, -0.5, 0.2, 0.0]),
            hard_labels=np.array([1, -1, 1, -1]),
            t=0.25,
            source_indices=np.arange(4),
        )
        clf = train(data, batch, TrainConfig(loss="logistic", steps=50))
        assert clf.theta.shape == (2,)


class TestFgsm:
    def test_zero_radius_is_identity(self, rng):
        clf = LinearClassifier(rng.normal(size=3))
        x = rng.normal(size=(5, 3))
        y = rng.choice([-1, 1], size=5)
        assert np.array_equal(fgsm_attack(clf, x, y, 0.0), x)

    def test_flips_thin_margin(self):
        clf = LinearClassifier(np.array([1.0, 0.0]))
        x = np.array([0.05, 5.0])
        attacked = fgsm_attack(clf, x, 1, 0.1)
        np.testing.assert_allclose(attacked, [-0.05, 5.0])
        assert clf.predict(attacked[None, :])[0] == -1

    def test_wide_margin_survives(self, rng):
        # Margin above radius * ||theta||_1 cannot be flipped by any l_inf attack.
        theta = rng.normal(size=4)
        clf = LinearClassifier(theta)
        radius = 0.2
        x = theta * (radius * np.sum(np.abs(theta)) + 1.0) / (theta @ theta)
        assert float(clf.decision_function(x)) > radius * np.sum(np.abs(theta))
        attacked = fgsm_attack(clf, x, 1, radius)
        assert clf.predict(attacked[None, :])[0] == 1

    def test_perturbation_respects_budget(self, rng):
        clf = LinearClassifier(rng.normal(size=6))
        x = rng.normal(size=(20, 6))
        y = rng.choice([-1, 1], size=20)
        attacked = fgsm_attack(clf, x, y, 0.3)
        assert np.max(np.abs(attacked - x)) <= 0.3 + 1e-15


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**31), radius=st.floats(min_value=0, max_value=1))
def test_fgsm_is_worst_case_for_linear_models(seed, radius):
    rng = np.random.default_rng(seed)
    theta = rng.normal(size=3)
    clf = LinearClassifier(theta)
    x = rng.normal(size=3)
    y = int(rng.choice([-1, 1]))
    attacked_margin = y * float(clf.decision_function(fgsm_attack(clf, x, y, radius)))
    base_margin = y * float(clf.decision_function(x))
    # The attack achieves exactly the linear lower bound ...
    assert attacked_margin == pytest.approx(base_margin - radius * np.sum(np.abs(theta)), abs=1e-9)
    # ... and no feasible perturbation does better.
    for _ in range(8):
        delta = rng.uniform(-radius, radius, size=3)
        assert y * float(clf.decision_function(x + delta)) >= attacked_margin - 1e-9


class TestPersistence:
    def test_roundtrip_exact(self, tmp_path, rng):
        clf = LinearClassifier(rng.normal(size=5), beta=0.25)
        path = tmp_path / "model.csv"
        save_classifier(clf, path)
        loaded = load_classifier(path)
        assert np.array_equal(loaded.theta, clf.theta)
        assert loaded.beta == clf.beta

    def test_rejects_malformed(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("name,value\ngamma_0,1.0\n")
        with pytest.raises(ValueError, match="unexpected entry"):
            load_classifier(path)


class TestSklearnFrontEnd:
    def test_fit_predict(self, rng):
        x = np.vstack([rng.normal(size=(30, 2)) - 2, rng.normal(size=(30, 2)) + 2])
        y = np.concatenate([-np.ones(30, dtype=int), np.ones(30, dtype=int)])
        est = LinearGeodesicClassifier(loss="logistic", steps=300).fit(x, y)
        assert (est.predict(x) == y).mean() > 0.95

    def test_get_params_roundtrip(self):
        est = LinearGeodesicClassifier(lambda2=0.5, steps=10)
        params = est.get_params()
        assert params["lambda2"] == 0.5 and params["steps"] == 10

    def test_not_fitted_error(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            LinearGeodesicClassifier().predict(np.zeros((1, 2)))
