import numpy as np
import pytest

from geodaug import (
    AffineEmbedding,
    ConditionalGaussianModel,
    DiscreteMeasure,
    LinearClassifier,
    estimate_map,
    gaussian_monge_map,
    performance_geodesic,
    smoothness_regularizer,
    smoothness_regularizer_embedded,
)
from geodaug.geodesic_reg import write_curve_csv
from geodaug.losses import LINEAR_YFX, Loss, get_loss


def symmetric_setup(rng, d=3, n=4000):
    """Symmetric conditional pair with exactly-centered samples, so empirical
    means equal the model means and closed forms hold without sampling drift."""
    mu = rng.normal(size=d)
    model = ConditionalGaussianModel(mu, 1.0)
    half = rng.standard_normal((n // 2, d))
    noise = np.vstack([half, -half])
    x0 = -mu + noise
    gmap = gaussian_monge_map(model.conditional(-1), model.conditional(1))
    return mu, x0, gmap


class TestPerformanceGeodesic:
    def test_constant_classifier_flat_curve(self, rng):
        mu, x0, gmap = symmetric_setup(rng, n=200)
        clf = LinearClassifier(np.zeros_like(mu))
        curve = performance_geodesic(clf, gmap, (-1, 1), "zero_one", np.linspace(0, 1, 11), source_points=x0)
        # sign(0) = +1: wrong on the source side, right on the target side.
        assert np.all(curve.losses[curve.t < 0.5] == 1.0)
        assert np.all(curve.losses[curve.t > 0.5] == 0.0)

    def test_singleton_grid_gives_source_loss(self, rng):
        mu, x0, gmap = symmetric_setup(rng, n=200)
        clf = LinearClassifier(mu)
        curve = performance_geodesic(clf, gmap, (-1, 1), "zero_one", [0.0], source_points=x0)
        direct = float(np.mean(clf.predict(x0) != -1))
        assert curve.losses[0] == pytest.approx(direct)

    def test_endpoints_equal_per_class_losses(self, rng):
        mu, x0, gmap = symmetric_setup(rng, n=400)
        clf = LinearClassifier(mu + 0.3)
        loss = get_loss("logistic")
        curve = performance_geodesic(clf, gmap, (-1, 1), loss, [0.0, 1.0], source_points=x0)
        start = loss.mean(clf.decision_function(x0), -np.ones(len(x0)))
        end = loss.mean(clf.decision_function(gmap.evaluate(x0)), np.ones(len(x0)))
        assert curve.losses[0] == pytest.approx(start, abs=1e-12)
        assert curve.losses[1] == pytest.approx(end, abs=1e-12)

    def test_bayes_classifier_peaks_midway(self, rng):
        mu, x0, gmap = symmetric_setup(rng, d=2, n=4000)
        clf = LinearClassifier(mu)
        grid = np.linspace(0, 1, 41)
        curve = performance_geodesic(clf, gmap, (-1, 1), "zero_one", grid, source_points=x0)
        assert abs(grid[np.argmax(curve.losses)] - 0.5) <= 0.05


class TestSmoothnessRegularizer:
    def test_linear_loss_closed_form(self, rng):
        # For f = theta . x and the symmetric pair, the integral is 2 |theta . mu|.
        mu, x0, gmap = symmetric_setup(rng, d=5, n=10_000)
        theta = rng.normal(size=5)
        value = smoothness_regularizer(
            LinearClassifier(theta), gmap, (-1, 1), LINEAR_YFX, np.linspace(0, 1, 64), source_points=x0
        )
        ref = 2.0 * abs(float(theta @ mu))
        assert value == pytest.approx(ref, rel=0.03)

    def test_orthogonal_classifier_is_exactly_zero(self, rng):
        mu, x0, gmap = symmetric_setup(rng, d=2, n=2000)
        theta_perp = np.array([mu[1], -mu[0]])
        value = smoothness_regularizer(
            LinearClassifier(theta_perp), gmap, (-1, 1), LINEAR_YFX, np.linspace(0, 1, 32), source_points=x0
        )
        # Symmetrized noise makes sample means exact, so the value vanishes.
        assert value == pytest.approx(0.0, abs=1e-10)

    def test_analytic_derivative_matches_finite_differences(self, rng):
        mu, x0, gmap = symmetric_setup(rng, d=3, n=1000)
        clf = LinearClassifier(rng.normal(size=3), beta=0.0)
        grid = np.linspace(0.1, 0.9, 9)
        curve = performance_geodesic(clf, gmap, (-1, 1), "logistic", grid, source_points=x0)
        h = 1e-5
        for k, t in enumerate(grid):
            up = performance_geodesic(clf, gmap, (-1, 1), "logistic", [t + h], source_points=x0).losses[0]
            down = performance_geodesic(clf, gmap, (-1, 1), "logistic", [t - h], source_points=x0).losses[0]
            assert curve.dlosses[k] == pytest.approx((up - down) / (2 * h), abs=1e-5)

    def test_nonnegative_and_zero_iff_flat(self, rng):
        mu, x0, gmap = symmetric_setup(rng, d=2, n=500)
        for _ in range(5):
            theta = rng.normal(size=2)
            value = smoothness_regularizer(
                LinearClassifier(theta), gmap, (-1, 1), "logistic", np.linspace(0, 1, 16), source_points=x0
            )
            assert value >= 0.0

    def test_positive_homogeneity_in_loss_scale(self, rng):
        mu, x0, gmap = symmetric_setup(rng, d=2, n=500)
        clf = LinearClassifier(rng.normal(size=2))
        grid = np.linspace(0, 1, 16)
        c = 3.7
        scaled = Loss(
            "scaled_linear",
            lambda s, y: c * LINEAR_YFX.value(s, y),
            lambda s, y: c * LINEAR_YFX.dscore(s, y),
            lambda s, y: c * LINEAR_YFX.dlabel(s, y),
            differentiable=True,
            uses_hard_labels=False,
        )
        base = smoothness_regularizer(clf, gmap, (-1, 1), LINEAR_YFX, grid, source_points=x0)
        assert smoothness_regularizer(clf, gmap, (-1, 1), scaled, grid, source_points=x0) == pytest.approx(
            c * base, rel=1e-12
        )

    def test_quadrature_grid_refinement_is_stable(self, rng):
        mu, x0, gmap = symmetric_setup(rng, d=3, n=3000)
        clf = LinearClassifier(rng.normal(size=3))
        v32 = smoothness_regularizer(clf, gmap, (-1, 1), "logistic", np.linspace(0, 1, 32), source_points=x0)
        v64 = smoothness_regularizer(clf, gmap, (-1, 1), "logistic", np.linspace(0, 1, 64), source_points=x0)
        assert abs(v64 - v32) <= 0.01 * abs(v32)

    def test_zero_one_needs_total_variation(self, rng):
        mu, x0, gmap = symmetric_setup(rng, d=2, n=200)
        clf = LinearClassifier(mu)
        grid = np.linspace(0, 1, 11)
        with pytest.raises(ValueError, match="total_variation"):
            smoothness_regularizer(clf, gmap, (-1, 1), "zero_one", grid, source_points=x0)
        tv = smoothness_regularizer(
            clf, gmap, (-1, 1), "zero_one", grid, source_points=x0, method="total_variation"
        )
        assert tv >= 0.0

    def test_single_node_grid_rejected(self, rng):
        mu, x0, gmap = symmetric_setup(rng, d=2, n=100)
        with pytest.raises(ValueError, match="at least 2"):
            smoothness_regularizer(LinearClassifier(mu), gmap, (-1, 1), "logistic", [0.5], source_points=x0)


class TestEmbeddedRegularizer:
    def _empirical_map(self, rng, x0, x1, eps=0.02):
        return estimate_map(DiscreteMeasure.uniform(x0), DiscreteMeasure.uniform(x1), eps=eps)

    def test_identity_embedding_reproduces_plain_value(self, rng):
        d = 3
        x0 = rng.normal(size=(200, d))
        x1 = rng.normal(size=(200, d)) + 1.5
        bmap = self._empirical_map(rng, x0, x1)
        clf = LinearClassifier(rng.normal(size=d), beta=0.1)
        grid = np.linspace(0, 1, 16)
        plain = smoothness_regularizer(clf, bmap, (-1, 1), "logistic", grid)
        embedded = smoothness_regularizer_embedded(
            clf, bmap, AffineEmbedding.identity(d), (-1, 1), "logistic", grid
        )
        assert embedded == pytest.approx(plain, abs=1e-12)

    def test_full_rank_pca_is_change_of_variables(self, rng):
        # Orthonormal full-rank components preserve squared distances, so the
        # embedded plan and regularizer agree with the data-space ones.
        d = 3
        x0 = rng.normal(size=(150, d))
        x1 = rng.normal(size=(150, d)) + np.array([2.0, 0.0, -1.0])
        embedding = AffineEmbedding(d).fit(np.vstack([x0, x1]))
        z0, z1 = embedding.transform(x0), embedding.transform(x1)
        clf = LinearClassifier(rng.normal(size=d), beta=-0.2)
        grid = np.linspace(0, 1, 16)
        plain = smoothness_regularizer(clf, self._empirical_map(rng, x0, x1), (-1, 1), "logistic", grid)
        embedded = smoothness_regularizer_embedded(
            clf, self._empirical_map(rng, z0, z1), embedding, (-1, 1), "logistic", grid
        )
        assert embedded == pytest.approx(plain, abs=1e-8)

    def test_orthogonal_direction_vanishes_in_embedding(self, rng):
        mu = np.array([1.0, 0.0])
        model = ConditionalGaussianModel(mu, 1.0)
        half = rng.standard_normal((500, 2))
        x0 = -mu + np.vstack([half, -half])
        gmap = gaussian_monge_map(model.conditional(-1), model.conditional(1))
        theta_perp = np.array([0.0, 1.0])
        value = smoothness_regularizer_embedded(
            LinearClassifier(theta_perp),
            gmap,
            AffineEmbedding.identity(2),
            (-1, 1),
            LINEAR_YFX,
            np.linspace(0, 1, 16),
            source_points_z=x0,
        )
        assert value == pytest.approx(0.0, abs=1e-10)


def test_curve_csv_dump(tmp_path, rng):
    mu, x0, gmap = symmetric_setup(rng, d=2, n=100)
    curve = performance_geodesic(
        LinearClassifier(mu), gmap, (-1, 1), "logistic", np.linspace(0, 1, 5), source_points=x0
    )
    path = tmp_path / "curve.csv"
    write_curve_csv(curve, path, header_lines=["setting=demo"])
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "# setting=demo"
    assert lines[1] == "t,loss,dloss_dt"
    assert len(lines) == 2 + 5
