"""Linear classifiers on R^d: closed-form mean estimators, regularized
gradient-descent training, and the exact worst-case l_inf (FGSM) attack.

The decision rule is sign(theta . x + beta) with sign(0) = +1. The analytic
robustness formulas elsewhere assume the homogeneous case beta = 0; training
fits an intercept only for the logistic loss.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .losses import get_loss
from .measures import LabeledDataset
from .validation import as_float_array, check_nonnegative

DEFAULT_LEARNING_RATE = 0.1
DEFAULT_STEPS = 2000


@dataclass(frozen=True)
class LinearClassifier:
    """Linear decision rule sign(theta . x + beta); sign(0) counts as +1."""

    theta: np.ndarray
    beta: float = 0.0

    def __post_init__(self):
        theta = as_float_array(self.theta, "theta", ndim=1)
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def dim(self) -> int:
        return self.theta.shape[0]

    def decision_function(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return x @ self.theta + self.beta

    def predict(self, x) -> np.ndarray:
        scores = self.decision_function(x)
        return np.where(scores >= 0, 1, -1).astype(np.int64)

    def error_rate(self, data: LabeledDataset) -> float:
        return float(np.mean(self.predict(data.features) != data.labels))


def mean_estimator(data: LabeledDataset) -> LinearClassifier:
    """theta = (1/n) sum_i y_i x_i, beta = 0 (binary labels required)."""
    if data.n == 0:
        raise ValueError("dataset is empty")
    labels = data.require_binary()
    theta = (labels[:, None] * data.features).mean(axis=0)
    return LinearClassifier(theta)


def pooled_estimator(original: LabeledDataset, augmented: Optional[LabeledDataset]) -> LinearClassifier:
    """Pooled mean of label-weighted features over original plus augmented data:

        theta = (sum y_i x_i + sum y~_j x~_j) / (n0 + n1)
    """
    total_n = original.n + (augmented.n if augmented is not None else 0)
    if total_n == 0:
        raise ValueError("no samples to pool")
    acc = np.zeros(original.dim)
    if original.n:
        acc += (original.require_binary()[:, None] * original.features).sum(axis=0)
    if augmented is not None and augmented.n:
        if augmented.dim != original.dim:
            raise ValueError("original and augmented dimensions differ")
        acc += (augmented.require_binary()[:, None] * augmented.features).sum(axis=0)
    return LinearClassifier(acc / total_n)


@dataclass(frozen=True)
class TrainConfig:
    """Gradient-descent settings.

    lambda1 weighs the squared geodesic term (theta . mu_hat)^2 / 2, lambda2
    the ridge term ||theta||^2 / 2, and alpha_reg the linear geodesic penalty
    2 |theta . mu_hat| used by the practical regularized-training recipes.
    """

    loss: str = "logistic"
    lambda1: float = 0.0
    lambda2: float = 0.0
    alpha_reg: float = 0.0
    steps: int = DEFAULT_STEPS
    learning_rate: float = DEFAULT_LEARNING_RATE
    seed: int = 0

    def __post_init__(self):
        check_nonnegative(self.lambda1, "lambda1")
        check_nonnegative(self.lambda2, "lambda2")
        check_nonnegative(self.alpha_reg, "alpha_reg")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")


def _stack_training_data(data: LabeledDataset, augmented, soft_augmented_labels: bool):
    x = data.features
    y = data.labels.astype(np.float64)
    if augmented is None:
        return x, y
    if isinstance(augmented, LabeledDataset):
        ax, ay = augmented.features, augmented.labels.astype(np.float64)
    else:  # AugmentationBatch or a sequence of them
        batches = augmented if isinstance(augmented, (list, tuple)) else [augmented]
        ax = np.vstack([b.samples for b in batches])
        ay = np.concatenate(
            [(b.soft_labels if soft_augmented_labels else b.hard_labels) for b in batches]
        ).astype(np.float64)
    if ax.shape[1] != x.shape[1]:
        raise ValueError("original and augmented dimensions differ")
    return np.vstack([x, ax]), np.concatenate([y, ay])


def train(
    data: LabeledDataset,
    augmented=None,
    config: TrainConfig = TrainConfig(),
    geodesic_direction: Optional[np.ndarray] = None,
) -> LinearClassifier:
    """Full-batch gradient descent on

        mean loss(theta . x + beta, y)
        + lambda1/2 (theta . mu_hat)^2 + alpha_reg * 2 |theta . mu_hat|
        + lambda2/2 ||theta||^2

    where mu_hat is the label-weighted feature mean of the original data (the
    closed-form geodesic direction), unless `geodesic_direction` overrides it.
    `augmented` may be a LabeledDataset, an AugmentationBatch, or a list of
    batches; batch soft labels feed the differentiable losses directly.
    The intercept is fitted only for the logistic loss.
    """
    loss = get_loss(config.loss)
    if not loss.differentiable:
        raise ValueError(f"loss {loss.name!r} is not differentiable; it is evaluation-only")
    if loss.name == "linear_yfx" and config.lambda2 == 0.0:
        raise ValueError(
            "linear_yfx with lambda2 = 0 is unbounded below (the score can grow "
            "without limit); set lambda2 > 0"
        )
    x, y = _stack_training_data(data, augmented, soft_augmented_labels=not loss.uses_hard_labels)
    n, d = x.shape
    if geodesic_direction is not None:
        mu_hat = as_float_array(geodesic_direction, "geodesic_direction", ndim=1)
    elif config.lambda1 > 0 or config.alpha_reg > 0:
        mu_hat = (data.require_binary()[:, None] * data.features).mean(axis=0)
    else:
        mu_hat = np.zeros(d)

    fit_intercept = loss.name == "logistic"
    theta = np.zeros(d)
    beta = 0.0
    lr = config.learning_rate
    for _ in range(config.steps):
        scores = x @ theta + beta
        dscore = loss.dscore(scores, y)
        grad_theta = (x.T @ dscore) / n + config.lambda2 * theta
        proj = float(theta @ mu_hat)
        if config.lambda1 > 0:
            grad_theta += config.lambda1 * proj * mu_hat
        if config.alpha_reg > 0:
            grad_theta += config.alpha_reg * 2.0 * np.sign(proj) * mu_hat
        theta = theta - lr * grad_theta
        if fit_intercept:
            beta = beta - lr * float(np.mean(dscore))
        if not np.all(np.isfinite(theta)):
            raise ValueError("training diverged (theta is not finite); lower the learning rate")
    return LinearClassifier(theta, beta if fit_intercept else 0.0)


def fgsm_attack(classifier: LinearClassifier, x, y, radius: float) -> np.ndarray:
    """Exact worst-case l_inf perturbation of a linear classifier:

        x' = x - radius * y * sign(theta)

    which lowers the margin y (theta . x) by exactly radius * ||theta||_1.
    """
    radius = check_nonnegative(radius, "radius")
    x = np.asarray(x, dtype=np.float64)
    y_arr = np.asarray(y, dtype=np.float64)
    step = np.sign(classifier.theta)
    if x.ndim == 1:
        return x - radius * float(y_arr) * step
    return x - radius * y_arr[:, None] * step[None, :]


def save_classifier(classifier: LinearClassifier, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "value"])
        for j, v in enumerate(classifier.theta):
            writer.writerow([f"theta_{j}", f"{v:.17g}"])
        writer.writerow(["beta", f"{classifier.beta:.17g}"])


def load_classifier(path) -> LinearClassifier:
    theta_entries = {}
    beta = 0.0
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["name", "value"]:
            raise ValueError("classifier file must start with header name,value")
        for row in reader:
            if not row:
                continue
            name, value = row[0].strip(), float(row[1])
            if name == "beta":
                beta = value
            elif name.startswith("theta_"):
                theta_entries[int(name[6:])] = value
            else:
                raise ValueError(f"unexpected entry {name!r} in classifier file")
    if not theta_entries:
        raise ValueError("classifier file contains no theta entries")
    d = max(theta_entries) + 1
    if sorted(theta_entries) != list(range(d)):
        raise ValueError("theta entries must cover indices 0..d-1")
    theta = np.array([theta_entries[j] for j in range(d)])
    return LinearClassifier(theta, beta)


class LinearGeodesicClassifier(BaseEstimator, ClassifierMixin):
    """Scikit-learn front end for `train`: fit(X, y) with binary -1/+1 labels,
    optionally mixing in pre-built augmentation batches."""

    def __init__(
        self,
        loss: str = "logistic",
        lambda1: float = 0.0,
        lambda2: float = 0.0,
        alpha_reg: float = 0.0,
        steps: int = DEFAULT_STEPS,
        learning_rate: float = DEFAULT_LEARNING_RATE,
        seed: int = 0,
    ):
        self.loss = loss
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.alpha_reg = alpha_reg
        self.steps = steps
        self.learning_rate = learning_rate
        self.seed = seed

    def _config(self) -> TrainConfig:
        return TrainConfig(
            loss=self.loss,
            lambda1=self.lambda1,
            lambda2=self.lambda2,
            alpha_reg=self.alpha_reg,
            steps=self.steps,
            learning_rate=self.learning_rate,
            seed=self.seed,
        )

    def fit(self, X, y, augmented=None) -> "LinearGeodesicClassifier":
        data = LabeledDataset(np.asarray(X, dtype=np.float64), np.asarray(y))
        data.require_binary()
        self.model_ = train(data, augmented, self._config())
        self.classes_ = np.array([-1, 1])
        return self

    def _check_fitted(self) -> LinearClassifier:
        if not hasattr(self, "model_"):
            raise NotFittedError("LinearGeodesicClassifier must be fitted before use")
        return self.model_

    def decision_function(self, X) -> np.ndarray:
        return self._check_fitted().decision_function(X)

    def predict(self, X) -> np.ndarray:
        return self._check_fitted().predict(X)
