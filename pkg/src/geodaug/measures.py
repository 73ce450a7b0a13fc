"""Core data types: weighted point clouds, labeled datasets, Gaussian models.

All containers are frozen after construction and validated on the way in, so
downstream numerical code can assume clean shapes, finite values and
normalized weights.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Dict, Literal, Tuple

import numpy as np

from ._rng import SeedLike, make_rng
from .validation import (
    CsvFormatError,
    as_binary_labels,
    as_features,
    as_float_array,
    as_weights,
    check_positive,
)

CovarianceKind = Literal["isotropic", "diagonal", "full"]

_WEIGHT_TOL = 1e-9
_SYMMETRY_TOL = 1e-9
_PSD_TOL = -1e-8


@dataclass(frozen=True)
class DiscreteMeasure:
    """A weighted point cloud: `points` is (n, d), `weights` a probability vector."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = as_features(self.points, "points")
        if points.shape[0] < 1 or points.shape[1] < 1:
            raise ValueError(f"points must be a nonempty n x d matrix, got shape {points.shape}")
        weights = as_weights(self.weights, points.shape[0], tol=_WEIGHT_TOL)
        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, points) -> "DiscreteMeasure":
        points = as_features(points, "points")
        n = points.shape[0]
        if n < 1:
            raise ValueError("points must contain at least one row")
        return cls(points, np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def mean(self) -> np.ndarray:
        return self.weights @ self.points


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix plus labels; binary labels are -1/+1, multiclass 0..k-1."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = as_features(self.features, "features")
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise ValueError(f"labels must be 1-dimensional, got shape {labels.shape}")
        if labels.shape[0] != features.shape[0]:
            raise ValueError(
                f"features have {features.shape[0]} rows but labels length is {labels.shape[0]}"
            )
        labels = labels.astype(np.int64)
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def is_binary(self) -> bool:
        return bool(np.isin(self.labels, (-1, 1)).all()) and self.n > 0

    def require_binary(self) -> np.ndarray:
        return as_binary_labels(self.labels)


@dataclass(frozen=True)
class GaussianParams:
    """Mean and covariance of one Gaussian; covariance is stored in the least
    general form that represents it (isotropic < diagonal < full)."""

    mean: np.ndarray
    covariance: np.ndarray  # shape () isotropic, (d,) diagonal, (d, d) full
    kind: CovarianceKind = field(init=False)

    def __post_init__(self):
        mean = as_float_array(self.mean, "mean", ndim=1)
        cov = as_float_array(np.asarray(self.covariance, dtype=np.float64), "covariance")
        d = mean.shape[0]
        if cov.ndim == 0:
            kind = "isotropic"
            if cov <= 0:
                raise ValueError(f"isotropic variance must be > 0, got {float(cov)!r}")
        elif cov.ndim == 1:
            kind = "diagonal"
            if cov.shape[0] != d:
                raise ValueError(f"diagonal covariance must have length {d}, got {cov.shape[0]}")
            if np.any(cov <= 0):
                raise ValueError("diagonal covariance entries must be > 0")
        elif cov.ndim == 2:
            kind = "full"
            if cov.shape != (d, d):
                raise ValueError(f"full covariance must be {d}x{d}, got {cov.shape}")
            if np.max(np.abs(cov - cov.T)) > _SYMMETRY_TOL:
                raise ValueError("full covariance must be symmetric within 1e-9")
            cov = 0.5 * (cov + cov.T)
            min_eig = float(np.linalg.eigvalsh(cov)[0])
            if min_eig < _PSD_TOL:
                raise ValueError(f"covariance must be PSD, min eigenvalue {min_eig:.3e}")
        else:
            raise ValueError(f"covariance must be scalar, vector or matrix, got ndim {cov.ndim}")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "kind", kind)

    @classmethod
    def isotropic(cls, mean, sigma2: float) -> "GaussianParams":
        return cls(np.asarray(mean, dtype=np.float64), np.float64(sigma2))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def covariance_matrix(self) -> np.ndarray:
        """Promote the stored covariance to an explicit d x d matrix."""
        d = self.dim
        if self.kind == "isotropic":
            return float(self.covariance) * np.eye(d)
        if self.kind == "diagonal":
            return np.diag(self.covariance)
        return np.array(self.covariance)

    def variances(self) -> np.ndarray:
        """Per-coordinate variances (diagonal of the covariance matrix)."""
        if self.kind == "isotropic":
            return np.full(self.dim, float(self.covariance))
        if self.kind == "diagonal":
            return np.array(self.covariance)
        return np.diag(self.covariance).copy()

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "isotropic":
            return self.mean + np.sqrt(float(self.covariance)) * rng.standard_normal((n, self.dim))
        if self.kind == "diagonal":
            return self.mean + np.sqrt(self.covariance) * rng.standard_normal((n, self.dim))
        return rng.multivariate_normal(self.mean, self.covariance_matrix(), size=n, method="eigh")


@dataclass(frozen=True)
class ConditionalGaussianModel:
    """Binary classes as N(-mu, sigma^2 I) and N(+mu, sigma^2 I) with balance 1/2."""

    mu: np.ndarray
    sigma: float

    def __post_init__(self):
        mu = as_float_array(self.mu, "mu", ndim=1)
        sigma = check_positive(self.sigma, "sigma")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def dim(self) -> int:
        return self.mu.shape[0]

    def conditional(self, label: int) -> GaussianParams:
        if label not in (-1, 1):
            raise ValueError(f"label must be -1 or +1, got {label!r}")
        return GaussianParams.isotropic(label * self.mu, self.sigma**2)


def sample_conditional_gaussian(
    model: ConditionalGaussianModel, n: int, seed: SeedLike
) -> LabeledDataset:
    """Draw n iid (x, y) pairs: y uniform on {-1, +1}, x | y ~ N(y mu, sigma^2 I)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = make_rng(seed)
    labels = rng.choice(np.array([-1, 1], dtype=np.int64), size=n)
    noise = rng.standard_normal((n, model.dim))
    features = labels[:, None] * model.mu[None, :] + model.sigma * noise
    return LabeledDataset(features, labels)


def split_by_class(data: LabeledDataset) -> Dict[int, DiscreteMeasure]:
    """One uniform-weight measure per class present in the dataset."""
    if data.n == 0:
        raise ValueError("dataset is empty")
    out: Dict[int, DiscreteMeasure] = {}
    for label in np.unique(data.labels):
        mask = data.labels == label
        out[int(label)] = DiscreteMeasure.uniform(data.features[mask])
    return out


def class_pair_measures(
    data: LabeledDataset, first: int, second: int
) -> Tuple[DiscreteMeasure, DiscreteMeasure]:
    measures = split_by_class(data)
    for label in (first, second):
        if label not in measures:
            raise ValueError(f"class {label} not present in dataset")
    return measures[first], measures[second]


def save_csv(data: LabeledDataset, path) -> None:
    """Write features plus a final `label` column; header f0..f{d-1},label."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j}" for j in range(data.dim)] + ["label"])
        for row, label in zip(data.features, data.labels):
            writer.writerow([f"{v:.17g}" for v in row] + [str(int(label))])


def load_csv(path) -> LabeledDataset:
    """Read a dataset written by save_csv; malformed content raises CsvFormatError
    carrying the 1-based row number."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError("file is empty, expected a header row") from None
        header = [h.strip() for h in header]
        if "label" not in header:
            raise CsvFormatError("missing `label` column", row=1)
        label_idx = header.index("label")
        feature_idx = [i for i, h in enumerate(header) if i != label_idx]
        expected = [f"f{j}" for j in range(len(feature_idx))]
        if [header[i] for i in feature_idx] != expected:
            raise CsvFormatError(
                f"feature columns must be named {','.join(expected)}", row=1
            )
        features = []
        labels = []
        for row_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise CsvFormatError(
                    f"expected {len(header)} fields, got {len(row)}", row=row_no
                )
            try:
                features.append([float(row[i]) for i in feature_idx])
            except ValueError as exc:
                raise CsvFormatError(f"non-numeric feature value ({exc})", row=row_no) from None
            try:
                labels.append(int(row[label_idx]))
            except ValueError:
                raise CsvFormatError(
                    f"non-integer label {row[label_idx]!r}", row=row_no
                ) from None
    d = len(feature_idx)
    features_arr = np.asarray(features, dtype=np.float64).reshape(len(labels), d)
    return LabeledDataset(features_arr, np.asarray(labels, dtype=np.int64))
