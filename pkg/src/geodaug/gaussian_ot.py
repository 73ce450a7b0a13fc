"""Closed-form optimal transport between Gaussian measures.

Everything here is exact linear algebra: the Bures-Wasserstein distance, the
affine Monge map, and the constant-speed geodesic between two Gaussians.
Isotropic and diagonal covariances take O(d) fast paths; the general SPD path
uses symmetric eigendecompositions with a small eigenvalue floor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .measures import ConditionalGaussianModel, GaussianParams
from .validation import check_same_dim

_EIG_FLOOR = 1e-12


def _sqrtm_psd(mat: np.ndarray, floor: float = _EIG_FLOOR) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, floor, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def _invsqrtm_pd(mat: np.ndarray, floor: float = _EIG_FLOOR) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    if vals[0] <= floor:
        raise ValueError(f"matrix is singular (min eigenvalue {vals[0]:.3e})")
    return (vecs / np.sqrt(vals)) @ vecs.T


def _as_diag_pair(p0: GaussianParams, p1: GaussianParams) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Per-coordinate variances when both covariances are (effectively) diagonal."""
    if p0.kind != "full" and p1.kind != "full":
        return p0.variances(), p1.variances()
    return None


def w2_gaussian(p0: GaussianParams, p1: GaussianParams) -> float:
    """Quadratic Wasserstein distance between two Gaussians:

        W2^2 = ||mu0 - mu1||^2 + tr(S0) + tr(S1) - 2 tr((S0^{1/2} S1 S0^{1/2})^{1/2})

    For commuting (diagonal) covariances the trace term reduces to
    sum_i (sqrt(v0_i) - sqrt(v1_i))^2.
    """
    check_same_dim(p0.dim, p1.dim, "Gaussians")
    if p0 is p1 or (
        p0.kind == p1.kind
        and np.array_equal(p0.mean, p1.mean)
        and np.array_equal(p0.covariance, p1.covariance)
    ):
        return 0.0
    mean_sq = float(np.sum((p0.mean - p1.mean) ** 2))
    diag = _as_diag_pair(p0, p1)
    if diag is not None:
        v0, v1 = diag
        bures = float(np.sum((np.sqrt(v0) - np.sqrt(v1)) ** 2))
    else:
        s0 = p0.covariance_matrix()
        s1 = p1.covariance_matrix()
        root0 = _sqrtm_psd(s0)
        cross = _sqrtm_psd(root0 @ s1 @ root0)
        bures = float(np.trace(s0) + np.trace(s1) - 2.0 * np.trace(cross))
    return float(np.sqrt(max(mean_sq + bures, 0.0)))


@dataclass(frozen=True)
class GaussianMap:
    """Affine Monge map x -> target_mean + T (x - source_mean) with T SPD."""

    source_mean: np.ndarray
    target_mean: np.ndarray
    matrix: np.ndarray
    scale: Optional[float] = None  # set when T = scale * I (isotropic fast path)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.float64)
        d = self.source_mean.shape[0]
        if mat.shape != (d, d):
            raise ValueError(f"map matrix must be {d}x{d}, got {mat.shape}")
        if np.max(np.abs(mat - mat.T)) > 1e-9:
            raise ValueError("map matrix must be symmetric")
        if np.linalg.eigvalsh(mat)[0] <= 0:
            raise ValueError("map matrix must be positive definite")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.source_mean.shape[0]

    def evaluate(self, x) -> np.ndarray:
        """Apply the map to one point (d,) or a batch (n, d)."""
        x = np.asarray(x, dtype=np.float64)
        centered = x - self.source_mean
        if self.scale is not None:
            return self.target_mean + self.scale * centered
        return self.target_mean + centered @ self.matrix

    def displacement(self, x) -> np.ndarray:
        return self.evaluate(x) - np.asarray(x, dtype=np.float64)


def gaussian_monge_map(p0: GaussianParams, p1: GaussianParams) -> GaussianMap:
    """Optimal map pushing N(mu0, S0) onto N(mu1, S1):

        T = S1^{1/2} (S1^{1/2} S0 S1^{1/2})^{-1/2} S1^{1/2}

    which satisfies T S0 T = S1. Requires both covariances nonsingular.
    """
    check_same_dim(p0.dim, p1.dim, "Gaussians")
    d = p0.dim
    diag = _as_diag_pair(p0, p1)
    if diag is not None:
        v0, v1 = diag
        if np.any(v0 <= _EIG_FLOOR) or np.any(v1 <= _EIG_FLOOR):
            raise ValueError("covariances must be nonsingular for the Monge map")
        ratios = np.sqrt(v1 / v0)
        if p0.kind == "isotropic" and p1.kind == "isotropic":
            scale = float(ratios[0])
            return GaussianMap(p0.mean, p1.mean, scale * np.eye(d), scale=scale)
        return GaussianMap(p0.mean, p1.mean, np.diag(ratios))
    s0 = p0.covariance_matrix()
    s1 = p1.covariance_matrix()
    if np.linalg.eigvalsh(s0)[0] <= _EIG_FLOOR:
        raise ValueError("source covariance is singular")
    root1 = _sqrtm_psd(s1)
    inner = _invsqrtm_pd(root1 @ s0 @ root1)
    matrix = root1 @ inner @ root1
    matrix = 0.5 * (matrix + matrix.T)
    return GaussianMap(p0.mean, p1.mean, matrix)


@dataclass(frozen=True)
class GaussianGeodesicPoint:
    """One point on the constant-speed Wasserstein geodesic between Gaussians."""

    t: float
    params: GaussianParams


def gaussian_geodesic(p0: GaussianParams, p1: GaussianParams, t: float) -> GaussianGeodesicPoint:
    """McCann interpolation between two Gaussians at location t in [0, 1].

    The mean is (1-t) mu0 + t mu1 and the covariance
    ((1-t) I + t T) S0 ((1-t) I + t T) with T the Monge map matrix; this form
    reproduces both endpoints exactly.
    """
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"t must lie in [0, 1], got {t!r}")
    check_same_dim(p0.dim, p1.dim, "Gaussians")
    if t == 0.0:
        return GaussianGeodesicPoint(0.0, p0)
    if t == 1.0:
        return GaussianGeodesicPoint(1.0, p1)
    mean_t = (1.0 - t) * p0.mean + t * p1.mean
    diag = _as_diag_pair(p0, p1)
    if diag is not None:
        v0, v1 = diag
        # ((1-t) + t sqrt(v1/v0))^2 v0 = ((1-t) sqrt(v0) + t sqrt(v1))^2
        std_t = (1.0 - t) * np.sqrt(v0) + t * np.sqrt(v1)
        if p0.kind == "isotropic" and p1.kind == "isotropic":
            return GaussianGeodesicPoint(t, GaussianParams.isotropic(mean_t, float(std_t[0]) ** 2))
        return GaussianGeodesicPoint(t, GaussianParams(mean_t, std_t**2))
    mix = (1.0 - t) * np.eye(p0.dim) + t * gaussian_monge_map(p0, p1).matrix
    cov_t = mix @ p0.covariance_matrix() @ mix
    cov_t = 0.5 * (cov_t + cov_t.T)
    return GaussianGeodesicPoint(t, GaussianParams(mean_t, cov_t))


def augmented_gaussian_pair(
    model: ConditionalGaussianModel, t: float
) -> Tuple[GaussianParams, GaussianParams, float]:
    """Symmetric pair of class conditionals pulled toward each other along the
    geodesic: location t in [0, 0.5) yields (N(-r mu, s^2 I), N(+r mu, s^2 I))
    with contraction factor r = 1 - 2t.

    t >= 0.5 is rejected: past the midpoint the interpolants cross sides and
    the hard-label convention would flip.
    """
    t = float(t)
    if not (0.0 <= t < 0.5):
        raise ValueError(f"t must lie in [0, 0.5), got {t!r}")
    r = 1.0 - 2.0 * t
    sigma2 = model.sigma**2
    negative = GaussianParams.isotropic(-r * model.mu, sigma2)
    positive = GaussianParams.isotropic(+r * model.mu, sigma2)
    return negative, positive, r
