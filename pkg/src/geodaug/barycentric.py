"""Entropic transport maps via barycentric projection, and geodesic
interpolation of labeled point clouds.

The map estimator turns a converged Sinkhorn coupling pi into

    T(x0_i) = (pi X1)_i / (pi 1)_i

i.e. each source point goes to the coupling-weighted average of the target
points. Interpolating `(1 - t) X0 + t T(X0)` then walks the empirical
Wasserstein geodesic; with a permutation coupling this reduces exactly to
mixup on the paired samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .entropic import DEFAULT_EPS, DEFAULT_MAX_ITER, DEFAULT_TOL, TransportPlan, sinkhorn
from .losses import get_loss
from .measures import DiscreteMeasure, LabeledDataset
from .validation import NumericalError, check_same_dim, check_unit_interval

_NN_BLOCK = 512


@dataclass(frozen=True)
class BarycentricMap:
    """Barycentric projection of an entropic coupling between point clouds."""

    plan: TransportPlan
    source_points: np.ndarray
    target_points: np.ndarray
    row_mass: np.ndarray
    images: np.ndarray

    @classmethod
    def from_plan(cls, plan: TransportPlan, source_points, target_points) -> "BarycentricMap":
        source_points = np.asarray(source_points, dtype=np.float64)
        target_points = np.asarray(target_points, dtype=np.float64)
        if plan.shape != (source_points.shape[0], target_points.shape[0]):
            raise ValueError(
                f"plan shape {plan.shape} does not match point counts "
                f"({source_points.shape[0]}, {target_points.shape[0]})"
            )
        check_same_dim(source_points.shape[1], target_points.shape[1], "point clouds")
        row_mass = plan.coupling.sum(axis=1)
        if np.any(row_mass <= 0):
            raise ValueError("every source point needs positive coupling mass")
        images = (plan.coupling @ target_points) / row_mass[:, None]
        return cls(plan, source_points, target_points, row_mass, images)

    @property
    def n_source(self) -> int:
        return self.source_points.shape[0]

    @property
    def dim(self) -> int:
        return self.source_points.shape[1]

    def evaluate(self, x) -> np.ndarray:
        """Map arbitrary points: the n0 fitted sources go to their barycentric
        images; out-of-sample points compose the nearest source's image with
        the residual offset (x - nearest source)."""
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        pts = x[None, :] if single else x
        check_same_dim(pts.shape[1], self.dim, "points and map")
        out = np.empty_like(pts)
        src = self.source_points
        src_sq = np.einsum("ij,ij->i", src, src)
        for start in range(0, pts.shape[0], _NN_BLOCK):
            block = pts[start : start + _NN_BLOCK]
            d2 = src_sq[None, :] - 2.0 * (block @ src.T)
            nn = np.argmin(d2, axis=1)
            out[start : start + _NN_BLOCK] = self.images[nn] + (block - src[nn])
        return out[0] if single else out

    def displacement(self) -> np.ndarray:
        """T(X0) - X0 on the fitted source points."""
        return self.images - self.source_points


def estimate_map(
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    **sinkhorn_kwargs,
) -> BarycentricMap:
    """Estimate the transport map source -> target from an entropic coupling.

    Raises NumericalError when the Sinkhorn solve does not reach the marginal
    tolerance, since the projection would then be systematically off.
    """
    if np.any(source.weights <= 0):
        raise ValueError("source weights must be strictly positive for barycentric projection")
    plan = sinkhorn(source, target, eps, max_iter, tol, **sinkhorn_kwargs)
    if not plan.converged:
        raise NumericalError(
            f"Sinkhorn did not converge (marginal violation {plan.marginal_violation:.3e} > {tol:.1e})"
        )
    return BarycentricMap.from_plan(plan, source.points, target.points)


@dataclass(frozen=True)
class AugmentationBatch:
    """Interpolated samples with their soft/hard labels and geodesic location."""

    samples: np.ndarray
    soft_labels: np.ndarray
    hard_labels: np.ndarray
    t: float
    source_indices: np.ndarray

    def __post_init__(self):
        if not (
            self.samples.shape[0]
            == self.soft_labels.shape[0]
            == self.hard_labels.shape[0]
            == self.source_indices.shape[0]
        ):
            raise ValueError("batch fields must share the sample count")

    @property
    def n(self) -> int:
        return self.samples.shape[0]


def _soft_hard_labels(y0, y1, t: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    y0 = np.broadcast_to(np.asarray(y0, dtype=np.float64), (n,))
    y1 = np.broadcast_to(np.asarray(y1, dtype=np.float64), (n,))
    soft = (1.0 - t) * y0 + t * y1
    hard = np.where(t <= 0.5, y0, y1).astype(np.int64)
    return soft, hard


def interpolate(
    bmap: BarycentricMap,
    label_source: Union[int, np.ndarray],
    label_target: Union[int, np.ndarray],
    t: float,
    source_indices: Optional[np.ndarray] = None,
) -> AugmentationBatch:
    """Displacement interpolation (1 - t) X0 + t T(X0) of the fitted sources.

    t = 0 and t = 1 reproduce the source points / mapped points bitwise; the
    hard label stays with the source side up to and including t = 0.5.
    """
    t = check_unit_interval(t, "t")
    n = bmap.n_source
    if t == 0.0:
        samples = bmap.source_points.copy()
    elif t == 1.0:
        samples = bmap.images.copy()
    else:
        samples = (1.0 - t) * bmap.source_points + t * bmap.images
    soft, hard = _soft_hard_labels(label_source, label_target, t, n)
    idx = np.arange(n) if source_indices is None else np.asarray(source_indices, dtype=np.int64)
    return AugmentationBatch(samples, soft, hard, t, idx)


def mixup_mode(
    source: LabeledDataset,
    target: LabeledDataset,
    pairing: Sequence[int],
    t: float,
) -> AugmentationBatch:
    """Plain mixup between paired rows: (1 - t) x0 + t x1[pairing].

    Requires equal sample counts (pairing is a bijection); this is the
    degenerate transport map that sends each source row to its paired target
    row, and serves as the equivalence oracle for `interpolate`.
    """
    t = check_unit_interval(t, "t")
    if source.n != target.n:
        raise ValueError(
            f"mixup needs equal sample counts, got {source.n} and {target.n}"
        )
    check_same_dim(source.dim, target.dim, "datasets")
    pairing = np.asarray(pairing, dtype=np.int64)
    if pairing.shape != (source.n,) or not np.array_equal(np.sort(pairing), np.arange(source.n)):
        raise ValueError("pairing must be a bijection (a permutation of 0..n-1)")
    x0 = source.features
    x1 = target.features[pairing]
    if t == 0.0:
        samples = x0.copy()
    elif t == 1.0:
        samples = x1.copy()
    else:
        samples = (1.0 - t) * x0 + t * x1
    soft, hard = _soft_hard_labels(source.labels, target.labels[pairing], t, source.n)
    return AugmentationBatch(samples, soft, hard, t, np.arange(source.n))


def worst_case_t(
    bmap: BarycentricMap,
    labels: Tuple[Union[int, np.ndarray], Union[int, np.ndarray]],
    classifier,
    loss,
    t_grid: Sequence[float],
    decode: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> Tuple[float, np.ndarray]:
    """Grid search for the interpolation location with maximal mean loss.

    Returns (t_star, losses) with losses aligned to the ascending-sorted grid;
    ties go to the smallest t. `decode` (when given) maps interpolated samples
    back to the classifier's input space before scoring.
    """
    loss = get_loss(loss)
    grid = np.sort(np.asarray(list(t_grid), dtype=np.float64))
    if grid.size == 0:
        raise ValueError("t_grid must be nonempty")
    if grid[0] < 0.0 or grid[-1] > 1.0:
        raise ValueError("t_grid values must lie in [0, 1]")
    label_source, label_target = labels
    losses = np.empty(grid.size)
    for k, t in enumerate(grid):
        batch = interpolate(bmap, label_source, label_target, float(t))
        samples = batch.samples if decode is None else decode(batch.samples)
        scores = classifier.decision_function(samples)
        y = batch.hard_labels if loss.uses_hard_labels else batch.soft_labels
        losses[k] = loss.mean(scores, y)
    best = int(np.argmax(losses))
    return float(grid[best]), losses


class BarycentricMapper(BaseEstimator):
    """Estimator-style wrapper: fit on (source, target) clouds, then transform
    arbitrary points through the barycentric projection or interpolate."""

    def __init__(self, eps: float = DEFAULT_EPS, max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_TOL):
        self.eps = eps
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, Xs, Xt) -> "BarycentricMapper":
        source = DiscreteMeasure.uniform(Xs)
        target = DiscreteMeasure.uniform(Xt)
        self.map_ = estimate_map(source, target, self.eps, self.max_iter, self.tol)
        return self

    def _check_fitted(self) -> BarycentricMap:
        if not hasattr(self, "map_"):
            raise NotFittedError("BarycentricMapper must be fitted before use")
        return self.map_

    def transform(self, X) -> np.ndarray:
        return self._check_fitted().evaluate(X)

    def interpolate(self, t: float, label_source=0, label_target=0) -> AugmentationBatch:
        return interpolate(self._check_fitted(), label_source, label_target, t)
