"""Performance along the interpolation path and the geodesic smoothness
regularizer.

For a classifier f and loss l, the curve R(t) is the mean loss on the
interpolated batch x_t = (1 - t) x + t T(x) against the interpolated soft
label y_t = (1 - t) y0 + t y1. Differentiating through both the sample path
and the label path gives the node derivative

    dR/dt = mean[ dl/ds (theta . (T(x) - x)) + dl/dy (y1 - y0) ]

and the regularizer is the trapezoidal quadrature of |dR/dt| over the grid.
The 0-1 loss has no usable derivative; a total-variation fallback over the
computed curve is provided for it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .barycentric import BarycentricMap
from .classifier import LinearClassifier
from .embedding import AffineEmbedding
from .losses import get_loss


@dataclass(frozen=True)
class GeodesicLossCurve:
    """Loss along the geodesic: node locations, values and d(loss)/dt."""

    t: np.ndarray
    losses: np.ndarray
    dlosses: np.ndarray

    def __post_init__(self):
        if not (self.t.shape == self.losses.shape == self.dlosses.shape):
            raise ValueError("curve fields must share one shape")
        if self.t.ndim != 1 or np.any(np.diff(self.t) <= 0):
            raise ValueError("t values must be strictly increasing")
        if not np.all(np.isfinite(self.losses)):
            raise ValueError("losses must be finite")


def _node_inputs(bmap, labels, t_grid, source_points):
    if source_points is None:
        if not isinstance(bmap, BarycentricMap):
            raise ValueError("source_points is required unless the map carries fitted sources")
        x0 = bmap.source_points
        images = bmap.images
    else:
        x0 = np.asarray(source_points, dtype=np.float64)
        images = bmap.evaluate(x0)
    grid = np.unique(np.asarray(list(t_grid), dtype=np.float64))
    if grid.size == 0:
        raise ValueError("t_grid must be nonempty")
    if grid[0] < 0.0 or grid[-1] > 1.0:
        raise ValueError("t_grid values must lie in [0, 1]")
    y0, y1 = labels
    n = x0.shape[0]
    y0 = np.broadcast_to(np.asarray(y0, dtype=np.float64), (n,))
    y1 = np.broadcast_to(np.asarray(y1, dtype=np.float64), (n,))
    return x0, images, y0, y1, grid


def _curve_arrays(
    classifier: LinearClassifier,
    x0: np.ndarray,
    images: np.ndarray,
    y0: np.ndarray,
    y1: np.ndarray,
    grid: np.ndarray,
    loss,
) -> Tuple[np.ndarray, np.ndarray]:
    displacement = images - x0
    disp_score = displacement @ classifier.theta
    dy = y1 - y0
    losses = np.empty(grid.size)
    dlosses = np.full(grid.size, np.nan)
    for k, t in enumerate(grid):
        x_t = (1.0 - t) * x0 + t * images
        scores = classifier.decision_function(x_t)
        if loss.uses_hard_labels:
            y_t = np.where(t <= 0.5, y0, y1)
        else:
            y_t = (1.0 - t) * y0 + t * y1
        losses[k] = float(np.mean(loss.value(scores, y_t)))
        if loss.differentiable:
            dlosses[k] = float(
                np.mean(loss.dscore(scores, y_t) * disp_score + loss.dlabel(scores, y_t) * dy)
            )
    if not loss.differentiable and grid.size > 1:
        dlosses = np.gradient(losses, grid)
    elif not loss.differentiable:
        dlosses = np.zeros(1)
    return losses, dlosses


def performance_geodesic(
    classifier: LinearClassifier,
    bmap,
    labels: Tuple[Union[int, np.ndarray], Union[int, np.ndarray]],
    loss,
    t_grid: Sequence[float],
    source_points: Optional[np.ndarray] = None,
) -> GeodesicLossCurve:
    """Mean loss of the classifier at each node of the interpolation path.

    `bmap` is anything with an `evaluate` method (an empirical barycentric
    map or a closed-form Gaussian map); `labels` is the (source, target)
    label pair, scalars or per-sample arrays.
    """
    loss = get_loss(loss)
    x0, images, y0, y1, grid = _node_inputs(bmap, labels, t_grid, source_points)
    losses, dlosses = _curve_arrays(classifier, x0, images, y0, y1, grid, loss)
    return GeodesicLossCurve(grid, losses, dlosses)


def smoothness_regularizer(
    classifier: LinearClassifier,
    bmap,
    labels: Tuple[Union[int, np.ndarray], Union[int, np.ndarray]],
    loss,
    t_grid: Sequence[float],
    source_points: Optional[np.ndarray] = None,
    method: str = "analytic",
) -> float:
    """Integral of |dR/dt| over [0, 1], by trapezoidal quadrature of the
    analytic node derivatives (differentiable losses) or, with
    method="total_variation", by summing |R(t_{k+1}) - R(t_k)| (the only
    meaningful reading for the 0-1 loss)."""
    loss = get_loss(loss)
    x0, images, y0, y1, grid = _node_inputs(bmap, labels, t_grid, source_points)
    if grid.size < 2:
        raise ValueError("t_grid must contain at least 2 nodes")
    losses, dlosses = _curve_arrays(classifier, x0, images, y0, y1, grid, loss)
    if method == "total_variation":
        return float(np.sum(np.abs(np.diff(losses))))
    if method != "analytic":
        raise ValueError(f"method must be 'analytic' or 'total_variation', got {method!r}")
    if not loss.differentiable:
        raise ValueError(
            f"loss {loss.name!r} has no derivative; use method='total_variation'"
        )
    return float(np.trapezoid(np.abs(dlosses), grid))


def embedded_classifier(classifier: LinearClassifier, embedding: AffineEmbedding) -> LinearClassifier:
    """Express a data-space linear classifier in embedding coordinates, so that
    scoring a latent z equals scoring its reconstruction."""
    theta_z = embedding.transform_classifier_direction(classifier.theta)
    beta_z = classifier.beta + float(classifier.theta @ embedding.center_)
    return LinearClassifier(theta_z, beta_z)


def smoothness_regularizer_embedded(
    classifier: LinearClassifier,
    bmap_z,
    embedding: AffineEmbedding,
    labels: Tuple[Union[int, np.ndarray], Union[int, np.ndarray]],
    loss,
    t_grid: Sequence[float],
    source_points_z: Optional[np.ndarray] = None,
    method: str = "analytic",
) -> float:
    """Smoothness regularizer computed in embedding space: the map and source
    points live in latent coordinates and the classifier is pulled through the
    decoder. The identity embedding reproduces the plain regularizer exactly."""
    clf_z = embedded_classifier(classifier, embedding)
    return smoothness_regularizer(
        clf_z, bmap_z, labels, loss, t_grid, source_points=source_points_z, method=method
    )


def write_curve_csv(curve: GeodesicLossCurve, path, header_lines: Sequence[str] = ()) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "loss", "dloss_dt"])
        for t, l, dl in zip(curve.t, curve.losses, curve.dlosses):
            writer.writerow([f"{t:.17g}", f"{l:.17g}", f"{dl:.17g}"])
