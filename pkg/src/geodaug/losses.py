"""Loss functions on (decision score, label) pairs.

Labels may be soft (reals in [-1, 1] from geodesic interpolation) for the
differentiable losses; the 0-1 loss consumes hard -1/+1 labels. Each loss
exposes the partial derivatives needed by the geodesic smoothness machinery:
`dscore` (w.r.t. the decision value) and `dlabel` (w.r.t. the soft label).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class Loss:
    name: str
    value: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dscore: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]]
    dlabel: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]]
    differentiable: bool
    uses_hard_labels: bool

    def mean(self, scores, labels) -> float:
        return float(np.mean(self.value(np.asarray(scores), np.asarray(labels))))


def _zero_one_value(scores, labels):
    preds = np.where(np.asarray(scores) >= 0, 1, -1)
    return (preds != np.asarray(labels)).astype(np.float64)


def _logistic_value(scores, labels):
    return np.logaddexp(0.0, -labels * scores)


def _logistic_dscore(scores, labels):
    # d/ds log(1 + exp(-y s)) = -y * sigmoid(-y s)
    from scipy.special import expit

    return -labels * expit(-labels * scores)


def _logistic_dlabel(scores, labels):
    from scipy.special import expit

    return -scores * expit(-labels * scores)


def _linear_value(scores, labels):
    return -labels * scores


def _linear_dscore(scores, labels):
    return -np.asarray(labels, dtype=np.float64) * np.ones_like(scores)


def _linear_dlabel(scores, labels):
    return -np.asarray(scores, dtype=np.float64) * np.ones_like(labels)


ZERO_ONE = Loss("zero_one", _zero_one_value, None, None, differentiable=False, uses_hard_labels=True)
LOGISTIC = Loss(
    "logistic", _logistic_value, _logistic_dscore, _logistic_dlabel, differentiable=True, uses_hard_labels=False
)
LINEAR_YFX = Loss(
    "linear_yfx", _linear_value, _linear_dscore, _linear_dlabel, differentiable=True, uses_hard_labels=False
)

_REGISTRY = {loss.name: loss for loss in (ZERO_ONE, LOGISTIC, LINEAR_YFX)}


def get_loss(loss) -> Loss:
    """Resolve a loss by name; Loss instances pass through."""
    if isinstance(loss, Loss):
        return loss
    if loss in _REGISTRY:
        return _REGISTRY[loss]
    raise ValueError(f"unknown loss {loss!r}; available: {sorted(_REGISTRY)}")
