"""Entropic optimal transport between discrete measures.

The solver is a log-stabilized Sinkhorn: scaling iterations run as matrix-
vector products against a Gibbs kernel built from absorbed dual potentials,
with the potentials re-absorbed whenever the scalings drift too far from 1.
An epsilon-scaling ladder warm-starts small regularizations, which is what
makes eps = 0.01 and below practical with squared-distance costs.

Costs are divided by their median before solving and the transport cost is
reported against the original cost matrix, so `eps` means the same thing
across datasets regardless of the feature scale.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .measures import DiscreteMeasure
from .validation import NumericalError, check_positive, check_same_dim

DEFAULT_EPS = 0.01
DEFAULT_MAX_ITER = 10_000
DEFAULT_TOL = 1e-6
DEFAULT_OVERRELAXATION = 1.5

_ABSORB_THRESHOLD = 150.0
_ABSORB_EVERY = 64
_LADDER_RATIO = 0.25
_LADDER_ITERS = 8


@dataclass(frozen=True)
class CostMatrix:
    """Pairwise ground costs between two point clouds."""

    values: np.ndarray
    metric: str = "sqeuclidean"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"cost matrix must be 2-d, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("cost matrix must be finite")
        if np.any(values < 0):
            raise ValueError("cost matrix entries must be nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class TransportPlan:
    """An entropic coupling together with its solve diagnostics."""

    coupling: np.ndarray
    source_weights: np.ndarray
    target_weights: np.ndarray
    sinkhorn_epsilon: float
    iterations: int
    marginal_violation: float
    converged: bool

    def __post_init__(self):
        coupling = np.asarray(self.coupling, dtype=np.float64)
        if coupling.ndim != 2:
            raise ValueError(f"coupling must be 2-d, got shape {coupling.shape}")
        if np.any(coupling < 0):
            raise ValueError("coupling entries must be nonnegative")
        coupling.setflags(write=False)
        object.__setattr__(self, "coupling", coupling)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.coupling.shape

    def row_sums(self) -> np.ndarray:
        return self.coupling.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.coupling.sum(axis=0)

    def check_feasible(self, tol: float = DEFAULT_TOL) -> bool:
        row = np.max(np.abs(self.row_sums() - self.source_weights))
        col = np.max(np.abs(self.col_sums() - self.target_weights))
        return max(row, col) <= tol


def squared_distances(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """All-pairs squared Euclidean distances, clipped at 0 against roundoff."""
    x2 = np.einsum("ij,ij->i", x, x)
    y2 = np.einsum("ij,ij->i", y, y)
    d2 = x2[:, None] + y2[None, :] - 2.0 * (x @ y.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def cost_matrix(a: DiscreteMeasure, b: DiscreteMeasure) -> CostMatrix:
    """Squared-Euclidean ground cost between the supports of two measures."""
    check_same_dim(a.dim, b.dim, "measures")
    return CostMatrix(squared_distances(a.points, b.points))


def _median_scale(values: np.ndarray) -> float:
    scale = float(np.median(values))
    if scale <= 0.0:
        scale = float(values.max())
    return scale if scale > 0.0 else 1.0


def _ladder_scaled(eps: float, unit: float) -> list:
    """Equal-ratio geometric epsilon schedule from `unit` (the cost scale)
    down to `eps`; every jump is at most 1/_LADDER_RATIO."""
    if eps >= unit:
        return [eps]
    n = max(1, math.ceil(math.log(unit / eps) / math.log(1.0 / _LADDER_RATIO)))
    return [unit * (eps / unit) ** (k / n) for k in range(n + 1)]


def _solve_scaled(
    cost: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    eps: float,
    max_iter: int,
    tol: float,
    overrelaxation: float = DEFAULT_OVERRELAXATION,
    eps_unit: float = 1.0,
) -> Tuple[np.ndarray, int, float, bool]:
    """Run the stabilized scaling loop; `eps` and `eps_unit` are in cost units.

    Scaling corrections are tracked in the log domain and over-relaxed at the
    target regularization level; they are absorbed into the dual potentials
    (with a kernel rebuild) periodically and whenever they grow large.
    Returns (plan, iterations, marginal_violation, converged).
    """
    n0, n1 = cost.shape
    alpha = np.zeros(n0)
    beta = np.zeros(n1)
    log_a = np.log(a)
    log_b = np.log(b)
    kernel = np.empty_like(cost)
    iterations = 0
    converged = False

    def rebuild(level: float) -> None:
        _kernels.gibbs_kernel(cost, alpha, beta, 1.0 / level, kernel)

    def exact_update(level: float) -> None:
        # Log-domain double update; rescues the loop when the kernel underflows.
        nonlocal alpha, beta
        zeros0 = np.zeros(n0)
        zeros1 = np.zeros(n1)
        f = np.empty(n0)
        g = np.empty(n1)
        _kernels.row_softmin(cost, zeros0, beta, level, f)
        alpha = level * log_a + f
        _kernels.col_softmin(cost, alpha, zeros1, level, g)
        beta = level * log_b + g
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
            raise NumericalError("Sinkhorn potentials became NaN/Inf")

    levels = _ladder_scaled(eps, eps_unit)
    log_u = np.zeros(n0)
    log_v = np.zeros(n1)
    for level_idx, level in enumerate(levels):
        final = level_idx == len(levels) - 1
        omega = overrelaxation if final else 1.0
        rebuild(level)
        log_u.fill(0.0)
        log_v.fill(0.0)
        u = np.ones(n0)
        v = np.ones(n1)
        it_in_level = 0

        def absorb_and_rebuild() -> None:
            nonlocal alpha, beta, u, v
            alpha = alpha + level * log_u
            beta = beta + level * log_v
            if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
                raise NumericalError("Sinkhorn potentials became NaN/Inf")
            rebuild(level)
            log_u.fill(0.0)
            log_v.fill(0.0)
            u = np.ones(n0)
            v = np.ones(n1)

        while iterations < max_iter:
            kv = kernel @ v
            if final and it_in_level > 0:
                # diag(u) K diag(v) is the current plan; its row sums are u * kv.
                # Over-relaxed updates leave both marginals inexact, so confirm
                # the column sums too before declaring convergence.
                if np.max(np.abs(u * kv - a)) <= tol:
                    if np.max(np.abs(v * (kernel.T @ u) - b)) <= tol:
                        converged = True
                        break
            if not np.all(kv > 0.0):
                absorb_and_rebuild()
                exact_update(level)
                rebuild(level)
                kv = kernel @ v
                if not np.all(kv > 0.0):
                    raise NumericalError("Sinkhorn kernel underflowed irrecoverably")
            log_u = (1.0 - omega) * log_u + omega * (log_a - np.log(kv))
            u = np.exp(log_u)
            ktu = kernel.T @ u
            if not np.all(ktu > 0.0):
                log_v.fill(0.0)
                absorb_and_rebuild()
                exact_update(level)
                rebuild(level)
                continue
            log_v = (1.0 - omega) * log_v + omega * (log_b - np.log(ktu))
            v = np.exp(log_v)
            iterations += 1
            it_in_level += 1

            drift = max(np.max(np.abs(log_u)), np.max(np.abs(log_v)))
            if not np.isfinite(drift):
                raise NumericalError("Sinkhorn potentials became NaN/Inf")
            if drift > _ABSORB_THRESHOLD or it_in_level % _ABSORB_EVERY == 0:
                absorb_and_rebuild()
                continue

            if not final and it_in_level >= _LADDER_ITERS:
                break
        # Absorb before moving to the next (smaller) level.
        alpha = alpha + level * log_u
        beta = beta + level * log_v
        log_u.fill(0.0)
        log_v.fill(0.0)
        if converged:
            break

    rebuild(levels[-1])
    plan = kernel
    if not np.all(np.isfinite(plan)):
        raise NumericalError("Sinkhorn plan became NaN/Inf")
    row_violation = np.max(np.abs(plan.sum(axis=1) - a))
    col_violation = np.max(np.abs(plan.sum(axis=0) - b))
    violation = float(max(row_violation, col_violation))
    return plan, iterations, violation, violation <= tol


def sinkhorn(
    a: DiscreteMeasure,
    b: DiscreteMeasure,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    cost: Optional[CostMatrix] = None,
    cost_scale: Optional[float] = None,
    overrelaxation: float = DEFAULT_OVERRELAXATION,
) -> TransportPlan:
    """Entropic optimal transport plan between two discrete measures.

    `eps` applies to the median-normalized cost (pass `cost_scale` to pin the
    normalization, e.g. when several related solves must share one scale).
    Non-convergence within `max_iter` is reported through the plan's
    `converged` flag and terminal `marginal_violation`, not an exception.
    """
    eps = check_positive(eps, "eps")
    tol = check_positive(tol, "tol")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    if cost is None:
        cost = cost_matrix(a, b)
    if cost.shape != (a.n, b.n):
        raise ValueError(f"cost matrix shape {cost.shape} does not match measures ({a.n}, {b.n})")

    scale = float(cost_scale) if cost_scale is not None else _median_scale(cost.values)
    if scale <= 0:
        raise ValueError(f"cost_scale must be positive, got {scale!r}")

    # Zero-weight atoms carry no mass; solve on the positive-support block.
    # The median normalization folds into the regularization level, so the
    # cost matrix is used as-is (no copies on the common all-positive path).
    src_keep = a.weights > 0.0
    tgt_keep = b.weights > 0.0
    if src_keep.all() and tgt_keep.all():
        reduced_cost = cost.values
    else:
        reduced_cost = np.ascontiguousarray(cost.values[np.ix_(src_keep, tgt_keep)])
    plan_block, iterations, violation, converged = _solve_scaled(
        reduced_cost, a.weights[src_keep], b.weights[tgt_keep], eps * scale, max_iter, tol,
        overrelaxation=overrelaxation, eps_unit=scale,
    )
    if src_keep.all() and tgt_keep.all():
        plan = plan_block
    else:
        plan = np.zeros((a.n, b.n))
        plan[np.ix_(src_keep, tgt_keep)] = plan_block
    return TransportPlan(
        coupling=plan,
        source_weights=a.weights,
        target_weights=b.weights,
        sinkhorn_epsilon=eps,
        iterations=iterations,
        marginal_violation=violation,
        converged=converged,
    )


def entropic_cost(plan: TransportPlan, cost: CostMatrix) -> float:
    """Transport cost <pi, C> of a plan (the entropy term is not included)."""
    if plan.shape != cost.shape:
        raise ValueError(f"plan shape {plan.shape} does not match cost shape {cost.shape}")
    return float(np.sum(plan.coupling * cost.values))


def transport_cost(
    a: DiscreteMeasure,
    b: DiscreteMeasure,
    eps: float = DEFAULT_EPS,
    **kwargs,
) -> float:
    """Convenience wrapper: solve and return <pi, C> against the raw cost."""
    cost = cost_matrix(a, b)
    plan = sinkhorn(a, b, eps, cost=cost, **kwargs)
    return entropic_cost(plan, cost)


def debiased_transport_cost(
    a: DiscreteMeasure,
    b: DiscreteMeasure,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> float:
    """Sinkhorn divergence in primal form:

        <pi_ab, C_ab> - 1/2 <pi_aa, C_aa> - 1/2 <pi_bb, C_bb>

    All three solves share the cross-cost median so the regularization level
    is identical and the self-transport bias cancels.
    """
    c_ab = cost_matrix(a, b)
    scale = _median_scale(c_ab.values)
    c_aa = cost_matrix(a, a)
    c_bb = cost_matrix(b, b)
    cross = entropic_cost(sinkhorn(a, b, eps, max_iter, tol, cost=c_ab, cost_scale=scale), c_ab)
    self_a = entropic_cost(sinkhorn(a, a, eps, max_iter, tol, cost=c_aa, cost_scale=scale), c_aa)
    self_b = entropic_cost(sinkhorn(b, b, eps, max_iter, tol, cost=c_bb, cost_scale=scale), c_bb)
    return cross - 0.5 * self_a - 0.5 * self_b


@dataclass(frozen=True)
class BarycenterResult:
    """Fixed-support barycenter weights plus solve diagnostics."""

    weights: np.ndarray
    iterations: int
    converged: bool
    change: float


def debiased_barycenter(
    a: DiscreteMeasure,
    b: DiscreteMeasure,
    weights: Tuple[float, float],
    support: np.ndarray,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> BarycenterResult:
    """Debiased Sinkhorn barycenter of two measures on a fixed support grid.

    Iterates the scaling updates

        a_k <- alpha_k / K_k^T b_k
        alpha <- d * prod_k (K_k a_k)^{w_k}
        b_k <- alpha / (K_k a_k)
        d <- sqrt(d * alpha / (K_s d))

    in the log domain, where K_k are support-to-measure Gibbs kernels and K_s
    the support self-kernel providing the debiasing correction.
    """
    w1, w2 = float(weights[0]), float(weights[1])
    if abs(w1 + w2 - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got {w1 + w2!r}")
    if w1 <= 0 or w2 <= 0:
        raise ValueError(f"weights must be strictly positive, got ({w1}, {w2})")
    eps = check_positive(eps, "eps")
    support = np.asarray(support, dtype=np.float64)
    if support.ndim == 1:
        support = support[:, None]
    if support.shape[0] < 1:
        raise ValueError("support must be nonempty")
    check_same_dim(a.dim, b.dim, "measures")
    check_same_dim(a.dim, support.shape[1], "measures and support")

    cross_costs = [squared_distances(support, a.points), squared_distances(support, b.points)]
    scale = _median_scale(np.concatenate([c.ravel() for c in cross_costs]))
    inv = 1.0 / (eps * scale)
    log_k = [-c * inv for c in cross_costs]  # (m, n_k)
    log_ks = -squared_distances(support, support) * inv
    log_marginals = [np.log(a.weights), np.log(b.weights)]
    ws = (w1, w2)

    m = support.shape[0]
    log_bk = [np.zeros(m), np.zeros(m)]
    log_d = np.zeros(m)
    bary = np.full(m, 1.0 / m)
    iterations = 0
    converged = False
    change = np.inf
    while iterations < max_iter:
        log_s = []
        for k in range(2):
            log_ak = log_marginals[k] - logsumexp(log_k[k] + log_bk[k][:, None], axis=0)
            log_s.append(logsumexp(log_k[k] + log_ak[None, :], axis=1))
        log_bary = log_d + ws[0] * log_s[0] + ws[1] * log_s[1]
        for k in range(2):
            log_bk[k] = log_bary - log_s[k]
        log_d = 0.5 * (log_d + log_bary - logsumexp(log_ks + log_d[None, :], axis=1))
        iterations += 1
        new_bary = np.exp(log_bary)
        if not np.all(np.isfinite(new_bary)):
            raise NumericalError("barycenter weights became NaN/Inf")
        change = float(np.max(np.abs(new_bary - bary)))
        bary = new_bary
        if change <= tol:
            converged = True
            break
    total = bary.sum()
    if total <= 0:
        raise NumericalError("barycenter collapsed to zero mass")
    return BarycenterResult(bary / total, iterations, converged, change)


def write_plan_csv(plan: TransportPlan, path, threshold: float = 1e-12) -> None:
    """Dump (i, j, mass) triples for entries above `threshold`."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "mass"])
        rows, cols = np.nonzero(plan.coupling > threshold)
        for i, j in zip(rows, cols):
            writer.writerow([int(i), int(j), f"{plan.coupling[i, j]:.17g}"])
