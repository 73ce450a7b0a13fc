"""Analytic and Monte Carlo robustness metrics for the symmetric conditional
Gaussian model (classes N(-mu, s^2 I) and N(+mu, s^2 I), balance 1/2).

For a homogeneous linear classifier sign(theta . x), the closed forms are

    standard error   Q(mu.theta / (s ||theta||))
    linf(eps) error  Q((mu.theta - eps ||theta||_1) / (s ||theta||))
    smoothed error   Q(mu.theta / (sqrt(s^2 + s_n^2) ||theta||))

with Q the standard normal upper tail. The smoothed form uses the
variance-correct convolution sqrt(s^2 + s_n^2); the additive (s + s_n)
variant is available behind `paper_convention=True` for comparison but does
not match Monte Carlo.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import erfc

from ._rng import SeedLike, make_rng, spawn_rngs
from .classifier import LinearClassifier, fgsm_attack, mean_estimator, pooled_estimator
from .entropic import DEFAULT_EPS
from .barycentric import estimate_map, interpolate
from .measures import (
    ConditionalGaussianModel,
    LabeledDataset,
    sample_conditional_gaussian,
    split_by_class,
)
from .validation import check_nonnegative


def q_function(x):
    """Standard normal upper-tail probability Q(x) = P(Z > x)."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(np.isnan(arr)):
        raise ValueError("q_function input must not be NaN")
    out = 0.5 * erfc(arr / math.sqrt(2.0))
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def _direction_stats(model: ConditionalGaussianModel, clf: LinearClassifier) -> Tuple[float, float, float]:
    if clf.beta != 0.0:
        raise ValueError("analytic error formulas require a homogeneous classifier (beta = 0)")
    norm = float(np.linalg.norm(clf.theta))
    if norm == 0.0:
        raise ValueError("theta must be nonzero")
    mu_proj = float(model.mu @ clf.theta)
    l1 = float(np.sum(np.abs(clf.theta)))
    return mu_proj, norm, l1


def standard_error(model: ConditionalGaussianModel, clf: LinearClassifier) -> float:
    mu_proj, norm, _ = _direction_stats(model, clf)
    return q_function(mu_proj / (model.sigma * norm))


def linf_robust_error(model: ConditionalGaussianModel, clf: LinearClassifier, eps: float) -> float:
    eps = check_nonnegative(eps, "eps")
    mu_proj, norm, l1 = _direction_stats(model, clf)
    return q_function((mu_proj - eps * l1) / (model.sigma * norm))


def smoothed_error(
    model: ConditionalGaussianModel,
    clf: LinearClassifier,
    sigma_s: float,
    paper_convention: bool = False,
) -> float:
    sigma_s = check_nonnegative(sigma_s, "sigma_s")
    mu_proj, norm, _ = _direction_stats(model, clf)
    if paper_convention:
        effective = model.sigma + sigma_s
    else:
        effective = math.sqrt(model.sigma**2 + sigma_s**2)
    return q_function(mu_proj / (effective * norm))


@dataclass(frozen=True)
class RobustnessReport:
    """Error probabilities for one classifier under one evaluation mode."""

    standard_error: float
    mode: str  # "analytic" or "monte_carlo"
    robust_error: Optional[float] = None
    robust_eps: Optional[float] = None
    smoothed_error: Optional[float] = None
    smoothing_sigma: Optional[float] = None
    n_samples: Optional[int] = None
    std_error: Optional[float] = None

    def __post_init__(self):
        for name in ("standard_error", "robust_error", "smoothed_error"):
            value = getattr(self, name)
            if value is not None and not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        if self.robust_error is not None and self.robust_error < self.standard_error - 1e-12:
            raise ValueError("robust error cannot be below the standard error")


def analytic_report(
    model: ConditionalGaussianModel,
    clf: LinearClassifier,
    eps: Optional[float] = None,
    sigma_s: Optional[float] = None,
) -> RobustnessReport:
    return RobustnessReport(
        standard_error=standard_error(model, clf),
        mode="analytic",
        robust_error=None if eps is None else linf_robust_error(model, clf, eps),
        robust_eps=eps,
        smoothed_error=None if sigma_s is None else smoothed_error(model, clf, sigma_s),
        smoothing_sigma=sigma_s,
    )


def monte_carlo_error(
    model: ConditionalGaussianModel,
    clf: LinearClassifier,
    n: int,
    attack: Optional[Tuple[str, float]] = None,
    seed: SeedLike = 0,
) -> RobustnessReport:
    """Empirical error probabilities on n fresh draws.

    `attack` is None, ("fgsm", eps) for the exact worst-case l_inf attack, or
    ("gaussian", sigma_s) for additive Gaussian input noise. The binomial
    standard error sqrt(p (1 - p) / n) of the headline estimate is reported.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng_data, rng_noise = spawn_rngs(seed, 2)
    data = sample_conditional_gaussian(model, n, rng_data)
    clean_wrong = clf.predict(data.features) != data.labels
    p_std = float(np.mean(clean_wrong))
    robust_err = robust_eps = smooth_err = smooth_sigma = None
    headline = p_std
    if attack is not None:
        kind, magnitude = attack
        if kind == "fgsm":
            robust_eps = check_nonnegative(magnitude, "eps")
            attacked = fgsm_attack(clf, data.features, data.labels, robust_eps)
            robust_err = float(np.mean(clf.predict(attacked) != data.labels))
            headline = robust_err
        elif kind == "gaussian":
            smooth_sigma = check_nonnegative(magnitude, "sigma_s")
            noisy = data.features + smooth_sigma * rng_noise.standard_normal(data.features.shape)
            smooth_err = float(np.mean(clf.predict(noisy) != data.labels))
            headline = smooth_err
        else:
            raise ValueError(f"unknown attack kind {kind!r}; use 'fgsm' or 'gaussian'")
    return RobustnessReport(
        standard_error=p_std,
        mode="monte_carlo",
        robust_error=robust_err,
        robust_eps=robust_eps,
        smoothed_error=smooth_err,
        smoothing_sigma=smooth_sigma,
        n_samples=n,
        std_error=float(math.sqrt(headline * (1.0 - headline) / n)),
    )


@dataclass(frozen=True)
class GainTrial:
    """One augmentation-gain trial: analytic robust errors of the plain mean
    estimator versus the pooled estimator over original plus augmented data."""

    pe_orig: float
    pe_aug: float
    improved: bool
    n0: int
    n1: int
    r: float
    eps: float


def _empirical_geodesic_augmented(
    model: ConditionalGaussianModel,
    n1: int,
    r: float,
    rng,
    sinkhorn_eps: float,
) -> LabeledDataset:
    """Augmented samples built by the full pipeline: fresh base draws, one
    entropic map per direction, interpolation at the location t = (1 - r)/2."""
    base = sample_conditional_gaussian(model, n1, rng)
    measures = split_by_class(base)
    if set(measures) != {-1, 1}:
        raise ValueError("empirical route needs draws from both classes; increase n1")
    t = (1.0 - r) / 2.0
    parts = []
    labels = []
    for src, tgt in ((-1, 1), (1, -1)):
        bmap = estimate_map(measures[src], measures[tgt], eps=sinkhorn_eps)
        batch = interpolate(bmap, src, tgt, t)
        parts.append(batch.samples)
        labels.append(batch.hard_labels)
    return LabeledDataset(np.vstack(parts), np.concatenate(labels))


def robustness_gain_trial(
    model: ConditionalGaussianModel,
    n0: int,
    n1: int,
    r: float,
    eps: float,
    seed: SeedLike,
    route: str = "analytic",
    sinkhorn_eps: float = DEFAULT_EPS,
) -> GainTrial:
    """Draw one original sample of size n0 and one augmented sample of size n1
    from the contracted pair (means +-r mu), fit both mean estimators, and
    compare their analytic l_inf robust errors at radius eps.

    route="analytic" samples the augmented data from the closed-form geodesic
    Gaussians; route="empirical" builds them with the Sinkhorn/barycentric
    pipeline at `sinkhorn_eps`.
    """
    if not (0.0 <= r <= 1.0):
        raise ValueError(f"r must lie in [0, 1], got {r!r}")
    if n0 < 1:
        raise ValueError(f"n0 must be >= 1, got {n0}")
    if n1 < 0:
        raise ValueError(f"n1 must be >= 0, got {n1}")
    rng_orig, rng_aug = spawn_rngs(seed, 2)
    original = sample_conditional_gaussian(model, n0, rng_orig)
    augmented: Optional[LabeledDataset] = None
    if n1 > 0:
        if route == "analytic":
            contracted = ConditionalGaussianModel(r * model.mu, model.sigma)
            augmented = sample_conditional_gaussian(contracted, n1, rng_aug)
        elif route == "empirical":
            augmented = _empirical_geodesic_augmented(model, n1, r, rng_aug, sinkhorn_eps)
        else:
            raise ValueError(f"route must be 'analytic' or 'empirical', got {route!r}")
    clf_orig = mean_estimator(original)
    clf_aug = pooled_estimator(original, augmented)
    pe_orig = linf_robust_error(model, clf_orig, eps)
    pe_aug = linf_robust_error(model, clf_aug, eps)
    return GainTrial(pe_orig, pe_aug, bool(pe_aug < pe_orig), n0, n1, r, eps)


@dataclass(frozen=True)
class DroCheckResult:
    """Worst case over a feasibility-masked (mean shift, variance scale) grid."""

    s_star: float
    v_star: float
    error_star: float
    s_grid: np.ndarray
    v_grid: np.ndarray
    errors: np.ndarray  # NaN outside the Wasserstein ball
    eps_ball: float


def dro_worst_case_check(
    model: ConditionalGaussianModel,
    eps_ball: float,
    grid: int | Tuple[Sequence[float], Sequence[float]] = 201,
) -> DroCheckResult:
    """Exhaustive grid maximization of the 0-1 error of the fixed classifier
    sign(mu . x) over symmetric Gaussian pairs (N(-s mu, v s0^2 I),
    N(+s mu, v s0^2 I)) inside the per-class Wasserstein ball

        (1 - s)^2 ||mu||^2 + d s0^2 (sqrt(v) - 1)^2 <= eps^2.

    The error at a feasible cell is Q(s ||mu|| / (sqrt(v) s0)).
    """
    eps_ball = check_nonnegative(eps_ball, "eps_ball")
    mu_norm = float(np.linalg.norm(model.mu))
    if mu_norm == 0.0:
        raise ValueError("model mean must be nonzero for the worst-case check")
    sigma = model.sigma
    d = model.dim
    if isinstance(grid, int):
        if grid < 1:
            raise ValueError(f"grid size must be >= 1, got {grid}")
        if eps_ball == 0.0:
            s_grid = np.array([1.0])
            v_grid = np.array([1.0])
        else:
            s_grid = np.linspace(1.0 - eps_ball / mu_norm, 1.0, grid)
            gamma_max = eps_ball / (math.sqrt(d) * sigma)
            gammas = np.linspace(-gamma_max, gamma_max, grid if grid % 2 == 1 else grid + 1)
            v_grid = (1.0 + gammas) ** 2
            v_grid = v_grid[v_grid > 0]
    else:
        s_grid = np.asarray(grid[0], dtype=np.float64)
        v_grid = np.asarray(grid[1], dtype=np.float64)
        if s_grid.size == 0 or v_grid.size == 0:
            raise ValueError("grid must be nonempty")
    shift_cost = (s_grid[:, None] - 1.0) ** 2 * mu_norm**2
    scale_cost = d * sigma**2 * (np.sqrt(v_grid)[None, :] - 1.0) ** 2
    feasible = shift_cost + scale_cost <= eps_ball**2 * (1.0 + 1e-12) + 1e-300
    if not feasible.any():
        raise ValueError("no grid cell lies inside the Wasserstein ball")
    with np.errstate(invalid="ignore"):
        errors = q_function(s_grid[:, None] * mu_norm / (np.sqrt(v_grid)[None, :] * sigma))
    errors = np.where(feasible, errors, np.nan)
    flat = np.nanargmax(errors)
    i, j = np.unravel_index(flat, errors.shape)
    return DroCheckResult(
        s_star=float(s_grid[i]),
        v_star=float(v_grid[j]),
        error_star=float(errors[i, j]),
        s_grid=s_grid,
        v_grid=v_grid,
        errors=errors,
        eps_ball=eps_ball,
    )


def write_trials_csv(trials: Sequence[GainTrial], path, header_lines: Sequence[str] = ()) -> None:
    """Dump per-trial rows (trial, n0, n1, r, eps, pe_orig, pe_aug, improved)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["trial", "n0", "n1", "r", "eps", "pe_orig", "pe_aug", "improved"])
        for k, trial in enumerate(trials):
            writer.writerow(
                [
                    k,
                    trial.n0,
                    trial.n1,
                    f"{trial.r:.17g}",
                    f"{trial.eps:.17g}",
                    f"{trial.pe_orig:.17g}",
                    f"{trial.pe_aug:.17g}",
                    int(trial.improved),
                ]
            )
