"""Minibatch augmentation: sample a class pair, estimate the transport map on
a small batch (optionally in an embedding space), pick the interpolation
location where the classifier hurts most, and keep those samples.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from math import ceil
from typing import List, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._rng import SeedLike, spawn_rngs
from .barycentric import AugmentationBatch, estimate_map, interpolate, worst_case_t
from .classifier import mean_estimator
from .embedding import AffineEmbedding
from .entropic import DEFAULT_EPS, DEFAULT_MAX_ITER
from .measures import DiscreteMeasure, LabeledDataset


@dataclass(frozen=True)
class AugmentConfig:
    """Knobs of the batch augmentation loop.

    batch_size is the per-class batch for each transport solve; magnification
    scales how many augmented samples are produced relative to the dataset
    (count = magnification * n, up to one batch of rounding). t candidates
    come from a uniform grid (deterministic default) or uniform random draws.
    """

    batch_size: int = 64
    magnification: float = 1.0
    t_mode: str = "grid"
    t_count: int = 21
    eps: float = DEFAULT_EPS
    max_iter: int = DEFAULT_MAX_ITER
    # Interpolation cares about the map, not ultra-tight marginals; small
    # batches can stall just above the solver's library default tolerance.
    tol: float = 3e-5
    loss: str = "logistic"

    def __post_init__(self):
        if self.batch_size < 2:
            raise ValueError(f"batch_size must be >= 2, got {self.batch_size}")
        if self.magnification < 0:
            raise ValueError(f"magnification must be >= 0, got {self.magnification}")
        if self.t_mode not in ("grid", "random"):
            raise ValueError(f"t_mode must be 'grid' or 'random', got {self.t_mode!r}")
        if self.t_count < 1:
            raise ValueError(f"t_count must be >= 1, got {self.t_count}")


def _scoring_labels(src_label: int, tgt_label: int) -> tuple:
    if {src_label, tgt_label} <= {-1, 1}:
        return src_label, tgt_label
    # Multiclass pair: score against the signed mixing coordinate.
    return -1, 1


def augment_batches(
    data: LabeledDataset,
    classifier,
    config: AugmentConfig = AugmentConfig(),
    embedding: Optional[AffineEmbedding] = None,
    seed: SeedLike = 0,
) -> List[AugmentationBatch]:
    """Run the augmentation loop and return one batch per transport solve.

    Each batch samples an unordered class pair uniformly, draws batch_size
    points per class (with replacement when a class is smaller), estimates the
    entropic map between the batches (in embedding coordinates when an
    embedding is given), and stores the interpolation at the worst-case t.
    Samples are returned in data space; labels follow the source side for
    t <= 0.5 and carry the exact soft mixture.
    """
    classes = np.unique(data.labels)
    if classes.size < 2:
        raise ValueError("augmentation needs at least 2 classes")
    num_batches = ceil(config.magnification * data.n / config.batch_size)
    if num_batches == 0:
        return []
    pairs = [(int(a), int(b)) for i, a in enumerate(classes) for b in classes[i + 1 :]]
    class_indices = {int(c): np.flatnonzero(data.labels == c) for c in classes}
    rngs = spawn_rngs(seed, num_batches)
    batches: List[AugmentationBatch] = []
    for rng in rngs:
        src_label, tgt_label = pairs[int(rng.integers(len(pairs)))]
        if rng.random() < 0.5:
            src_label, tgt_label = tgt_label, src_label
        picks = {}
        for label in (src_label, tgt_label):
            pool = class_indices[label]
            picks[label] = rng.choice(pool, size=config.batch_size, replace=pool.size < config.batch_size)
        x0 = data.features[picks[src_label]]
        x1 = data.features[picks[tgt_label]]
        if embedding is not None:
            z0, z1 = embedding.transform(x0), embedding.transform(x1)
            decode = embedding.inverse_transform
        else:
            z0, z1 = x0, x1
            decode = None
        bmap = estimate_map(
            DiscreteMeasure.uniform(z0),
            DiscreteMeasure.uniform(z1),
            eps=config.eps,
            max_iter=config.max_iter,
            tol=config.tol,
        )
        if config.t_mode == "grid":
            candidates = np.linspace(0.0, 1.0, config.t_count)
        else:
            candidates = rng.uniform(0.0, 1.0, size=config.t_count)
        t_star, _ = worst_case_t(
            bmap, _scoring_labels(src_label, tgt_label), classifier, config.loss, candidates, decode=decode
        )
        batch_z = interpolate(bmap, src_label, tgt_label, t_star, source_indices=picks[src_label])
        samples = batch_z.samples if decode is None else decode(batch_z.samples)
        batches.append(
            AugmentationBatch(samples, batch_z.soft_labels, batch_z.hard_labels, t_star, batch_z.source_indices)
        )
    return batches


def batches_to_dataset(batches: Sequence[AugmentationBatch]) -> LabeledDataset:
    """Concatenate batches into a dataset carrying the hard labels."""
    if not batches:
        raise ValueError("no batches to concatenate")
    features = np.vstack([b.samples for b in batches])
    labels = np.concatenate([b.hard_labels for b in batches])
    return LabeledDataset(features, labels)


def write_augmented_csv(
    batches: Sequence[AugmentationBatch], dim: int, path, header_lines: Sequence[str] = ()
) -> None:
    """Dump batches as f0..f{d-1}, soft_label, hard_label, t, pair_id rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow([f"f{j}" for j in range(dim)] + ["soft_label", "hard_label", "t", "pair_id"])
        for pair_id, batch in enumerate(batches):
            for row, soft, hard in zip(batch.samples, batch.soft_labels, batch.hard_labels):
                writer.writerow(
                    [f"{v:.17g}" for v in row]
                    + [f"{soft:.17g}", str(int(hard)), f"{batch.t:.17g}", str(pair_id)]
                )


def read_augmented_csv(path) -> List[AugmentationBatch]:
    """Load an augmented dump back into batches grouped by pair_id."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    if not rows:
        raise ValueError("augmented file is empty")
    header = rows[0]
    if header[-4:] != ["soft_label", "hard_label", "t", "pair_id"]:
        raise ValueError("not an augmented dump (expected trailing soft_label,hard_label,t,pair_id)")
    d = len(header) - 4
    groups: dict = {}
    for row in rows[1:]:
        if not row:
            continue
        pair_id = int(row[-1])
        groups.setdefault(pair_id, []).append(row)
    batches = []
    for pair_id in sorted(groups):
        block = groups[pair_id]
        samples = np.array([[float(v) for v in r[:d]] for r in block])
        soft = np.array([float(r[d]) for r in block])
        hard = np.array([int(r[d + 1]) for r in block], dtype=np.int64)
        t = float(block[0][d + 2])
        batches.append(AugmentationBatch(samples, soft, hard, t, np.arange(len(block))))
    return batches


class GeodesicAugmenter(BaseEstimator):
    """Estimator-style front end: fit(X, y) captures the dataset (and a PCA
    embedding when embedding_dim is set); augment() runs the batch loop."""

    def __init__(
        self,
        batch_size: int = 64,
        magnification: float = 1.0,
        t_mode: str = "grid",
        t_count: int = 21,
        eps: float = DEFAULT_EPS,
        embedding_dim: Optional[int] = None,
        loss: str = "logistic",
        seed: int = 0,
    ):
        self.batch_size = batch_size
        self.magnification = magnification
        self.t_mode = t_mode
        self.t_count = t_count
        self.eps = eps
        self.embedding_dim = embedding_dim
        self.loss = loss
        self.seed = seed

    def fit(self, X, y) -> "GeodesicAugmenter":
        self.data_ = LabeledDataset(np.asarray(X, dtype=np.float64), np.asarray(y))
        if self.embedding_dim is not None:
            self.embedding_ = AffineEmbedding(self.embedding_dim).fit(self.data_.features)
        else:
            self.embedding_ = None
        return self

    def augment(self, classifier=None) -> List[AugmentationBatch]:
        if not hasattr(self, "data_"):
            raise NotFittedError("GeodesicAugmenter must be fitted before use")
        if classifier is None:
            classifier = mean_estimator(self.data_)
        config = AugmentConfig(
            batch_size=self.batch_size,
            magnification=self.magnification,
            t_mode=self.t_mode,
            t_count=self.t_count,
            eps=self.eps,
            loss=self.loss,
        )
        return augment_batches(self.data_, classifier, config, embedding=self.embedding_, seed=self.seed)
