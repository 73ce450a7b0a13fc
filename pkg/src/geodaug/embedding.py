"""Affine embeddings: a PCA-style projection with exact pseudo-inverse
reconstruction, standing in for learned encoders when interpolation should
happen in a lower-dimensional space.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .validation import as_features


class AffineEmbedding(BaseEstimator, TransformerMixin):
    """z = components @ (x - center), inverted by the transpose (rows are
    orthonormal). With n_components = d the round trip is exact."""

    def __init__(self, n_components: int | None = None):
        self.n_components = n_components

    def fit(self, X, y=None) -> "AffineEmbedding":
        X = as_features(X, "X")
        n, d = X.shape
        z = d if self.n_components is None else int(self.n_components)
        if not (1 <= z <= d):
            raise ValueError(f"n_components must be in [1, {d}], got {z}")
        self.center_ = X.mean(axis=0)
        if z == d and n == 1:
            self.components_ = np.eye(d)
        else:
            _, _, vt = np.linalg.svd(X - self.center_, full_matrices=z == d)
            if vt.shape[0] < z:
                vt = np.vstack([vt, np.eye(d)[vt.shape[0] :]])
            self.components_ = vt[:z]
        return self

    @classmethod
    def identity(cls, dim: int) -> "AffineEmbedding":
        emb = cls(n_components=dim)
        emb.center_ = np.zeros(dim)
        emb.components_ = np.eye(dim)
        return emb

    @property
    def dim_out(self) -> int:
        self._check_fitted()
        return self.components_.shape[0]

    def _check_fitted(self) -> None:
        if not hasattr(self, "components_"):
            raise NotFittedError("AffineEmbedding must be fitted before use")

    def transform(self, X) -> np.ndarray:
        self._check_fitted()
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        out = (X[None, :] if single else X) @ self.components_.T - self.center_ @ self.components_.T
        return out[0] if single else out

    def inverse_transform(self, Z) -> np.ndarray:
        self._check_fitted()
        Z = np.asarray(Z, dtype=np.float64)
        single = Z.ndim == 1
        out = (Z[None, :] if single else Z) @ self.components_ + self.center_
        return out[0] if single else out

    def transform_classifier_direction(self, theta: np.ndarray) -> np.ndarray:
        """Pull a linear decision direction into embedding coordinates so that
        (pulled theta) . z == theta . (inverse_transform(z) - center shift)."""
        self._check_fitted()
        return self.components_ @ np.asarray(theta, dtype=np.float64)
