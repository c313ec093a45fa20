"""Per-stock PCA reduction of the normalized indicator matrix.

Fits an eigendecomposition of the population column covariance, keeps the
smallest component count reaching 95% explained variance, and harmonizes
that count across stocks so every feature tensor is rectangular.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, NumericalError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PcaModel:
    """Fitted basis: rows of ``components`` are unit eigenvectors."""

    mean: np.ndarray  # (p,)
    components: np.ndarray  # (p, p), descending eigenvalue order
    eigenvalues: np.ndarray  # (p,), non-negative, non-increasing
    k95: int

    @property
    def n_features(self) -> int:
        return self.mean.shape[0]

    def explained_ratio(self, k: int) -> float:
        total = float(np.sum(self.eigenvalues))
        if total <= 0.0:
            return 1.0
        return float(np.sum(self.eigenvalues[:k]) / total)


def fit(table: np.ndarray, variance_target: float = 0.95) -> PcaModel:
    """Eigendecomposition of the population covariance of ``table`` columns.

    Deterministic sign convention: each component's largest-magnitude entry
    is made positive (first such entry on ties).
    """
    x = np.asarray(table, dtype=np.float64)
    if x.ndim != 2:
        raise DataError(f"pca.fit expects a 2-d matrix, got shape {x.shape}")
    rows, cols = x.shape
    if rows < cols:
        raise DataError(f"pca.fit needs rows >= cols, got {rows} x {cols}")
    if not np.isfinite(x).all():
        raise NumericalError("pca.fit: non-finite entries in input")
    if not 0.0 < variance_target <= 1.0:
        raise DataError(f"variance_target must be in (0, 1], got {variance_target}")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / rows
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    components = eigvecs[:, order].T
    for i in range(components.shape[0]):
        j = int(np.argmax(np.abs(components[i])))
        if components[i, j] < 0:
            components[i] = -components[i]
    total = float(np.sum(eigvals))
    if total <= 0.0:
        warnings.warn("pca.fit: zero total variance, k95 defaults to 1", RuntimeWarning)
        k95 = 1
    else:
        ratios = np.cumsum(eigvals) / total
        k95 = int(np.argmax(ratios >= variance_target)) + 1
    return PcaModel(mean=mean, components=components, eigenvalues=eigvals, k95=k95)


def harmonize(models: Sequence[PcaModel], mode: str = "max") -> int:
    """Common component count across stocks.

    ``max`` (default) keeps every stock at or above the variance target;
    ``min`` trades coverage for dimensionality.
    """
    if not models:
        raise DataError("harmonize: empty model list")
    counts = [m.k95 for m in models]
    if mode == "max":
        return max(counts)
    if mode == "min":
        return min(counts)
    raise DataError(f"unknown harmonize mode {mode!r}")


def transform(model: PcaModel, table: np.ndarray, n: int) -> np.ndarray:
    """Project onto the leading ``n`` components: (table - mean) @ Cᵀ."""
    if n < 1 or n > model.components.shape[0]:
        raise DataError(
            f"transform: n={n} outside available components 1..{model.components.shape[0]}"
        )
    x = np.asarray(table, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.n_features:
        raise DataError(f"transform: shape {x.shape} incompatible with model p={model.n_features}")
    return (x - model.mean) @ model.components[:n].T
