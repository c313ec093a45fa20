"""Feature preparation shared by the trading strategies.

Turns an aligned OHLCV panel into indicator tensors on the post-warmup
horizon and builds the processed feature tensors (z-score -> PCA -> wavelet
denoise) in either of two look-ahead policies:

``paper``  fits z-score and PCA once on the full series and denoises full
           score series; statistically biased (test data leaks into the
           fits) but reproduces the reference pipeline literally.
``causal`` refits z-score and PCA on each training window, transforms the
           test window with the train-fitted models, and denoises training
           scores only, so no test-period information enters any fit.

Horizon indexing: row i of any horizon-aligned array refers to global
period warmup + i; the return paired with that row is the market return
over (warmup+i-1, warmup+i], i.e. the return the weights held coming into
the period actually earn in the trader's profit equation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import dwt, pca
from .data import OhlcvPanel, simple_returns
from .errors import DataError
from .indicators import IndicatorParams, compute_indicators, zscore

logger = logging.getLogger(__name__)

PREPROCESS_MODES = ("paper", "causal")


@dataclass(frozen=True)
class PreprocessParams:
    mode: str = "paper"
    pca_ratio: float = 0.95
    dwt_level: int = 4
    threshold_factor: float = 2.0
    harmonize_mode: str = "max"

    def __post_init__(self) -> None:
        if self.mode not in PREPROCESS_MODES:
            raise DataError(f"mode must be 'paper' or 'causal', got {self.mode!r}")
        if not 0.0 < self.pca_ratio <= 1.0:
            raise DataError(f"pca_ratio must be in (0, 1], got {self.pca_ratio}")
        if self.dwt_level < 1:
            raise DataError(f"dwt_level must be >= 1, got {self.dwt_level}")
        if self.threshold_factor < 0:
            raise DataError(f"threshold_factor must be >= 0, got {self.threshold_factor}")
        if self.harmonize_mode not in ("max", "min"):
            raise DataError(f"harmonize_mode must be 'max' or 'min'")


@dataclass(frozen=True)
class PreparedData:
    """Panel-derived tensors aligned on the post-warmup horizon."""

    panel: OhlcvPanel
    closes: np.ndarray  # (L, m)
    returns: np.ndarray  # (L-1, m), row g-1 is the return over (g-1, g]
    indicators: np.ndarray  # (H, m, 11), raw (pre z-score)
    warmup: int
    horizon: int  # H = L - warmup
    aligned_returns: np.ndarray  # (H, m), row i = returns[warmup+i-1]

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.panel.symbols

    @property
    def n_assets(self) -> int:
        return self.panel.n_assets


def prepare(panel: OhlcvPanel, params: IndicatorParams | None = None) -> PreparedData:
    """Compute indicator tensors and returns for one panel."""
    tables = [compute_indicators(s, params) for s in panel.series]
    warmup = max(t.warmup_len for t in tables)
    length = panel.length
    horizon = length - warmup
    if horizon < 2:
        raise DataError(f"panel too short: {length} rows leave horizon {horizon}")
    stacks = []
    for t in tables:
        # Same params give every stock the same warmup, but re-trim defensively.
        offset = warmup - t.warmup_len
        stacks.append(t.values[offset:])
    indicators = np.stack(stacks, axis=1)
    rets = simple_returns(panel).values
    return PreparedData(
        panel=panel,
        closes=panel.closes(),
        returns=rets,
        indicators=indicators,
        warmup=warmup,
        horizon=horizon,
        aligned_returns=rets[warmup - 1 :],
    )


def _zfit(column: np.ndarray) -> tuple[float, float]:
    """(mean, population std); constant columns report sigma 0."""
    if np.all(column == column[0]):
        return float(column[0]), 0.0
    mu = float(np.mean(column))
    return mu, float(np.sqrt(np.mean((column - mu) ** 2)))


def _zapply(column: np.ndarray, mu: float, sigma: float) -> np.ndarray:
    if sigma == 0.0:
        return np.zeros_like(column)
    return (column - mu) / sigma


def _zscore_block(block: np.ndarray) -> np.ndarray:
    """Column-wise full-length z-score of one stock's (H, p) block."""
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return np.column_stack([zscore(block[:, j]) for j in range(block.shape[1])])


def pca_dwt_features(
    prepared: PreparedData, params: PreprocessParams
) -> tuple[np.ndarray, list[pca.PcaModel], int]:
    """Full-series processed features: (H, m, n) tensor, models, and n."""
    h, m, _ = prepared.indicators.shape
    zblocks = [_zscore_block(prepared.indicators[:, a, :]) for a in range(m)]
    models = [pca.fit(z, params.pca_ratio) for z in zblocks]
    n = pca.harmonize(models, params.harmonize_mode)
    feats = np.empty((h, m, n))
    for a in range(m):
        scores = pca.transform(models[a], zblocks[a], n)
        for j in range(n):
            feats[:, a, j] = dwt.denoise(
                scores[:, j], params.dwt_level, params.threshold_factor
            )
    return feats, models, n


def ta_features(prepared: PreparedData) -> np.ndarray:
    """Full-series z-scored indicator tensor (H, m, 11), no PCA/DWT."""
    h, m, p = prepared.indicators.shape
    feats = np.empty((h, m, p))
    for a in range(m):
        feats[:, a, :] = _zscore_block(prepared.indicators[:, a, :])
    return feats


def lag_rrl_features(prepared: PreparedData, lag: int) -> np.ndarray:
    """Lagged-return tensor (H, m, lag): column j holds r_{t-1-j}."""
    if lag < 1:
        raise DataError(f"lag must be >= 1, got {lag}")
    if lag > prepared.warmup - 1:
        raise DataError(f"lag {lag} exceeds available history (warmup {prepared.warmup})")
    h = prepared.horizon
    w = prepared.warmup
    m = prepared.n_assets
    feats = np.empty((h, m, lag))
    for j in range(lag):
        # horizon row i is global period w+i; returns row g-1 holds r_g.
        start = w - 2 - j
        feats[:, :, j] = prepared.returns[start : start + h]
    return feats


class PrecomputedFeatures:
    """Window view over a full-series feature tensor (paper mode)."""

    def __init__(self, feats: np.ndarray):
        self.feats = feats
        self.n = feats.shape[2]

    def window(
        self, train: tuple[int, int], test: tuple[int, int]
    ) -> tuple[np.ndarray, np.ndarray]:
        return self.feats[train[0] : train[1]], self.feats[test[0] : test[1]]


class CausalTaFeatures:
    """Per-window z-score refit of the raw indicator tensor."""

    def __init__(self, prepared: PreparedData):
        self.prepared = prepared
        self.n = prepared.indicators.shape[2]

    def window(
        self, train: tuple[int, int], test: tuple[int, int]
    ) -> tuple[np.ndarray, np.ndarray]:
        ind = self.prepared.indicators
        tr = ind[train[0] : train[1]]
        te = ind[test[0] : test[1]]
        m, p = tr.shape[1], tr.shape[2]
        tr_out = np.empty_like(tr)
        te_out = np.empty_like(te)
        for a in range(m):
            for j in range(p):
                mu, sigma = _zfit(tr[:, a, j])
                tr_out[:, a, j] = _zapply(tr[:, a, j], mu, sigma)
                te_out[:, a, j] = _zapply(te[:, a, j], mu, sigma)
        return tr_out, te_out


class CausalPcaDwtFeatures:
    """Per-window z-score + PCA refit; training scores denoised, test scores
    transformed with train-fitted models and left unsmoothed (no future data
    exists to pad a wavelet analysis of the test window at train time)."""

    def __init__(self, prepared: PreparedData, params: PreprocessParams):
        self.prepared = prepared
        self.params = params
        self.n: int | None = None  # varies per window; set by each call

    def window(
        self, train: tuple[int, int], test: tuple[int, int]
    ) -> tuple[np.ndarray, np.ndarray]:
        ind = self.prepared.indicators
        tr = ind[train[0] : train[1]]
        te = ind[test[0] : test[1]]
        m, p = tr.shape[1], tr.shape[2]
        z_tr = np.empty_like(tr)
        z_te = np.empty_like(te)
        for a in range(m):
            for j in range(p):
                mu, sigma = _zfit(tr[:, a, j])
                z_tr[:, a, j] = _zapply(tr[:, a, j], mu, sigma)
                z_te[:, a, j] = _zapply(te[:, a, j], mu, sigma)
        models = [pca.fit(z_tr[:, a, :], self.params.pca_ratio) for a in range(m)]
        n = pca.harmonize(models, self.params.harmonize_mode)
        self.n = n
        tr_out = np.empty((tr.shape[0], m, n))
        te_out = np.empty((te.shape[0], m, n))
        for a in range(m):
            scores_tr = pca.transform(models[a], z_tr[:, a, :], n)
            scores_te = pca.transform(models[a], z_te[:, a, :], n)
            for j in range(n):
                tr_out[:, a, j] = dwt.denoise(
                    scores_tr[:, j], self.params.dwt_level, self.params.threshold_factor
                )
            te_out[:, a, :] = scores_te
        return tr_out, te_out
