"""Comparison strategies behind the common walk-forward interface.

UCRP rebalances to uniform weights every period. OLMAR follows moving-
average reversion with a margin threshold and simplex projection. MV picks
the best in-sample Sharpe among Monte-Carlo simplex samples each window.
The three RRL variants share the recurrent trader and differ only in their
feature tensors: lagged raw returns, the 11 z-scored indicators, or the
PCA-reduced wavelet-denoised indicator features.

Tuned parameters (OLMAR's threshold/look-back, LAG RRL's lag) are selected
on the first training window only and deliberately without transaction
costs, so tuned weights are identical across cost-rate sweeps.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .backtest import StrategyContext, Window
from .errors import ConfigError, DataError
from .pipeline import lag_rrl_features, ta_features
from .rrl import evaluate, train

logger = logging.getLogger(__name__)

STRATEGY_KINDS = ("UCRP", "OLMAR", "MV", "LAG_RRL", "TA_RRL", "PCA_DWT_RRL")

DEFAULT_EPS_GRID = (1.01, 1.05, 1.1, 2.0, 5.0, 10.0)
DEFAULT_W_GRID = (3, 5, 10, 20, 30)
DEFAULT_LAG_GRID = tuple(range(1, 11))
DEFAULT_MV_SAMPLES = 50_000

# re-exported feature builders used by the RRL variants
ta_rrl_features = ta_features


def ucrp_weights(m: int) -> np.ndarray:
    """Uniform weight vector, every period."""
    if m < 1:
        raise DataError(f"need at least one asset, got {m}")
    return np.full(m, 1.0 / m)


def simplex_project(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sorted threshold)."""
    x = np.asarray(v, dtype=np.float64)
    if not np.isfinite(x).all():
        raise DataError("simplex_project: non-finite input")
    u = np.sort(x)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, x.size + 1)
    cond = u + (1.0 - css) / ks > 0
    rho = int(np.nonzero(cond)[0][-1]) + 1
    tau = (1.0 - css[rho - 1]) / rho
    return np.maximum(x + tau, 0.0)


def olmar_step(b: np.ndarray, price_window: np.ndarray, epsilon: float) -> np.ndarray:
    """One moving-average-reversion update.

    price_window holds the last w closes per stock (rows oldest..latest).
    Predicted relatives are MA/latest price; when every stock predicts the
    same relative the direction is undefined and b is returned unchanged.
    """
    w = np.asarray(price_window, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] < 2:
        raise DataError(f"olmar_step needs a (w>=2, m) price window, got {w.shape}")
    if np.any(w <= 0):
        raise DataError("olmar_step: non-positive prices")
    x_pred = np.mean(w, axis=0) / w[-1]
    centered = x_pred - np.mean(x_pred)
    norm2 = float(np.dot(centered, centered))
    if norm2 == 0.0:
        return np.array(b, dtype=np.float64)
    lam = max(0.0, (epsilon - float(np.dot(b, x_pred))) / norm2)
    return simplex_project(b + lam * centered)


def mv_monte_carlo(
    return_window: np.ndarray, n_samples: int, seed
) -> np.ndarray:
    """Highest in-window Sharpe among uniform simplex samples.

    Sampling is exponential-normalization (symmetric Dirichlet(1)); the
    in-window Sharpe is mean/std in population moment form. Zero-variance
    candidates are skipped; ties resolve to the lowest sample index. If no
    candidate has usable variance the uniform portfolio is returned with a
    warning.
    """
    rets = np.asarray(return_window, dtype=np.float64)
    if rets.ndim != 2 or rets.shape[0] < 2:
        raise DataError(f"mv_monte_carlo needs (T>=2, m) returns, got {rets.shape}")
    if n_samples < 1:
        raise DataError(f"n_samples must be >= 1, got {n_samples}")
    m = rets.shape[1]
    if m == 1:
        return np.ones(1)
    rng = np.random.default_rng(seed)
    e = rng.standard_exponential((n_samples, m))
    samples = e / np.sum(e, axis=1, keepdims=True)
    best_score = -np.inf
    best_idx = -1
    chunk = 8192
    for lo in range(0, n_samples, chunk):
        block = samples[lo : lo + chunk]
        port = block @ rets.T  # (chunk, T)
        a = np.mean(port, axis=1)
        b2 = np.mean(port * port, axis=1)
        var = b2 - a * a
        with np.errstate(invalid="ignore", divide="ignore"):
            scores = np.where(var >= 1e-18, a / np.sqrt(var), -np.inf)
        j = int(np.argmax(scores))
        if scores[j] > best_score:
            best_score = float(scores[j])
            best_idx = lo + j
    if best_idx < 0 or not np.isfinite(best_score):
        warnings.warn("mv_monte_carlo: no candidate with usable variance", RuntimeWarning)
        return np.full(m, 1.0 / m)
    return samples[best_idx]


@dataclass(frozen=True)
class StrategySpec:
    """Config-level strategy selection with kind-specific parameters."""

    kind: str
    params: dict = field(default_factory=dict)

    _ALLOWED = {
        "UCRP": set(),
        "OLMAR": {"epsilon", "lookback", "eps_grid", "w_grid"},
        "MV": {"n_samples"},
        "LAG_RRL": {"lag", "lag_grid"},
        "TA_RRL": set(),
        "PCA_DWT_RRL": set(),
    }

    def __post_init__(self) -> None:
        if self.kind not in STRATEGY_KINDS:
            raise ConfigError(f"unknown strategy kind {self.kind!r}")
        extra = set(self.params) - self._ALLOWED[self.kind]
        if extra:
            raise ConfigError(f"{self.kind}: unsupported params {sorted(extra)}")


class UcrpStrategy:
    name = "UCRP"

    def reset(self) -> None:
        pass

    def prepare(self, ctx: StrategyContext) -> None:
        pass

    def window_weights(self, ctx: StrategyContext, window: Window):
        m = ctx.prepared.n_assets
        return np.tile(ucrp_weights(m), (window.test_len, 1)), {}


class OlmarStrategy:
    """OLMAR-1: the first emitted row is uniform, then one reversion step
    per period using the trailing close window ending at that period."""

    name = "OLMAR"

    def __init__(
        self,
        epsilon: float | None = None,
        lookback: int | None = None,
        eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
        w_grid: Sequence[int] = DEFAULT_W_GRID,
    ):
        if epsilon is not None and epsilon < 1.0:
            raise ConfigError(f"OLMAR epsilon must be >= 1, got {epsilon}")
        if lookback is not None and lookback < 2:
            raise ConfigError(f"OLMAR lookback must be >= 2, got {lookback}")
        self.epsilon = epsilon
        self.lookback = lookback
        self.eps_grid = tuple(eps_grid)
        self.w_grid = tuple(w_grid)
        self._tuned = epsilon is not None and lookback is not None
        self._b: np.ndarray | None = None

    def reset(self) -> None:
        self._b = None

    def _simulate_wealth(
        self, ctx: StrategyContext, epsilon: float, lookback: int
    ) -> float:
        """Gross wealth of the OLMAR path over the first training window."""
        t_len = ctx.plan.train_len
        w = ctx.prepared.warmup
        closes = ctx.prepared.closes
        rets = ctx.prepared.aligned_returns
        m = ctx.prepared.n_assets
        b = np.full(m, 1.0 / m)
        wealth = 1.0
        for i in range(t_len):
            if i > 0:
                g = w + i
                b = olmar_step(b, closes[g - lookback + 1 : g + 1], epsilon)
            if i < t_len - 1:
                wealth *= 1.0 + float(np.dot(b, rets[i + 1]))
        return wealth

    def prepare(self, ctx: StrategyContext) -> None:
        if self._tuned:
            return
        if max(self.w_grid) > ctx.prepared.warmup:
            raise DataError("OLMAR lookback grid exceeds available price history")
        best = (-np.inf, None, None)
        for eps in self.eps_grid:
            for lb in self.w_grid:
                wealth = self._simulate_wealth(ctx, eps, lb)
                if wealth > best[0]:
                    best = (wealth, eps, lb)
        self.epsilon, self.lookback = best[1], best[2]
        self._tuned = True
        logger.info("OLMAR tuned: epsilon=%s lookback=%s", self.epsilon, self.lookback)

    def window_weights(self, ctx: StrategyContext, window: Window):
        assert self.epsilon is not None and self.lookback is not None
        m = ctx.prepared.n_assets
        w = ctx.prepared.warmup
        closes = ctx.prepared.closes
        rows = np.empty((window.test_len, m))
        for k, i in enumerate(range(window.test_start, window.test_end)):
            if self._b is None:
                self._b = np.full(m, 1.0 / m)
            else:
                g = w + i
                self._b = olmar_step(
                    self._b, closes[g - self.lookback + 1 : g + 1], self.epsilon
                )
            rows[k] = self._b
        return rows, {"epsilon": self.epsilon, "lookback": self.lookback}


class MvStrategy:
    """Monte-Carlo mean-variance: re-sampled each window from the preceding
    train window's returns, held constant through the test window."""

    name = "MV"

    def __init__(self, n_samples: int = DEFAULT_MV_SAMPLES):
        if n_samples < 1:
            raise ConfigError(f"MV n_samples must be >= 1, got {n_samples}")
        self.n_samples = n_samples

    def reset(self) -> None:
        pass

    def prepare(self, ctx: StrategyContext) -> None:
        pass

    def window_weights(self, ctx: StrategyContext, window: Window):
        rets = ctx.prepared.aligned_returns[window.train_start : window.train_end]
        w = mv_monte_carlo(rets, self.n_samples, seed=(ctx.trainer.seed, window.index))
        return np.tile(w, (window.test_len, 1)), {}


class _RrlStrategyBase:
    """Shared train/evaluate plumbing for the three RRL variants."""

    name = "RRL"

    def __init__(self) -> None:
        self._theta: np.ndarray | None = None

    def reset(self) -> None:
        self._theta = None

    def prepare(self, ctx: StrategyContext) -> None:
        pass

    def _source(self, ctx: StrategyContext):
        raise NotImplementedError

    def window_weights(self, ctx: StrategyContext, window: Window):
        feats_train, feats_test = self._source(ctx).window(window.train, window.test)
        rets_train = ctx.prepared.aligned_returns[window.train_start : window.train_end]
        rets_test = ctx.prepared.aligned_returns[window.test_start : window.test_end]
        cfg = replace(
            ctx.trainer,
            window=window.train_len,
            seed=ctx.trainer.seed + window.index,
        )
        m = ctx.prepared.n_assets
        width = feats_train.shape[2] + 2
        theta0 = None
        if ctx.warm_start and self._theta is not None and self._theta.shape == (m, width):
            theta0 = self._theta
        result = train(feats_train, rets_train, cfg, theta0=theta0)
        self._theta = result.theta
        f_init = result.final_weights if ctx.carry_weights else np.zeros(m)
        traj = evaluate(result.theta, feats_test, rets_test, f_init, ctx.trainer.cost_rate)
        meta = {
            "epochs": result.epochs_run,
            "train_sharpe": result.sharpe_log[-1],
            "sharpe_log": [float(v) for v in result.sharpe_log],
            "degenerate": result.degenerate,
            "n_features": int(feats_train.shape[2]),
        }
        return traj.weights[1:], meta


class PcaDwtRrlStrategy(_RrlStrategyBase):
    name = "PCA_DWT_RRL"

    def _source(self, ctx: StrategyContext):
        return ctx.pca_dwt_source()


class TaRrlStrategy(_RrlStrategyBase):
    name = "TA_RRL"

    def _source(self, ctx: StrategyContext):
        return ctx.ta_source()


class LagRrlStrategy(_RrlStrategyBase):
    """RRL on lagged raw returns; the lag is tuned by final training Sharpe
    on the first window over a small grid unless fixed in config."""

    name = "LAG_RRL"

    def __init__(self, lag: int | None = None, lag_grid: Sequence[int] = DEFAULT_LAG_GRID):
        super().__init__()
        if lag is not None and lag < 1:
            raise ConfigError(f"LAG_RRL lag must be >= 1, got {lag}")
        self.lag = lag
        self.lag_grid = tuple(lag_grid)
        self._features: np.ndarray | None = None

    def reset(self) -> None:
        super().reset()

    def prepare(self, ctx: StrategyContext) -> None:
        if self.lag is None:
            first = ctx.plan.windows[0]
            cfg = replace(ctx.trainer, window=first.train_len, seed=ctx.trainer.seed)
            rets_train = ctx.prepared.aligned_returns[first.train_start : first.train_end]
            best = (-np.inf, None)
            for lag in self.lag_grid:
                feats = lag_rrl_features(ctx.prepared, lag)
                res = train(feats[first.train_start : first.train_end], rets_train, cfg)
                score = -np.inf if res.degenerate else res.sharpe_log[-1]
                if np.isfinite(score) and score > best[0]:
                    best = (score, lag)
            self.lag = best[1] if best[1] is not None else min(self.lag_grid)
            logger.info("LAG_RRL tuned: lag=%d", self.lag)
        if self._features is None or self._features.shape[2] != self.lag:
            self._features = lag_rrl_features(ctx.prepared, self.lag)

    def _source(self, ctx: StrategyContext):
        from .pipeline import PrecomputedFeatures

        assert self._features is not None
        return PrecomputedFeatures(self._features)


def make_strategy(spec: StrategySpec):
    """Instantiate a strategy from its config spec."""
    p = spec.params
    if spec.kind == "UCRP":
        return UcrpStrategy()
    if spec.kind == "OLMAR":
        return OlmarStrategy(
            epsilon=p.get("epsilon"),
            lookback=p.get("lookback"),
            eps_grid=tuple(p.get("eps_grid", DEFAULT_EPS_GRID)),
            w_grid=tuple(p.get("w_grid", DEFAULT_W_GRID)),
        )
    if spec.kind == "MV":
        return MvStrategy(n_samples=int(p.get("n_samples", DEFAULT_MV_SAMPLES)))
    if spec.kind == "LAG_RRL":
        return LagRrlStrategy(
            lag=p.get("lag"),
            lag_grid=tuple(p.get("lag_grid", DEFAULT_LAG_GRID)),
        )
    if spec.kind == "TA_RRL":
        return TaRrlStrategy()
    if spec.kind == "PCA_DWT_RRL":
        return PcaDwtRrlStrategy()
    raise ConfigError(f"unknown strategy kind {spec.kind!r}")
