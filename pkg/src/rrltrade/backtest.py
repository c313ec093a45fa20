"""Walk-forward orchestration, wealth accounting, and performance metrics.

The horizon (post-warmup periods) is tiled into train/test windows: train
length T immediately followed by test length M, advancing by M, final test
window truncated rather than dropped. Strategies emit one simplex weight
row per test period; the engine recomputes profits globally with deployed
continuity (the weight held coming into the first test period is the zero
vector, so the first period is charged a full rebalance cost; across window
boundaries the previously deployed row is the cost anchor). A trainable
strategy's internal evaluation may use its own carry-over initial weight
for the recurrent input; the engine's accounting is authoritative for
metrics.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .errors import DataError, NumericalError
from .pipeline import (
    CausalPcaDwtFeatures,
    CausalTaFeatures,
    PrecomputedFeatures,
    PreparedData,
    PreprocessParams,
    pca_dwt_features,
    ta_features,
)
from .rrl import TrainConfig

logger = logging.getLogger(__name__)

SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class Window:
    """One train/test pair in horizon coordinates (end-exclusive)."""

    index: int
    train_start: int
    train_end: int
    test_start: int
    test_end: int

    @property
    def train_len(self) -> int:
        return self.train_end - self.train_start

    @property
    def test_len(self) -> int:
        return self.test_end - self.test_start

    @property
    def train(self) -> tuple[int, int]:
        return (self.train_start, self.train_end)

    @property
    def test(self) -> tuple[int, int]:
        return (self.test_start, self.test_end)


@dataclass(frozen=True)
class RollingPlan:
    train_len: int
    test_len: int
    horizon: int
    windows: tuple[Window, ...]

    @property
    def first_test(self) -> int:
        return self.windows[0].test_start

    @property
    def total_test_len(self) -> int:
        return self.windows[-1].test_end - self.windows[0].test_start


def make_plan(horizon_len: int, train_len: int = 100, test_len: int = 100) -> RollingPlan:
    """Tile the horizon with train/test windows advancing by ``test_len``."""
    if train_len < 2:
        raise DataError(f"train_len must be >= 2, got {train_len}")
    if test_len < 1:
        raise DataError(f"test_len must be >= 1, got {test_len}")
    if horizon_len <= train_len:
        raise DataError(
            f"horizon {horizon_len} too short for one full train window of {train_len}"
        )
    windows = []
    start = train_len
    idx = 0
    while start < horizon_len:
        end = min(start + test_len, horizon_len)
        windows.append(
            Window(
                index=idx,
                train_start=start - train_len,
                train_end=start,
                test_start=start,
                test_end=end,
            )
        )
        idx += 1
        start = end
    return RollingPlan(
        train_len=train_len, test_len=test_len, horizon=horizon_len, windows=tuple(windows)
    )


class Strategy(Protocol):
    """Common strategy interface consumed by the engine."""

    name: str

    def reset(self) -> None:
        """Clear per-run state (kept tuning results survive)."""

    def prepare(self, ctx: "StrategyContext") -> None:
        """One-time tuning using the first training window; idempotent."""

    def window_weights(
        self, ctx: "StrategyContext", window: Window
    ) -> tuple[np.ndarray, dict]:
        """(test_len, m) weight rows for the window plus metadata."""


class StrategyContext:
    """Shared per-run inputs: prepared data, feature sources, configs.

    Feature tensors are cached lazily and are independent of the cost rate,
    so cost-sweep replicas share them via :meth:`with_cost`.
    """

    def __init__(
        self,
        prepared: PreparedData,
        pre: PreprocessParams,
        trainer: TrainConfig,
        plan: RollingPlan,
        carry_weights: bool = True,
        warm_start: bool = False,
    ):
        self.prepared = prepared
        self.pre = pre
        self.trainer = trainer
        self.plan = plan
        self.carry_weights = carry_weights
        self.warm_start = warm_start
        self._pca_dwt_source: PrecomputedFeatures | CausalPcaDwtFeatures | None = None
        self._ta_source: PrecomputedFeatures | CausalTaFeatures | None = None
        self._pca_models: list | None = None
        self._pca_n: int | None = None

    def with_cost(self, cost_rate: float) -> "StrategyContext":
        from dataclasses import replace

        clone = StrategyContext(
            self.prepared,
            self.pre,
            replace(self.trainer, cost_rate=cost_rate),
            self.plan,
            self.carry_weights,
            self.warm_start,
        )
        clone._pca_dwt_source = self._pca_dwt_source
        clone._ta_source = self._ta_source
        clone._pca_models = self._pca_models
        clone._pca_n = self._pca_n
        return clone

    def pca_dwt_source(self):
        if self._pca_dwt_source is None:
            if self.pre.mode == "paper":
                feats, models, n = pca_dwt_features(self.prepared, self.pre)
                self._pca_dwt_source = PrecomputedFeatures(feats)
                self._pca_models = models
                self._pca_n = n
            else:
                self._pca_dwt_source = CausalPcaDwtFeatures(self.prepared, self.pre)
        return self._pca_dwt_source

    def ta_source(self):
        if self._ta_source is None:
            if self.pre.mode == "paper":
                self._ta_source = PrecomputedFeatures(ta_features(self.prepared))
            else:
                self._ta_source = CausalTaFeatures(self.prepared)
        return self._ta_source

    def pca_summary(self) -> tuple[list, int | None]:
        """(models, n) when the paper-mode PCA source has been built."""
        self.pca_dwt_source()
        return self._pca_models or [], self._pca_n


@dataclass
class BacktestResult:
    strategy: str
    symbols: tuple[str, ...]
    cost_rate: float
    first_test: int  # horizon index of the first traded period
    weights: np.ndarray  # (P, m)
    profits: np.ndarray  # (P,)
    wealth: np.ndarray  # (P,), W_0 = 1 convention, W_t = prod of factors
    window_meta: list[dict]
    plan: RollingPlan

    @property
    def periods(self) -> int:
        return self.profits.shape[0]


def check_simplex(row: np.ndarray, context: str = "") -> None:
    if np.min(row) < 0.0 or abs(float(np.sum(row)) - 1.0) >= SIMPLEX_TOL:
        raise NumericalError(
            f"off-simplex weight row {row} (min {np.min(row)}, sum {np.sum(row)}) {context}"
        )


def run(ctx: StrategyContext, strategy: Strategy) -> BacktestResult:
    """Full walk-forward pass of one strategy with global accounting."""
    strategy.reset()
    strategy.prepare(ctx)
    m = ctx.prepared.n_assets
    rows: list[np.ndarray] = []
    metas: list[dict] = []
    for win in ctx.plan.windows:
        w, meta = strategy.window_weights(ctx, win)
        w = np.asarray(w, dtype=np.float64)
        if w.shape != (win.test_len, m):
            raise DataError(
                f"{strategy.name}: window {win.index} weights shape {w.shape}, "
                f"expected ({win.test_len}, {m})"
            )
        for i in range(w.shape[0]):
            check_simplex(w[i], f"[{strategy.name}, window {win.index}, row {i}]")
        rows.append(w)
        metas.append({"window": win.index, **meta})
    weights = np.vstack(rows)
    p = weights.shape[0]
    first = ctx.plan.first_test
    rets = ctx.prepared.aligned_returns[first : first + p]
    delta = ctx.trainer.cost_rate
    factors = np.empty(p)
    f_prev = np.zeros(m)
    for i in range(p):
        gross = 1.0 + float(np.dot(f_prev, rets[i]))
        turnover = float(np.sum(np.abs(weights[i] - f_prev)))
        factors[i] = gross * (1.0 - delta * turnover)
        f_prev = weights[i]
    wealth = np.cumprod(factors)
    if not np.isfinite(wealth).all() or np.any(wealth <= 0):
        raise NumericalError(f"{strategy.name}: non-positive or non-finite wealth curve")
    return BacktestResult(
        strategy=strategy.name,
        symbols=ctx.prepared.symbols,
        cost_rate=delta,
        first_test=first,
        weights=weights,
        profits=factors - 1.0,
        wealth=wealth,
        window_meta=metas,
        plan=ctx.plan,
    )


def max_drawdown(curve: np.ndarray) -> float:
    """Largest peak-to-trough loss fraction over a wealth curve."""
    c = np.asarray(curve, dtype=np.float64)
    if c.size == 0:
        raise DataError("max_drawdown: empty curve")
    peaks = np.maximum.accumulate(c)
    return float(np.max((peaks - c) / peaks))


@dataclass(frozen=True)
class MetricsReport:
    net_profit: float
    apy: float
    asr: float
    mdd: float
    calmar: float
    asr_degenerate: bool
    periods: int

    def as_dict(self) -> dict:
        return {
            "NP": self.net_profit,
            "APY": self.apy,
            "ASR": self.asr,
            "ASR_degenerate": self.asr_degenerate,
            "MDD": self.mdd,
            "CR": self.calmar,
        }


def compute_metrics(
    result: BacktestResult,
    rf_annual: float = 0.04,
    periods_per_year: int = 252,
) -> MetricsReport:
    """Net profit, APY, annualized Sharpe, max drawdown, Calmar ratio.

    APY uses the per-period count directly; ASR uses sample std of profits
    (0 with a flag when the std is 0); CR is +inf when MDD is 0.
    """
    p = result.periods
    if p < 2:
        raise DataError(f"metrics need >= 2 periods, got {p}")
    w_final = float(result.wealth[-1])
    np_ = w_final - 1.0
    apy = w_final ** (periods_per_year / p) - 1.0
    std = float(np.std(result.profits, ddof=1))
    degenerate = std == 0.0
    asr = 0.0 if degenerate else (apy - rf_annual) / (std * math.sqrt(periods_per_year))
    mdd = max_drawdown(np.concatenate(([1.0], result.wealth)))
    calmar = math.inf if mdd == 0.0 else apy / mdd
    return MetricsReport(
        net_profit=np_,
        apy=apy,
        asr=asr,
        mdd=mdd,
        calmar=calmar,
        asr_degenerate=degenerate,
        periods=p,
    )


def cost_sweep(
    ctx: StrategyContext,
    strategies: Sequence[Strategy],
    deltas: Sequence[float] = (0.0, 0.001, 0.005),
) -> dict[float, dict[str, BacktestResult]]:
    """Re-run every strategy at each cost rate; feature caches are shared."""
    out: dict[float, dict[str, BacktestResult]] = {}
    for delta in deltas:
        if delta < 0:
            raise DataError(f"cost rate must be >= 0, got {delta}")
        ctx_d = ctx.with_cost(delta)
        per: dict[str, BacktestResult] = {}
        for s in strategies:
            per[s.name] = run(ctx_d, s)
        out[float(delta)] = per
    return out
