"""Walk-forward portfolio trading research engine.

Pipeline: OHLCV panel -> 11 technical indicators -> z-score -> per-stock PCA
-> Haar wavelet denoising -> recurrent trader trained by Sharpe-ratio
gradient ascent, benchmarked against classic allocation strategies over
rolling train/test windows.
"""

from .backtest import (
    BacktestResult,
    MetricsReport,
    RollingPlan,
    StrategyContext,
    Window,
    compute_metrics,
    cost_sweep,
    make_plan,
    max_drawdown,
    run,
)
from .benchmarks import (
    STRATEGY_KINDS,
    StrategySpec,
    make_strategy,
    mv_monte_carlo,
    olmar_step,
    simplex_project,
    ucrp_weights,
)
from .config import RunConfig, StockEntry, config_to_dict, load_config
from .data import (
    OhlcvPanel,
    OhlcvSeries,
    ReturnsPanel,
    align,
    load_ohlcv,
    simple_returns,
    summary_stats,
)
from .dwt import WaveletDecomposition, denoise, haar_decompose, reconstruct, soft_threshold
from .errors import ConfigError, DataError, NumericalError, RrltradeError
from .indicators import (
    INDICATOR_ORDER,
    IndicatorParams,
    IndicatorTable,
    compute_indicators,
    normalize_table,
    zscore,
)
from .pca import PcaModel, fit as pca_fit, harmonize, transform as pca_transform
from .pipeline import (
    PreparedData,
    PreprocessParams,
    lag_rrl_features,
    pca_dwt_features,
    prepare,
    ta_features,
)
from .rrl import (
    TrainConfig,
    TrainResult,
    Trajectory,
    evaluate,
    sharpe,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "BacktestResult",
    "ConfigError",
    "DataError",
    "INDICATOR_ORDER",
    "IndicatorParams",
    "IndicatorTable",
    "MetricsReport",
    "NumericalError",
    "OhlcvPanel",
    "OhlcvSeries",
    "PcaModel",
    "PreparedData",
    "PreprocessParams",
    "ReturnsPanel",
    "RollingPlan",
    "RrltradeError",
    "RunConfig",
    "STRATEGY_KINDS",
    "StockEntry",
    "StrategyContext",
    "StrategySpec",
    "TrainConfig",
    "TrainResult",
    "Trajectory",
    "WaveletDecomposition",
    "Window",
    "align",
    "compute_indicators",
    "compute_metrics",
    "config_to_dict",
    "cost_sweep",
    "denoise",
    "evaluate",
    "haar_decompose",
    "harmonize",
    "lag_rrl_features",
    "load_config",
    "load_ohlcv",
    "make_plan",
    "make_strategy",
    "max_drawdown",
    "mv_monte_carlo",
    "normalize_table",
    "olmar_step",
    "pca_dwt_features",
    "pca_fit",
    "pca_transform",
    "prepare",
    "reconstruct",
    "run",
    "sharpe",
    "simple_returns",
    "simplex_project",
    "soft_threshold",
    "summary_stats",
    "ta_features",
    "train",
    "ucrp_weights",
    "zscore",
]
