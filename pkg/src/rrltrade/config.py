"""Run configuration: a single TOML tree with every default pre-filled.

A minimal config only lists the data files::

    [[data.stocks]]
    ticker = "AAA"
    path = "data/AAA.csv"

    [[data.stocks]]
    ticker = "BBB"
    path = "data/BBB.csv"

Everything else (portfolio size, preprocessing, trainer hyperparameters,
walk-forward plan, strategy list, cost sweep) falls back to the documented
defaults below. Unknown keys are rejected so typos fail loudly.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib  # type: ignore[no-redef]

from .benchmarks import STRATEGY_KINDS, StrategySpec
from .errors import ConfigError
from .indicators import IndicatorParams
from .pipeline import PREPROCESS_MODES, PreprocessParams
from .rrl import GRADIENT_MODES, TrainConfig

_MISSING = object()

DEFAULT_DELTAS = (0.0, 0.001, 0.005)
DEFAULT_RF_ANNUAL = 0.04
DEFAULT_PERIODS_PER_YEAR = 252


@dataclass(frozen=True)
class StockEntry:
    ticker: str
    path: Path


@dataclass(frozen=True)
class RunConfig:
    """Validated run settings; construct via :func:`load_config` or directly."""

    stocks: tuple[StockEntry, ...]
    k: int
    cardinalities: tuple[int, ...]
    preprocess: PreprocessParams = PreprocessParams()
    indicators: IndicatorParams = IndicatorParams()
    trainer: TrainConfig = TrainConfig()
    test_window: int = 100
    carry_weights: bool = True
    warm_start: bool = False
    alignment: str = "positional"
    use_adjusted_close: bool = False
    strategies: tuple[StrategySpec, ...] = field(default_factory=tuple)
    delta_list: tuple[float, ...] = DEFAULT_DELTAS
    rf_annual: float = DEFAULT_RF_ANNUAL
    periods_per_year: int = DEFAULT_PERIODS_PER_YEAR
    output_dir: Path = Path("out")

    def __post_init__(self) -> None:
        if not self.stocks:
            raise ConfigError("config lists no data files")
        tickers = [s.ticker for s in self.stocks]
        if len(set(tickers)) != len(tickers):
            raise ConfigError(f"duplicate tickers in data.stocks: {tickers}")
        n = len(self.stocks)
        if not 1 <= self.k <= n:
            raise ConfigError(f"k = {self.k} out of range 1..{n} (number of data entries)")
        for c in self.cardinalities:
            if not 1 <= c <= n:
                raise ConfigError(f"cardinality {c} out of range 1..{n}")
        if len(set(self.cardinalities)) != len(self.cardinalities):
            raise ConfigError(f"duplicate cardinalities: {list(self.cardinalities)}")
        if self.test_window < 1:
            raise ConfigError(f"plan.test_window must be >= 1, got {self.test_window}")
        if self.alignment not in ("positional", "intersect"):
            raise ConfigError(f"data.alignment must be 'positional' or 'intersect'")
        if not self.delta_list:
            raise ConfigError("backtest.delta_list must not be empty")
        for d in self.delta_list:
            if not 0.0 <= d < 1.0:
                raise ConfigError(f"delta {d} out of range [0, 1)")
        if self.periods_per_year < 1:
            raise ConfigError("backtest.periods_per_year must be >= 1")
        kinds = [s.kind for s in self.strategies]
        if len(set(kinds)) != len(kinds):
            # artifact rows and columns are keyed by kind, so kinds must be unique
            raise ConfigError(f"duplicate strategy kinds: {kinds}")

    @property
    def tickers(self) -> tuple[str, ...]:
        return tuple(s.ticker for s in self.stocks)


def default_strategies() -> tuple[StrategySpec, ...]:
    return tuple(StrategySpec(kind=k) for k in STRATEGY_KINDS)


class _Section:
    """One TOML table plus its dotted path, with typed getters."""

    def __init__(self, data: Mapping[str, Any], path: str, raw_text: str):
        self.data = dict(data)
        self.path = path
        self.raw = raw_text

    def _key(self, name: str) -> str:
        return f"{self.path}.{name}" if self.path else name

    def _hint(self, name: str) -> str:
        for i, line in enumerate(self.raw.splitlines(), start=1):
            stripped = line.split("#", 1)[0]
            if stripped.strip().startswith(name):
                return f" (line {i})"
        return ""

    def take(self, name: str, kind: type | tuple[type, ...], default: Any = _MISSING) -> Any:
        if name not in self.data:
            if default is _MISSING:
                raise ConfigError(f"missing required key {self._key(name)!r}")
            return default
        value = self.data.pop(name)
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if isinstance(value, bool) and kind in (int, float):
            value = None  # bools are ints in Python; reject them for numeric keys
        if value is None or not isinstance(value, kind):
            raise ConfigError(
                f"{self._key(name)}: expected {getattr(kind, '__name__', kind)}"
                f"{self._hint(name)}"
            )
        return value

    def take_section(self, name: str) -> "_Section":
        value = self.data.pop(name, {})
        if not isinstance(value, dict):
            raise ConfigError(f"{self._key(name)}: expected a table{self._hint(name)}")
        return _Section(value, self._key(name), self.raw)

    def finish(self) -> None:
        if self.data:
            stray = sorted(self.data)
            where = self.path or "top level"
            raise ConfigError(
                f"unknown key(s) {stray} in {where}{self._hint(stray[0])}"
            )


def _float_list(sec: _Section, name: str, default: tuple[float, ...]) -> tuple[float, ...]:
    raw = sec.take(name, list, default=list(default))
    out = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{sec._key(name)}: expected a list of numbers")
        out.append(float(v))
    return tuple(out)


def _int_list(sec: _Section, name: str, default: tuple[int, ...]) -> tuple[int, ...]:
    raw = sec.take(name, list, default=list(default))
    out = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{sec._key(name)}: expected a list of integers")
        out.append(v)
    return tuple(out)


def _parse_stocks(data_sec: _Section, base_dir: Path) -> tuple[StockEntry, ...]:
    raw = data_sec.take("stocks", list, default=None)
    if raw is None:
        raise ConfigError("config lists no data files (need [[data.stocks]] entries)")
    entries = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ConfigError(f"data.stocks[{i}]: expected a table with ticker and path")
        sec = _Section(item, f"data.stocks[{i}]", data_sec.raw)
        ticker = sec.take("ticker", str)
        path_str = sec.take("path", str)
        sec.finish()
        p = Path(path_str)
        if not p.is_absolute():
            p = base_dir / p
        if not p.is_file():
            raise ConfigError(f"data.stocks[{i}] ({ticker}): no such file: {p}")
        entries.append(StockEntry(ticker=ticker, path=p))
    return tuple(entries)


def _parse_strategies(root: _Section) -> tuple[StrategySpec, ...]:
    raw = root.take("strategies", list, default=None)
    if raw is None:
        return default_strategies()
    if not raw:
        raise ConfigError("strategies list is empty; omit the key to get the defaults")
    specs = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ConfigError(f"strategies[{i}]: expected a table with a 'kind' key")
        item = dict(item)
        kind = item.pop("kind", None)
        if not isinstance(kind, str):
            raise ConfigError(f"strategies[{i}]: missing string key 'kind'")
        # Remaining keys pass through as strategy params; StrategySpec
        # rejects names its kind does not accept.
        for key, value in list(item.items()):
            if isinstance(value, list):
                item[key] = tuple(value)
        specs.append(StrategySpec(kind=kind, params=item))
    return tuple(specs)


def load_config(
    path: str | Path,
    *,
    seed: int | None = None,
    mode: str | None = None,
    gradient: str | None = None,
    output_dir: str | Path | None = None,
) -> RunConfig:
    """Parse and validate a TOML run config; keyword overrides win.

    ``seed``, ``mode`` and ``gradient`` mirror the CLI flags of the same
    names. Relative data paths resolve against the config file's directory.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"no such config file: {path}")
    raw_text = path.read_text(encoding="utf-8")
    try:
        tree = tomllib.loads(raw_text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML parse error: {exc}") from exc

    root = _Section(tree, "", raw_text)
    data_sec = root.take_section("data")
    stocks = _parse_stocks(data_sec, path.parent)
    alignment = data_sec.take("alignment", str, default="positional")
    use_adj = data_sec.take("use_adjusted_close", bool, default=False)
    data_sec.finish()

    k = root.take("k", int, default=len(stocks))
    cardinalities = _int_list(root, "cardinalities", (k,))
    out_dir = Path(root.take("output_dir", str, default="out"))

    pre_sec = root.take_section("preprocessing")
    pre_mode = pre_sec.take("mode", str, default="paper")
    if mode is not None:
        pre_mode = mode
    if pre_mode not in PREPROCESS_MODES:
        raise ConfigError(f"preprocessing.mode must be one of {PREPROCESS_MODES}")
    preprocess = PreprocessParams(
        mode=pre_mode,
        pca_ratio=pre_sec.take("pca_ratio", float, default=0.95),
        dwt_level=pre_sec.take("dwt_level", int, default=4),
        threshold_factor=pre_sec.take("threshold_factor", float, default=2.0),
        harmonize_mode=pre_sec.take("harmonize", str, default="max"),
    )
    pre_sec.finish()

    ind_sec = root.take_section("indicators")
    indicators = IndicatorParams(
        mom_period=ind_sec.take("mom_period", int, default=10),
        macd_fast=ind_sec.take("macd_fast", int, default=12),
        macd_slow=ind_sec.take("macd_slow", int, default=26),
        macd_signal=ind_sec.take("macd_signal", int, default=9),
        mfi_period=ind_sec.take("mfi_period", int, default=14),
        rsi_period=ind_sec.take("rsi_period", int, default=14),
        atr_period=ind_sec.take("atr_period", int, default=14),
        natr_period=ind_sec.take("natr_period", int, default=14),
        co_fast=ind_sec.take("co_fast", int, default=3),
        co_slow=ind_sec.take("co_slow", int, default=10),
        hts_output=ind_sec.take("hts_output", str, default="sine"),
    )
    ind_sec.finish()

    plan_sec = root.take_section("plan")
    train_window = plan_sec.take("train_window", int, default=100)
    test_window = plan_sec.take("test_window", int, default=100)
    plan_sec.finish()

    tr_sec = root.take_section("trainer")
    grad_mode = tr_sec.take("gradient_mode", str, default="collapsed")
    if gradient is not None:
        grad_mode = gradient
    if grad_mode not in GRADIENT_MODES:
        raise ConfigError(f"trainer.gradient_mode must be one of {GRADIENT_MODES}")
    seed_val = tr_sec.take("seed", int, default=42)
    if seed is not None:
        seed_val = seed
    trainer = TrainConfig(
        window=train_window,
        learning_rate=tr_sec.take("learning_rate", float, default=0.1),
        l2=tr_sec.take("l2", float, default=0.01),
        cost_rate=tr_sec.take("cost_rate", float, default=0.001),
        max_epochs=tr_sec.take("max_epochs", int, default=100),
        seed=seed_val,
        epsilon=tr_sec.take("epsilon", float, default=0.0),
        gradient_mode=grad_mode,
    )
    carry = tr_sec.take("carry_weights", bool, default=True)
    warm = tr_sec.take("warm_start", bool, default=False)
    tr_sec.finish()

    bt_sec = root.take_section("backtest")
    delta_list = _float_list(bt_sec, "delta_list", DEFAULT_DELTAS)
    rf_annual = bt_sec.take("rf_annual", float, default=DEFAULT_RF_ANNUAL)
    ppy = bt_sec.take("periods_per_year", int, default=DEFAULT_PERIODS_PER_YEAR)
    bt_sec.finish()

    strategies = _parse_strategies(root)
    root.finish()

    cfg = RunConfig(
        stocks=stocks,
        k=k,
        cardinalities=cardinalities,
        preprocess=preprocess,
        indicators=indicators,
        trainer=trainer,
        test_window=test_window,
        carry_weights=carry,
        warm_start=warm,
        alignment=alignment,
        use_adjusted_close=use_adj,
        strategies=strategies,
        delta_list=delta_list,
        rf_annual=rf_annual,
        periods_per_year=ppy,
        output_dir=out_dir,
    )
    if output_dir is not None:
        cfg = replace(cfg, output_dir=Path(output_dir))
    return cfg


def config_to_dict(cfg: RunConfig) -> dict:
    """JSON-ready view of every resolved setting, for provenance manifests."""
    return {
        "data": {
            "stocks": [{"ticker": s.ticker, "path": s.path.as_posix()} for s in cfg.stocks],
            "alignment": cfg.alignment,
            "use_adjusted_close": cfg.use_adjusted_close,
        },
        "k": cfg.k,
        "cardinalities": list(cfg.cardinalities),
        "preprocessing": {
            "mode": cfg.preprocess.mode,
            "pca_ratio": cfg.preprocess.pca_ratio,
            "dwt_level": cfg.preprocess.dwt_level,
            "threshold_factor": cfg.preprocess.threshold_factor,
            "harmonize": cfg.preprocess.harmonize_mode,
        },
        "indicators": {
            "mom_period": cfg.indicators.mom_period,
            "macd_fast": cfg.indicators.macd_fast,
            "macd_slow": cfg.indicators.macd_slow,
            "macd_signal": cfg.indicators.macd_signal,
            "mfi_period": cfg.indicators.mfi_period,
            "rsi_period": cfg.indicators.rsi_period,
            "atr_period": cfg.indicators.atr_period,
            "natr_period": cfg.indicators.natr_period,
            "co_fast": cfg.indicators.co_fast,
            "co_slow": cfg.indicators.co_slow,
            "hts_output": cfg.indicators.hts_output,
        },
        "plan": {"train_window": cfg.trainer.window, "test_window": cfg.test_window},
        "trainer": {
            "learning_rate": cfg.trainer.learning_rate,
            "l2": cfg.trainer.l2,
            "cost_rate": cfg.trainer.cost_rate,
            "max_epochs": cfg.trainer.max_epochs,
            "seed": cfg.trainer.seed,
            "epsilon": cfg.trainer.epsilon,
            "gradient_mode": cfg.trainer.gradient_mode,
            "carry_weights": cfg.carry_weights,
            "warm_start": cfg.warm_start,
        },
        "backtest": {
            "delta_list": list(cfg.delta_list),
            "rf_annual": cfg.rf_annual,
            "periods_per_year": cfg.periods_per_year,
        },
        "strategies": [
            {"kind": s.kind, **{k: list(v) if isinstance(v, tuple) else v for k, v in s.params.items()}}
            for s in cfg.strategies
        ],
        "output_dir": cfg.output_dir.as_posix(),
    }
