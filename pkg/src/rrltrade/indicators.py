"""The 11 technical indicators and the z-score normalizer.

Column order is fixed: MOM, MACD, MFI, RSI, ATR, NATR, HTDCP, HTS, HTTMM,
CO, OBV. Computation follows the de-facto reference definitions of the
classic C indicator library, including its seeding and warmup conventions,
so outputs line up value-for-value with that library's defaults. Each
function returns a full-length array with NaN over the warmup prefix;
``compute_indicators`` trims all columns to the first index where every
column is defined.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .data import OhlcvSeries
from .errors import DataError
from .hilbert import hilbert_family

logger = logging.getLogger(__name__)

INDICATOR_ORDER = (
    "MOM",
    "MACD",
    "MFI",
    "RSI",
    "ATR",
    "NATR",
    "HTDCP",
    "HTS",
    "HTTMM",
    "CO",
    "OBV",
)

# Denominator guard used by the reference library's RSI/NATR paths.
_EPS_ZERO = 1e-8


@dataclass(frozen=True)
class IndicatorParams:
    """Lookback settings; defaults match the reference library."""

    mom_period: int = 10
    macd_fast: int = 12
    macd_slow: int = 26
    macd_signal: int = 9
    mfi_period: int = 14
    rsi_period: int = 14
    atr_period: int = 14
    natr_period: int = 14
    co_fast: int = 3
    co_slow: int = 10
    hts_output: str = "sine"  # or "leadsine"

    def __post_init__(self) -> None:
        for name in (
            "mom_period",
            "macd_fast",
            "macd_slow",
            "macd_signal",
            "mfi_period",
            "rsi_period",
            "atr_period",
            "natr_period",
            "co_fast",
            "co_slow",
        ):
            if getattr(self, name) < 1:
                raise DataError(f"indicator parameter {name} must be >= 1")
        if self.macd_fast >= self.macd_slow:
            raise DataError("macd_fast must be smaller than macd_slow")
        if self.co_fast >= self.co_slow:
            raise DataError("co_fast must be smaller than co_slow")
        if self.hts_output not in ("sine", "leadsine"):
            raise DataError(f"hts_output must be 'sine' or 'leadsine', got {self.hts_output!r}")


@dataclass(frozen=True)
class IndicatorTable:
    """Rectangular per-stock indicator matrix, warmup already trimmed."""

    symbol: str
    values: np.ndarray  # (length, 11)
    warmup_len: int
    columns: tuple[str, ...] = INDICATOR_ORDER

    def __post_init__(self) -> None:
        if self.values.ndim != 2 or self.values.shape[1] != len(self.columns):
            raise DataError(
                f"{self.symbol}: indicator matrix shape {self.values.shape}, "
                f"expected (*, {len(self.columns)})"
            )

    @property
    def length(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]


def momentum(close: np.ndarray, period: int = 10) -> np.ndarray:
    """MOM: p_t - p_{t-period}."""
    out = np.full(close.shape, np.nan)
    out[period:] = close[period:] - close[:-period]
    return out


def _ema_from(seed: float, values: np.ndarray, start: int, period: int) -> np.ndarray:
    """EMA with an explicit seed at index start-1, outputs from ``start`` on."""
    k = 2.0 / (period + 1.0)
    out = np.full(values.shape, np.nan)
    prev = seed
    out[start - 1] = prev
    for t in range(start, len(values)):
        prev = prev + k * (values[t] - prev)
        out[t] = prev
    return out


def macd(
    close: np.ndarray,
    fast: int = 12,
    slow: int = 26,
    signal: int = 9,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """MACD line, signal line, histogram.

    Both EMAs are seeded with simple averages ending at index slow-1 (the
    fast seed averages the trailing ``fast`` bars of that window), mirroring
    the reference implementation, so the line is defined from slow-1 and the
    full triple from slow-1+signal-1.
    """
    n = len(close)
    line_start = slow - 1
    full_start = line_start + signal - 1
    nan3 = (np.full(n, np.nan), np.full(n, np.nan), np.full(n, np.nan))
    if n <= full_start:
        return nan3
    slow_seed = float(np.mean(close[:slow]))
    fast_seed = float(np.mean(close[slow - fast : slow]))
    slow_ema = _ema_from(slow_seed, close, slow, slow)
    fast_ema = _ema_from(fast_seed, close, slow, fast)
    line = fast_ema - slow_ema
    sig_seed = float(np.mean(line[line_start : line_start + signal]))
    sig = _ema_from(sig_seed, line, line_start + signal, signal)
    hist = line - sig
    # The reference output window starts where the signal is defined.
    line_out = np.full(n, np.nan)
    line_out[full_start:] = line[full_start:]
    return line_out, sig, hist


def _window_sum(values: np.ndarray, period: int) -> np.ndarray:
    """Trailing-window sums; entry t sums values[t-period+1 .. t]."""
    c = np.concatenate(([0.0], np.cumsum(values)))
    out = np.full(values.shape, np.nan)
    out[period - 1 :] = c[period:] - c[:-period]
    return out


def money_flow_index(
    high: np.ndarray,
    low: np.ndarray,
    close: np.ndarray,
    volume: np.ndarray,
    period: int = 14,
) -> np.ndarray:
    """MFI: 100 * positive money flow / total money flow over the window.

    A flat typical price contributes to neither side; a window with total
    flow below 1.0 yields 0 (reference-library guard).
    """
    tp = (high + low + close) / 3.0
    flow = tp * volume
    d = np.diff(tp)
    pos = np.where(d > 0, flow[1:], 0.0)
    neg = np.where(d < 0, flow[1:], 0.0)
    pos_sum = _window_sum(pos, period)
    neg_sum = _window_sum(neg, period)
    out = np.full(close.shape, np.nan)
    total = pos_sum + neg_sum
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = np.where(total < 1.0, 0.0, 100.0 * pos_sum / total)
    out[period:] = vals[period - 1 :]
    return out


def rsi(close: np.ndarray, period: int = 14) -> np.ndarray:
    """RSI with Wilder smoothing, SMA-seeded over the first window."""
    n = len(close)
    out = np.full(n, np.nan)
    if n <= period:
        return out
    d = np.diff(close)
    gain = np.where(d > 0, d, 0.0)
    loss = np.where(d < 0, -d, 0.0)
    avg_gain = float(np.mean(gain[:period]))
    avg_loss = float(np.mean(loss[:period]))
    for t in range(period, n):
        if t > period:
            avg_gain = (avg_gain * (period - 1) + gain[t - 1]) / period
            avg_loss = (avg_loss * (period - 1) + loss[t - 1]) / period
        total = avg_gain + avg_loss
        out[t] = 0.0 if total < _EPS_ZERO else 100.0 * avg_gain / total
    return out


def true_range(high: np.ndarray, low: np.ndarray, close: np.ndarray) -> np.ndarray:
    """TR_t = max(H-L, |H-C_prev|, |L-C_prev|); index 0 is NaN (no prior close)."""
    tr = np.full(close.shape, np.nan)
    hl = high[1:] - low[1:]
    hc = np.abs(high[1:] - close[:-1])
    lc = np.abs(low[1:] - close[:-1])
    tr[1:] = np.maximum(hl, np.maximum(hc, lc))
    return tr


def atr(high: np.ndarray, low: np.ndarray, close: np.ndarray, period: int = 14) -> np.ndarray:
    """ATR: SMA of the first ``period`` true ranges, then Wilder smoothing."""
    n = len(close)
    out = np.full(n, np.nan)
    if n <= period:
        return out
    tr = true_range(high, low, close)
    prev = float(np.mean(tr[1 : period + 1]))
    out[period] = prev
    for t in range(period + 1, n):
        prev = (prev * (period - 1) + tr[t]) / period
        out[t] = prev
    return out


def natr(high: np.ndarray, low: np.ndarray, close: np.ndarray, period: int = 14) -> np.ndarray:
    """Normalized ATR: 100 * ATR / close (0 where close is ~0)."""
    a = atr(high, low, close, period)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(np.abs(close) < _EPS_ZERO, 0.0, 100.0 * a / close)
    out[np.isnan(a)] = np.nan
    return out


def accumulation_distribution(
    high: np.ndarray, low: np.ndarray, close: np.ndarray, volume: np.ndarray
) -> np.ndarray:
    """Chaikin A/D line; bars with high == low contribute zero flow."""
    rng = high - low
    with np.errstate(invalid="ignore", divide="ignore"):
        clv = np.where(rng > 0, ((close - low) - (high - close)) / rng, 0.0)
    return np.cumsum(clv * volume)


def chaikin_oscillator(
    high: np.ndarray,
    low: np.ndarray,
    close: np.ndarray,
    volume: np.ndarray,
    fast: int = 3,
    slow: int = 10,
) -> np.ndarray:
    """CO: fast EMA minus slow EMA of the A/D line, both seeded at AD[0]."""
    n = len(close)
    out = np.full(n, np.nan)
    if n < slow:
        return out
    ad = accumulation_distribution(high, low, close, volume)
    k_fast = 2.0 / (fast + 1.0)
    k_slow = 2.0 / (slow + 1.0)
    fast_ema = ad[0]
    slow_ema = ad[0]
    for t in range(1, n):
        fast_ema += k_fast * (ad[t] - fast_ema)
        slow_ema += k_slow * (ad[t] - slow_ema)
        if t >= slow - 1:
            out[t] = fast_ema - slow_ema
    return out


def on_balance_volume(close: np.ndarray, volume: np.ndarray) -> np.ndarray:
    """OBV seeded with volume[0]; adds volume on up-closes, subtracts on down."""
    d = np.diff(close)
    steps = np.where(d > 0, volume[1:], np.where(d < 0, -volume[1:], 0.0))
    return np.concatenate(([volume[0]], volume[0] + np.cumsum(steps)))


def zscore(column: np.ndarray) -> np.ndarray:
    """(x - mean)/std with population std; constant input maps to zeros.

    A constant column is detected by exact equality, not by a small-sigma
    threshold: z-scoring is scale-free, so any genuinely non-constant input
    is well conditioned.
    """
    x = np.asarray(column, dtype=np.float64)
    if x.size == 0:
        raise DataError("zscore: empty column")
    if np.all(x == x[0]):
        warnings.warn("zscore: constant column, emitting zeros", RuntimeWarning, stacklevel=2)
        return np.zeros_like(x)
    centered = x - np.mean(x)
    sigma = np.sqrt(np.mean(centered * centered))
    return centered / sigma


def compute_indicators(
    series: OhlcvSeries, params: IndicatorParams | None = None
) -> IndicatorTable:
    """All 11 columns for one asset, trimmed to the common defined range."""
    p = params or IndicatorParams()
    if not np.any(series.volume > 0):
        raise DataError(f"{series.symbol}: zero-volume series, MFI/CO/OBV undefined")
    c, h, l, v = series.close, series.high, series.low, series.volume
    line, _, _ = macd(c, p.macd_fast, p.macd_slow, p.macd_signal)
    dcphase, sine, leadsine, trendmode = hilbert_family(c)
    cols = {
        "MOM": momentum(c, p.mom_period),
        "MACD": line,
        "MFI": money_flow_index(h, l, c, v, p.mfi_period),
        "RSI": rsi(c, p.rsi_period),
        "ATR": atr(h, l, c, p.atr_period),
        "NATR": natr(h, l, c, p.natr_period),
        "HTDCP": dcphase,
        "HTS": sine if p.hts_output == "sine" else leadsine,
        "HTTMM": trendmode,
        "CO": chaikin_oscillator(h, l, c, v, p.co_fast, p.co_slow),
        "OBV": on_balance_volume(c, v),
    }
    mat = np.column_stack([cols[name] for name in INDICATOR_ORDER])
    defined = ~np.isnan(mat).any(axis=1)
    if not defined.any():
        raise DataError(f"{series.symbol}: series shorter than indicator warmup")
    warmup = int(np.argmax(defined))
    trimmed = mat[warmup:]
    if np.isnan(trimmed).any():
        raise DataError(f"{series.symbol}: indicator gap after warmup trim")
    return IndicatorTable(symbol=series.symbol, values=trimmed, warmup_len=warmup)


def normalize_table(table: IndicatorTable) -> IndicatorTable:
    """z-score every column over its full (trimmed) length."""
    cols = [zscore(table.values[:, j]) for j in range(table.values.shape[1])]
    return replace(table, values=np.column_stack(cols))
