"""OHLCV ingestion, multi-asset alignment, and simple returns.

CSV layout is the common daily-bar vendor export: ``Date, Open, High, Low,
Close, Adj Close, Volume``. ``Adj Close`` is ignored unless the loader is
told to substitute it for ``Close``. Rows with missing or non-numeric cells
in used columns are dropped outright.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("Date", "Open", "High", "Low", "Close", "Volume")

_DATE_FORMATS = ("%Y-%m-%d", "%Y/%m/%d")
_NA_TOKENS = frozenset({"", "null", "na", "n/a", "nan", "none", "#n/a", "missing"})


def _parse_date(token: str) -> date | None:
    token = token.strip()
    for fmt in _DATE_FORMATS:
        try:
            return datetime.strptime(token, fmt).date()
        except ValueError:
            continue
    return None


def _parse_cell(token: str | None) -> float | None:
    if token is None or token.strip().lower() in _NA_TOKENS:
        return None
    try:
        return float(token)
    except ValueError:
        return None


@dataclass(frozen=True)
class OhlcvSeries:
    """One asset's daily bars, already validated."""

    symbol: str
    dates: tuple[date, ...]
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    volume: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.dates)
        for name in ("open", "high", "low", "close", "volume"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise DataError(
                    f"{self.symbol}: column {name!r} has shape {arr.shape}, expected ({n},)"
                )
        if n == 0:
            raise DataError(f"{self.symbol}: empty series")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise DataError(f"{self.symbol}: dates are not strictly increasing")
        # Raw vendor data may violate OHLC ordering; only these two are enforced.
        if not np.all(self.close > 0):
            raise DataError(f"{self.symbol}: non-positive close prices")
        if not np.all(self.volume >= 0):
            raise DataError(f"{self.symbol}: negative volumes")

    def __len__(self) -> int:
        return len(self.dates)

    def tail(self, n: int) -> "OhlcvSeries":
        """The most recent ``n`` bars as a new series."""
        if n <= 0 or n > len(self):
            raise DataError(f"{self.symbol}: cannot take tail of {n} from {len(self)} rows")
        return OhlcvSeries(
            symbol=self.symbol,
            dates=self.dates[-n:],
            open=self.open[-n:],
            high=self.high[-n:],
            low=self.low[-n:],
            close=self.close[-n:],
            volume=self.volume[-n:],
        )


@dataclass(frozen=True)
class OhlcvPanel:
    """Equal-length collection of series in user-declared order."""

    series: tuple[OhlcvSeries, ...]

    def __post_init__(self) -> None:
        if not self.series:
            raise DataError("panel has no series")
        lengths = {len(s) for s in self.series}
        if len(lengths) != 1:
            raise DataError(f"panel series lengths differ: {sorted(lengths)}")
        symbols = [s.symbol for s in self.series]
        if len(set(symbols)) != len(symbols):
            raise DataError(f"duplicate symbols in panel: {symbols}")

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(s.symbol for s in self.series)

    @property
    def length(self) -> int:
        return len(self.series[0])

    @property
    def n_assets(self) -> int:
        return len(self.series)

    def closes(self) -> np.ndarray:
        """(length, n_assets) close matrix in panel order."""
        return np.column_stack([s.close for s in self.series])


@dataclass(frozen=True)
class ReturnsPanel:
    """Simple returns; row i is the return over period i -> i+1."""

    symbols: tuple[str, ...]
    values: np.ndarray  # (panel length - 1, n_assets)

    def __post_init__(self) -> None:
        if self.values.ndim != 2 or self.values.shape[1] != len(self.symbols):
            raise DataError(f"returns shape {self.values.shape} does not match symbols")


def load_ohlcv(
    path: str | Path, symbol: str | None = None, use_adjusted_close: bool = False
) -> OhlcvSeries:
    """Read one CSV into an :class:`OhlcvSeries`, dropping NA rows.

    A row is dropped when its date fails to parse or any used column is
    blank/NA/non-numeric. Surviving rows keep their file order. With
    ``use_adjusted_close`` the ``Adj Close`` column replaces ``Close``
    (open/high/low stay raw).
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such data file: {path}")
    sym = symbol if symbol is not None else path.stem
    close_col = "Adj Close" if use_adjusted_close else "Close"
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if use_adjusted_close and "Adj Close" not in header:
            missing.append("Adj Close")
        if missing:
            raise DataError(f"{path}: missing columns {missing}")
        dates: list[date] = []
        cols: dict[str, list[float]] = {k: [] for k in ("open", "high", "low", "close", "volume")}
        dropped = 0
        for row in reader:
            d = _parse_date(row.get("Date") or "")
            vals = [
                _parse_cell(row.get("Open")),
                _parse_cell(row.get("High")),
                _parse_cell(row.get("Low")),
                _parse_cell(row.get(close_col)),
                _parse_cell(row.get("Volume")),
            ]
            if d is None or any(v is None for v in vals):
                dropped += 1
                continue
            dates.append(d)
            for key, v in zip(("open", "high", "low", "close", "volume"), vals):
                cols[key].append(v)  # type: ignore[arg-type]
    if not dates:
        raise DataError(f"{path}: zero usable rows after NA drop")
    if dropped:
        logger.info("load_ohlcv: dropped %d NA rows from %s", dropped, path.name)
    return OhlcvSeries(
        symbol=sym,
        dates=tuple(dates),
        **{k: np.asarray(v, dtype=np.float64) for k, v in cols.items()},
    )


def align(series: Sequence[OhlcvSeries], mode: str = "positional") -> OhlcvPanel:
    """Build an equal-length panel from per-asset series.

    ``positional`` (default) truncates every series to the trailing L rows,
    L = min length over the inputs, keeping the most recent observations and
    doing no date matching. ``intersect`` keeps only dates present in every
    series, for callers with mismatched calendars.
    """
    if not series:
        raise DataError("align() called with no series")
    if mode == "positional":
        min_len = min(len(s) for s in series)
        out = tuple(s if len(s) == min_len else s.tail(min_len) for s in series)
        return OhlcvPanel(series=out)
    if mode == "intersect":
        common = set(series[0].dates)
        for s in series[1:]:
            common &= set(s.dates)
        if not common:
            raise DataError("no common dates across series")
        aligned = []
        for s in series:
            sel = np.asarray([i for i, d in enumerate(s.dates) if d in common], dtype=np.intp)
            aligned.append(
                OhlcvSeries(
                    symbol=s.symbol,
                    dates=tuple(s.dates[i] for i in sel),
                    open=s.open[sel],
                    high=s.high[sel],
                    low=s.low[sel],
                    close=s.close[sel],
                    volume=s.volume[sel],
                )
            )
        return OhlcvPanel(series=tuple(aligned))
    raise DataError(f"unknown alignment mode {mode!r}")


def simple_returns(panel: OhlcvPanel) -> ReturnsPanel:
    """r_t^a = close_t^a / close_{t-1}^a - 1 for t = 1..length-1."""
    if panel.length < 2:
        raise DataError("panel too short for returns (need at least 2 rows)")
    closes = panel.closes()
    vals = closes[1:] / closes[:-1] - 1.0
    return ReturnsPanel(symbols=panel.symbols, values=vals)


def summary_stats(panel: OhlcvPanel) -> dict[str, dict[str, float]]:
    """Close-price summary per asset: mean, sample std, min, max, range."""
    out: dict[str, dict[str, float]] = {}
    for s in panel.series:
        c = s.close
        out[s.symbol] = {
            "mean": float(np.mean(c)),
            "std": float(np.std(c, ddof=1)) if len(c) > 1 else 0.0,
            "min": float(np.min(c)),
            "max": float(np.max(c)),
            "range": float(np.max(c) - np.min(c)),
        }
    return out
