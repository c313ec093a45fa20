"""Shared fixtures and small builders used across the test suite."""

from __future__ import annotations

from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pytest

from rrltrade.data import OhlcvPanel, OhlcvSeries, align

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"
CONFIG_DIR = REPO_ROOT / "configs"
FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"


def business_dates(n: int, start: date = date(2015, 1, 5)) -> tuple[date, ...]:
    out: list[date] = []
    d = start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return tuple(out)


def make_series(
    symbol: str,
    close: np.ndarray,
    volume: np.ndarray | None = None,
    spread: float = 0.01,
) -> OhlcvSeries:
    """OHLCV series derived from a close path; highs/lows bracket the close."""
    c = np.asarray(close, dtype=np.float64)
    n = c.size
    if volume is None:
        volume = np.full(n, 1.0e6)
    o = np.concatenate(([c[0]], c[:-1]))
    h = np.maximum(o, c) * (1.0 + spread)
    l = np.minimum(o, c) * (1.0 - spread)
    return OhlcvSeries(
        symbol=symbol,
        dates=business_dates(n),
        open=o,
        high=h,
        low=l,
        close=c,
        volume=np.asarray(volume, dtype=np.float64),
    )


def gbm_closes(
    n: int, seed: int, drift: float = 0.0, vol: float = 0.01, start: float = 100.0
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    rets = drift + vol * rng.standard_normal(n - 1)
    return start * np.concatenate(([1.0], np.cumprod(1.0 + rets)))


def make_panel(n_assets: int, n: int, seed: int = 7, drift: float = 0.0005) -> OhlcvPanel:
    rng = np.random.default_rng(seed)
    series = []
    for i in range(n_assets):
        c = gbm_closes(n, seed=seed + 100 * i, drift=drift, vol=0.012)
        v = 1e6 * (1.0 + 0.3 * rng.random(n))
        series.append(make_series(f"S{i}", c, volume=v))
    return align(series)


@pytest.fixture(scope="session")
def bundled_panel() -> OhlcvPanel:
    """Four bundled tickers, positionally aligned (the packaged demo set)."""
    from rrltrade.data import load_ohlcv

    tickers = ("AXCO", "BLYT", "CRNE", "DYNO")
    series = [load_ohlcv(DATA_DIR / f"{t}.csv", symbol=t) for t in tickers]
    return align(series)


def write_csv(path: Path, rows: list[list[str]]) -> Path:
    text = "\n".join(",".join(r) for r in rows) + "\n"
    path.write_text(text)
    return path


OHLCV_HEADER = ["Date", "Open", "High", "Low", "Close", "Volume"]
