#!/usr/bin/env python3
"""Generate the bundled synthetic OHLCV fixtures and example configs.

Eight invented tickers, ~2000 business-day rows each, produced by a seeded
geometric random walk with gentle drift cycles, plus vendor-style warts:
a few NA cells sprinkled into two files and one shorter history, so the
NA-dropping and positional-alignment paths get exercised by the bundled
data. All values are synthetic; the tickers do not exist.

Usage: python tools/make_fixtures.py
Writes data/<TICKER>.csv and configs/{smoke,full}.toml.
"""
from __future__ import annotations

from datetime import date, timedelta
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]

TICKERS = (
    # ticker, annual drift, annual vol, volume base, adj factor, rows, NA cells
    ("AXCO", 0.12, 0.22, 2_400_000, 0.97, 2013, 0),
    ("BLYT", 0.07, 0.31, 5_100_000, 0.95, 2013, 6),
    ("CRNE", 0.15, 0.27, 1_300_000, 1.00, 2013, 0),
    ("DYNO", -0.02, 0.38, 7_800_000, 0.92, 2013, 0),
    ("ELMN", 0.09, 0.19, 3_600_000, 0.98, 2013, 0),
    ("FTHM", 0.04, 0.42, 9_200_000, 0.90, 2013, 5),
    ("GRYN", 0.11, 0.24, 1_900_000, 0.99, 2013, 0),
    ("HLCX", 0.06, 0.33, 4_400_000, 0.96, 1893, 0),
)

NA_TOKEN_CYCLE = ("", "NA", "null", "n/a")


def business_days(start: date, count: int) -> list[date]:
    out = []
    d = start
    while len(out) < count:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return out


def make_series(seed: int, drift: float, vol: float, vol_base: float, rows: int):
    rng = np.random.default_rng([seed, 20130102])
    mu = drift / 252.0
    sigma = vol / np.sqrt(252.0)
    t = np.arange(rows)
    cycle = 0.0004 * np.sin(2 * np.pi * t / 280.0)  # slow regime wobble
    shocks = rng.standard_normal(rows)
    fat = rng.random(rows) < 0.03
    shocks[fat] *= 3.0  # occasional jump days
    log_r = mu + cycle + sigma * shocks
    close = 90.0 * np.exp(np.cumsum(log_r))
    gaps = rng.standard_normal(rows) * (0.15 * sigma)
    prev_close = np.concatenate([[close[0] * np.exp(-log_r[0])], close[:-1]])
    open_ = prev_close * np.exp(gaps)
    hi_ext = np.abs(rng.standard_normal(rows)) * (0.6 * sigma)
    lo_ext = np.abs(rng.standard_normal(rows)) * (0.6 * sigma)
    high = np.maximum(open_, close) * (1.0 + hi_ext)
    low = np.minimum(open_, close) * (1.0 - lo_ext)
    activity = 1.0 + 1.5 * np.abs(log_r) / sigma
    volume = (vol_base * np.exp(0.35 * rng.standard_normal(rows)) * activity).round()
    return open_, high, low, close, volume


def write_csv(ticker_cfg, index: int) -> Path:
    ticker, drift, vol, vol_base, adj_factor, rows, na_cells = ticker_cfg
    open_, high, low, close, volume = make_series(index + 1, drift, vol, vol_base, rows)
    dates = business_days(date(2013, 1, 2), rows)
    lines = ["Date,Open,High,Low,Close,Adj Close,Volume"]
    # deterministic NA positions spread through the middle of the file
    na_rows = {}
    if na_cells:
        step = rows // (na_cells + 1)
        for j in range(na_cells):
            na_rows[step * (j + 1)] = NA_TOKEN_CYCLE[j % len(NA_TOKEN_CYCLE)]
    for i, d in enumerate(dates):
        cells = [
            d.isoformat(),
            f"{open_[i]:.4f}",
            f"{high[i]:.4f}",
            f"{low[i]:.4f}",
            f"{close[i]:.4f}",
            f"{close[i] * adj_factor:.4f}",
            f"{int(volume[i])}",
        ]
        if i in na_rows:
            # blank out one used column; the loader must drop the whole row
            col = 4 if (i // 7) % 2 == 0 else 6
            cells[col] = na_rows[i]
        lines.append(",".join(cells))
    out = ROOT / "data" / f"{ticker}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out


def stock_block(ticker: str) -> str:
    return f'[[data.stocks]]\nticker = "{ticker}"\npath = "../data/{ticker}.csv"\n'


def write_configs() -> None:
    cfg_dir = ROOT / "configs"
    cfg_dir.mkdir(parents=True, exist_ok=True)
    smoke = [
        "# Four synthetic stocks, every knob left at its default.",
        'output_dir = "out/smoke"',
        "",
    ]
    for t in [c[0] for c in TICKERS[:4]]:
        smoke.append(stock_block(t))
    (cfg_dir / "smoke.toml").write_text("\n".join(smoke), encoding="utf-8")

    full = [
        "# All eight synthetic stocks with a portfolio-size scan.",
        "k = 4",
        "cardinalities = [4, 6, 8]",
        'output_dir = "out/full"',
        "",
        "[preprocessing]",
        'mode = "paper"',
        "",
        "[backtest]",
        "delta_list = [0.0, 0.001, 0.005]",
        "",
    ]
    for t in [c[0] for c in TICKERS]:
        full.append(stock_block(t))
    (cfg_dir / "full.toml").write_text("\n".join(full), encoding="utf-8")


def main() -> None:
    for i, cfg in enumerate(TICKERS):
        path = write_csv(cfg, i)
        print(f"wrote {path}")
    write_configs()
    print("wrote configs/smoke.toml, configs/full.toml")


if __name__ == "__main__":
    main()
