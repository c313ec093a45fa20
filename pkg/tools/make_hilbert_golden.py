#!/usr/bin/env python3
"""Generate the golden fixture for the Hilbert dominant-cycle indicators.

This is a deliberately independent scalar transcription of the classic
open-source reference implementation, kept in its original shape: parity
ring buffers (Odd/Even arrays of 3 plus prev/prev-input slots), a rolling
weighted-moving-average price smoother, and one state machine walked bar by
bar. The production module in src/ restructures the same recurrences around
flat lag arrays; this script exists so the two derivations can be compared
on fixed inputs without sharing any code.

Usage: python tools/make_hilbert_golden.py [out_csv]
Writes tests/fixtures/hilbert_golden.csv by default.
"""
from __future__ import annotations

import math
import sys
from pathlib import Path

A = 0.0962
B = 0.5769
RAD2DEG = 180.0 / math.pi
DEG2RAD = math.pi / 180.0
TWO_PI = 2.0 * math.pi
LOOKBACK = 63
SMOOTH_SIZE = 50


class HilbertVar:
    """One Hilbert-transform stream: per-parity 3-slot rings + prev values."""

    def __init__(self) -> None:
        self.ring = {"odd": [0.0, 0.0, 0.0], "even": [0.0, 0.0, 0.0]}
        self.prev = {"odd": 0.0, "even": 0.0}
        self.prev_input = {"odd": 0.0, "even": 0.0}

    def step(self, value: float, parity: str, idx: int, adj: float) -> float:
        temp = A * value
        out = -self.ring[parity][idx]
        self.ring[parity][idx] = temp
        out += temp
        out -= self.prev[parity]
        self.prev[parity] = B * self.prev_input[parity]
        out += self.prev[parity]
        self.prev_input[parity] = value
        return out * adj


def reference_ht(prices: list[float]) -> list[tuple[float, float, float, int]]:
    """(dcphase, sine, leadsine, trendmode) per bar from LOOKBACK onward."""
    n = len(prices)
    if n <= LOOKBACK:
        return []

    # prime the rolling WMA on the first 3 bars
    wma_sub = (prices[0] + prices[1]) + prices[2]
    wma_sum = (prices[0] + prices[1] * 2.0) + prices[2] * 3.0
    trailing_value = 0.0
    trailing_idx = 0
    today = 3

    def wma_step(value: float) -> float:
        nonlocal wma_sub, wma_sum, trailing_value, trailing_idx
        wma_sub += value
        wma_sub -= trailing_value
        wma_sum += value * 4.0
        trailing_value = prices[trailing_idx]
        trailing_idx += 1
        smoothed = wma_sum / 10.0
        wma_sum -= wma_sub
        return smoothed

    for _ in range(34):  # warm the smoother; filter state stays zero
        wma_step(prices[today])
        today += 1

    detrender = HilbertVar()
    q1v = HilbertVar()
    jiv = HilbertVar()
    jqv = HilbertVar()
    hilbert_idx = 0
    smooth_price = [0.0] * SMOOTH_SIZE
    smooth_idx = 0

    i1_odd_prev3 = i1_odd_prev2 = 0.0
    i1_even_prev3 = i1_even_prev2 = 0.0
    period = 0.0
    smooth_period = 0.0
    prev_q2 = prev_i2 = 0.0
    re = im = 0.0
    dc_phase = 0.0
    sine = lead_sine = 0.0
    itrend1 = itrend2 = itrend3 = 0.0
    days_in_trend = 0

    out: list[tuple[float, float, float, int]] = []
    while today < n:
        adj = 0.075 * period + 0.54
        smoothed = wma_step(prices[today])
        smooth_price[smooth_idx] = smoothed

        if today % 2 == 0:
            det = detrender.step(smoothed, "even", hilbert_idx, adj)
            q1 = q1v.step(det, "even", hilbert_idx, adj)
            ji = jiv.step(i1_even_prev3, "even", hilbert_idx, adj)
            jq = jqv.step(q1, "even", hilbert_idx, adj)
            hilbert_idx += 1
            if hilbert_idx == 3:
                hilbert_idx = 0
            q2 = (0.2 * (q1 + ji)) + (0.8 * prev_q2)
            i2 = (0.2 * (i1_even_prev3 - jq)) + (0.8 * prev_i2)
            i1_odd_prev3 = i1_odd_prev2
            i1_odd_prev2 = det
        else:
            det = detrender.step(smoothed, "odd", hilbert_idx, adj)
            q1 = q1v.step(det, "odd", hilbert_idx, adj)
            ji = jiv.step(i1_odd_prev3, "odd", hilbert_idx, adj)
            jq = jqv.step(q1, "odd", hilbert_idx, adj)
            q2 = (0.2 * (q1 + ji)) + (0.8 * prev_q2)
            i2 = (0.2 * (i1_odd_prev3 - jq)) + (0.8 * prev_i2)
            i1_even_prev3 = i1_even_prev2
            i1_even_prev2 = det

        re = (0.2 * ((i2 * prev_i2) + (q2 * prev_q2))) + (0.8 * re)
        im = (0.2 * ((i2 * prev_q2) - (q2 * prev_i2))) + (0.8 * im)
        prev_q2 = q2
        prev_i2 = i2

        prev_period = period
        if im != 0.0 and re != 0.0:
            period = 360.0 / (math.atan(im / re) * RAD2DEG)
        cap = 1.5 * prev_period
        if period > cap:
            period = cap
        floor_ = 0.67 * prev_period
        if period < floor_:
            period = floor_
        if period < 6.0:
            period = 6.0
        elif period > 50.0:
            period = 50.0
        period = (0.2 * period) + (0.8 * prev_period)
        smooth_period = (0.33 * period) + (0.67 * smooth_period)

        prev_dc_phase = dc_phase
        dc_period_int = int(smooth_period + 0.5)
        real_part = 0.0
        imag_part = 0.0
        idx = smooth_idx
        for i in range(dc_period_int):
            angle = (i * TWO_PI) / dc_period_int
            val = smooth_price[idx]
            real_part += math.sin(angle) * val
            imag_part += math.cos(angle) * val
            idx = SMOOTH_SIZE - 1 if idx == 0 else idx - 1
        if abs(imag_part) > 0.0:
            dc_phase = math.atan(real_part / imag_part) * RAD2DEG
        elif real_part < 0.0:
            dc_phase -= 90.0
        elif real_part > 0.0:
            dc_phase += 90.0
        dc_phase += 90.0
        dc_phase += 360.0 / smooth_period
        if imag_part < 0.0:
            dc_phase += 180.0
        if dc_phase > 315.0:
            dc_phase -= 360.0

        prev_sine = sine
        prev_lead = lead_sine
        sine = math.sin(dc_phase * DEG2RAD)
        lead_sine = math.sin((dc_phase + 45.0) * DEG2RAD)

        acc = 0.0
        idx = today
        for _ in range(dc_period_int):
            acc += prices[idx]
            idx -= 1
        if dc_period_int > 0:
            acc = acc / dc_period_int
        trendline = ((4.0 * acc) + (3.0 * itrend1) + (2.0 * itrend2) + itrend3) / 10.0
        itrend3 = itrend2
        itrend2 = itrend1
        itrend1 = acc

        trend = 1
        if (sine > lead_sine and prev_sine <= prev_lead) or (
            sine < lead_sine and prev_sine >= prev_lead
        ):
            days_in_trend = 0
            trend = 0
        days_in_trend += 1
        if days_in_trend < 0.5 * smooth_period:
            trend = 0
        delta_phase = dc_phase - prev_dc_phase
        if smooth_period != 0.0:
            cycle_deg = 360.0 / smooth_period
            if 0.67 * cycle_deg < delta_phase < 1.5 * cycle_deg:
                trend = 0
        current_smooth = smooth_price[smooth_idx]
        if trendline != 0.0 and abs((current_smooth - trendline) / trendline) >= 0.015:
            trend = 1

        if today >= LOOKBACK:
            out.append((dc_phase, sine, lead_sine, trend))

        smooth_idx = smooth_idx + 1 if smooth_idx < SMOOTH_SIZE - 1 else 0
        today += 1
    return out


def lcg_prices(seed: int, n: int, drift: float, vol: float, cycle: float) -> list[float]:
    """Deterministic price path from a hand-rolled LCG, no numpy dependence."""
    state = seed & 0xFFFFFFFFFFFFFFFF
    prices = []
    level = 100.0
    for t in range(n):
        state = (6364136223846793005 * state + 1442695040888963407) & 0xFFFFFFFFFFFFFFFF
        u = ((state >> 11) / float(1 << 53)) * 2.0 - 1.0  # uniform in (-1, 1)
        wave = cycle * math.sin(2.0 * math.pi * t / 23.0)
        level = level * (1.0 + drift + vol * u) + wave
        prices.append(level)
    return prices


def main() -> None:
    out_path = (
        Path(sys.argv[1])
        if len(sys.argv) > 1
        else Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "hilbert_golden.csv"
    )
    out_path.parent.mkdir(parents=True, exist_ok=True)
    series = {
        "trend_cycle": lcg_prices(seed=2024, n=260, drift=0.0006, vol=0.012, cycle=0.35),
        "choppy": lcg_prices(seed=77, n=220, drift=0.0, vol=0.02, cycle=1.1),
    }
    lines = ["series,idx,price,dcphase,sine,leadsine,trendmode"]
    for name, prices in series.items():
        rows = reference_ht(prices)
        for i, price in enumerate(prices):
            if i < LOOKBACK:
                lines.append(f"{name},{i},{price!r},,,,")
            else:
                dc, s, l, tm = rows[i - LOOKBACK]
                lines.append(f"{name},{i},{price!r},{dc!r},{s!r},{l!r},{tm}")
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out_path} ({len(lines) - 1} rows)")


if __name__ == "__main__":
    main()
