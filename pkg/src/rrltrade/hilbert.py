"""Dominant-cycle indicators: HT dcphase, HT sine/leadsine, HT trendmode.

Implements Ehlers' Hilbert-transform dominant-cycle machinery exactly as
codified in the classic open-source indicator library: weighted 4-bar price
smoothing, the 6-bar FIR Hilbert transformer applied to detrender, Q1 and
the 3-bar-delayed I1, EMA-style smoothing of the quadrature components, the
clamped dominant-period recursion, and the 50-slot smoothed-price ring used
for the discrete Fourier correlation. All streams share a 63-bar warmup:
the internal recursion starts at bar 37 with zeroed state and outputs begin
at bar 63.

The implementation below keeps per-bar lag arrays rather than the original
parity-alternating ring buffers; with zero-initialized history the two
formulations produce bit-identical sequences. Sums that the original code
accumulates term-by-term are accumulated in the same order here so the
equality is exact, not approximate.
"""
from __future__ import annotations

import math

import numpy as np

LOOKBACK = 63  # first defined output index
_MAIN_START = 37  # first bar processed by the recursion (LOOKBACK - 26)
_A = 0.0962
_B = 0.5769
_BUF = 50  # smoothed-price ring size
_RAD2DEG = 180.0 / math.pi
_DEG2RAD = math.pi / 180.0

# sin/cos tables per discrete cycle length, built with math.sin/math.cos so
# values match scalar recomputation bit-for-bit.
_TRIG: dict[int, tuple[tuple[float, ...], tuple[float, ...]]] = {}


def _trig_table(d: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    tab = _TRIG.get(d)
    if tab is None:
        angles = [(i * 2.0 * math.pi) / d for i in range(d)]
        tab = (tuple(math.sin(a) for a in angles), tuple(math.cos(a) for a in angles))
        _TRIG[d] = tab
    return tab


def _fir(adj: float, u0: float, u2: float, u4: float, u6: float) -> float:
    """One step of the 6-bar Hilbert FIR, term order as the reference adds them."""
    v = -(_A * u6)
    v += _A * u0
    v -= _B * u4
    v += _B * u2
    return v * adj


def hilbert_family(
    price: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(dcphase, sine, leadsine, trendmode) with NaN before bar 63."""
    p = np.asarray(price, dtype=np.float64)
    n = len(p)
    out_dc = np.full(n, np.nan)
    out_sine = np.full(n, np.nan)
    out_lead = np.full(n, np.nan)
    out_trend = np.full(n, np.nan)
    if n <= LOOKBACK:
        return out_dc, out_sine, out_lead, out_trend

    # Rolling 4-bar weighted MA with the reference's running-sum updates, so
    # every smoothed value carries the same rounding. Bars 3..36 only prime
    # the sums; sp stays zero there because the downstream filter state is
    # still zero (matches the zeroed ring buffers).
    sp = np.zeros(n)
    wma_sub = (p[0] + p[1]) + p[2]
    wma_sum = (p[0] + p[1] * 2.0) + p[2] * 3.0
    trailing = 0.0
    trailing_idx = 0
    for t in range(3, _MAIN_START):
        v = p[t]
        wma_sub += v
        wma_sub -= trailing
        wma_sum += v * 4.0
        trailing = p[trailing_idx]
        trailing_idx += 1
        wma_sum -= wma_sub

    det = np.zeros(n)  # detrender
    q1 = np.zeros(n)  # in-phase quadrature input
    smooth_buf = [0.0] * _BUF
    buf_idx = 0

    period = 0.0
    smooth_period = 0.0
    q2_prev = 0.0
    i2_prev = 0.0
    re = 0.0
    im = 0.0
    dc_phase = 0.0
    sine = 0.0
    lead = 0.0
    itrend1 = itrend2 = itrend3 = 0.0
    days_in_trend = 0

    for t in range(_MAIN_START, n):
        adj = 0.075 * period + 0.54
        v = p[t]
        wma_sub += v
        wma_sub -= trailing
        wma_sum += v * 4.0
        trailing = p[trailing_idx]
        trailing_idx += 1
        spt = wma_sum / 10.0
        wma_sum -= wma_sub
        sp[t] = spt
        smooth_buf[buf_idx] = spt

        det[t] = _fir(adj, spt, sp[t - 2], sp[t - 4], sp[t - 6])
        q1[t] = _fir(adj, det[t], det[t - 2], det[t - 4], det[t - 6])
        i1 = det[t - 3]
        # jI transforms the I1 stream, which is the detrender delayed 3 bars.
        ji = _fir(adj, det[t - 3], det[t - 5], det[t - 7], det[t - 9])
        jq = _fir(adj, q1[t], q1[t - 2], q1[t - 4], q1[t - 6])

        q2 = 0.2 * (q1[t] + ji) + 0.8 * q2_prev
        i2 = 0.2 * (i1 - jq) + 0.8 * i2_prev
        re = 0.2 * (i2 * i2_prev + q2 * q2_prev) + 0.8 * re
        im = 0.2 * (i2 * q2_prev - q2 * i2_prev) + 0.8 * im
        q2_prev = q2
        i2_prev = i2

        prev_period = period
        if im != 0.0 and re != 0.0:
            period = 360.0 / (math.atan(im / re) * _RAD2DEG)
        upper = 1.5 * prev_period
        if period > upper:
            period = upper
        lower = 0.67 * prev_period
        if period < lower:
            period = lower
        if period < 6.0:
            period = 6.0
        elif period > 50.0:
            period = 50.0
        period = 0.2 * period + 0.8 * prev_period
        smooth_period = 0.33 * period + 0.67 * smooth_period

        prev_dc_phase = dc_phase
        dcp_int = int(smooth_period + 0.5)
        real_part = 0.0
        imag_part = 0.0
        if dcp_int > 0:
            sin_tab, cos_tab = _trig_table(dcp_int)
            idx = buf_idx
            for i in range(dcp_int):
                v = smooth_buf[idx]
                real_part += sin_tab[i] * v
                imag_part += cos_tab[i] * v
                idx = _BUF - 1 if idx == 0 else idx - 1
        if abs(imag_part) > 0.0:
            dc_phase = math.atan(real_part / imag_part) * _RAD2DEG
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
        prev_lead = lead
        sine = math.sin(dc_phase * _DEG2RAD)
        lead = math.sin((dc_phase + 45.0) * _DEG2RAD)

        # Idealized trendline: average of the last dcp_int raw prices,
        # then the same 4-bar weighted MA via a shift register.
        acc = 0.0
        j = t
        for _ in range(dcp_int):
            acc += p[j]
            j -= 1
        if dcp_int > 0:
            acc = acc / dcp_int
        trendline = (4.0 * acc + 3.0 * itrend1 + 2.0 * itrend2 + itrend3) / 10.0
        itrend3 = itrend2
        itrend2 = itrend1
        itrend1 = acc

        trend = 1
        if (sine > lead and prev_sine <= prev_lead) or (
            sine < lead and prev_sine >= prev_lead
        ):
            days_in_trend = 0
            trend = 0
        days_in_trend += 1
        if days_in_trend < 0.5 * smooth_period:
            trend = 0
        dphase = dc_phase - prev_dc_phase
        if smooth_period != 0.0:
            cycle_deg = 360.0 / smooth_period
            if 0.67 * cycle_deg < dphase < 1.5 * cycle_deg:
                trend = 0
        spv = smooth_buf[buf_idx]
        if trendline != 0.0 and abs((spv - trendline) / trendline) >= 0.015:
            trend = 1

        if t >= LOOKBACK:
            out_dc[t] = dc_phase
            out_sine[t] = sine
            out_lead[t] = lead
            out_trend[t] = float(trend)

        buf_idx = buf_idx + 1 if buf_idx < _BUF - 1 else 0

    return out_dc, out_sine, out_lead, out_trend


def ht_dcphase(price: np.ndarray) -> np.ndarray:
    """Dominant-cycle phase in degrees."""
    return hilbert_family(price)[0]


def ht_sine(price: np.ndarray, output: str = "sine") -> np.ndarray:
    """Sine of the dominant-cycle phase; ``output='leadsine'`` adds 45 deg."""
    dc, sine, lead, _ = hilbert_family(price)
    if output == "sine":
        return sine
    if output == "leadsine":
        return lead
    raise ValueError(f"unknown ht_sine output {output!r}")


def ht_trendmode(price: np.ndarray) -> np.ndarray:
    """Trend (1) vs cycle (0) regime flag."""
    return hilbert_family(price)[3]
