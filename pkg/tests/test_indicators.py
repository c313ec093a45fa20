"""Technical indicators versus independently coded scalar oracles.

Every oracle below is a direct loop transcription of the published
indicator recipe (seeding conventions documented inline), structured
nothing like the vectorized production code so the two act as twins.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rrltrade.data import OhlcvSeries
from rrltrade.errors import DataError
from rrltrade.indicators import (
    INDICATOR_ORDER,
    IndicatorParams,
    atr,
    chaikin_oscillator,
    compute_indicators,
    macd,
    momentum,
    money_flow_index,
    natr,
    normalize_table,
    on_balance_volume,
    rsi,
    zscore,
)

from conftest import gbm_closes, make_series

# ---------------------------------------------------------------------------
# scalar reference implementations


def ref_mom(close, period):
    out = [math.nan] * len(close)
    for t in range(period, len(close)):
        out[t] = close[t] - close[t - period]
    return out


def ref_macd(close, fast=12, slow=26, signal=9):
    """EMAs seeded with simple means ending at index slow-1."""
    n = len(close)
    line = [math.nan] * n
    sig = [math.nan] * n
    hist = [math.nan] * n
    full_start = slow - 1 + signal - 1
    if n <= full_start:
        return line, sig, hist
    kf, ks = 2.0 / (fast + 1.0), 2.0 / (slow + 1.0)
    f = sum(close[slow - fast : slow]) / fast
    s = sum(close[:slow]) / slow
    raw = [math.nan] * n
    raw[slow - 1] = f - s
    for t in range(slow, n):
        f = f + kf * (close[t] - f)
        s = s + ks * (close[t] - s)
        raw[t] = f - s
    kg = 2.0 / (signal + 1.0)
    g = sum(raw[slow - 1 : slow - 1 + signal]) / signal
    sig[full_start] = g
    for t in range(full_start + 1, n):
        g = g + kg * (raw[t] - g)
        sig[t] = g
    for t in range(full_start, n):
        line[t] = raw[t]
        hist[t] = raw[t] - sig[t]
    return line, sig, hist


def ref_mfi(high, low, close, volume, period=14):
    n = len(close)
    tp = [(high[t] + low[t] + close[t]) / 3.0 for t in range(n)]
    out = [math.nan] * n
    for t in range(period, n):
        pos = neg = 0.0
        for j in range(t - period + 1, t + 1):
            flow = tp[j] * volume[j]
            if tp[j] > tp[j - 1]:
                pos += flow
            elif tp[j] < tp[j - 1]:
                neg += flow
        total = pos + neg
        out[t] = 0.0 if total < 1.0 else 100.0 * pos / total
    return out


def ref_rsi(close, period=14):
    n = len(close)
    out = [math.nan] * n
    if n <= period:
        return out
    gains = [max(close[t] - close[t - 1], 0.0) for t in range(1, n)]
    losses = [max(close[t - 1] - close[t], 0.0) for t in range(1, n)]
    ag = sum(gains[:period]) / period
    al = sum(losses[:period]) / period
    for t in range(period, n):
        if t > period:
            ag = (ag * (period - 1) + gains[t - 1]) / period
            al = (al * (period - 1) + losses[t - 1]) / period
        out[t] = 0.0 if ag + al < 1e-8 else 100.0 * ag / (ag + al)
    return out


def ref_atr(high, low, close, period=14):
    n = len(close)
    out = [math.nan] * n
    if n <= period:
        return out
    tr = [math.nan] * n
    for t in range(1, n):
        tr[t] = max(high[t] - low[t], abs(high[t] - close[t - 1]), abs(low[t] - close[t - 1]))
    a = sum(tr[1 : period + 1]) / period
    out[period] = a
    for t in range(period + 1, n):
        a = (a * (period - 1) + tr[t]) / period
        out[t] = a
    return out


def ref_co(high, low, close, volume, fast=3, slow=10):
    n = len(close)
    ad = [0.0] * n
    acc = 0.0
    for t in range(n):
        rng = high[t] - low[t]
        clv = ((close[t] - low[t]) - (high[t] - close[t])) / rng if rng > 0 else 0.0
        acc += clv * volume[t]
        ad[t] = acc
    out = [math.nan] * n
    kf, ks = 2.0 / (fast + 1.0), 2.0 / (slow + 1.0)
    fe = se = ad[0]
    for t in range(1, n):
        fe = fe + kf * (ad[t] - fe)
        se = se + ks * (ad[t] - se)
        if t >= slow - 1:
            out[t] = fe - se
    return out


def ref_obv(close, volume):
    out = [volume[0]]
    for t in range(1, len(close)):
        if close[t] > close[t - 1]:
            out.append(out[-1] + volume[t])
        elif close[t] < close[t - 1]:
            out.append(out[-1] - volume[t])
        else:
            out.append(out[-1])
    return out


def _assert_twin(prod, ref, rtol=1e-9, atol=1e-9):
    prod = np.asarray(prod, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    assert prod.shape == ref.shape
    np.testing.assert_array_equal(np.isnan(prod), np.isnan(ref))
    mask = ~np.isnan(ref)
    assert mask.any()
    np.testing.assert_allclose(prod[mask], ref[mask], rtol=rtol, atol=atol)


@pytest.fixture(scope="module")
def ohlcv():
    rng = np.random.default_rng(20240815)
    closes = gbm_closes(300, seed=11, drift=0.0004, vol=0.015)
    volume = 1e6 * (1.0 + rng.random(300))
    # A few flat closes so OBV/MFI hit the "unchanged" branch.
    closes[40] = closes[39]
    closes[41] = closes[40]
    return make_series("RAND", closes, volume=volume)


# ---------------------------------------------------------------------------
# brute-force twins on random data


class TestBruteForceTwins:
    def test_momentum(self, ohlcv):
        _assert_twin(momentum(ohlcv.close, 10), ref_mom(ohlcv.close, 10))

    def test_macd_triple(self, ohlcv):
        line, sig, hist = macd(ohlcv.close)
        rl, rs, rh = ref_macd(ohlcv.close)
        _assert_twin(line, rl)
        _assert_twin(hist, rh)
        # Signal is defined from full_start onward in both.
        mask = ~np.isnan(np.asarray(rs))
        np.testing.assert_allclose(np.asarray(sig)[mask], np.asarray(rs)[mask], rtol=1e-9)

    def test_mfi(self, ohlcv):
        prod = money_flow_index(ohlcv.high, ohlcv.low, ohlcv.close, ohlcv.volume, 14)
        _assert_twin(prod, ref_mfi(ohlcv.high, ohlcv.low, ohlcv.close, ohlcv.volume, 14))

    def test_rsi(self, ohlcv):
        _assert_twin(rsi(ohlcv.close, 14), ref_rsi(ohlcv.close, 14))

    def test_atr(self, ohlcv):
        _assert_twin(
            atr(ohlcv.high, ohlcv.low, ohlcv.close, 14),
            ref_atr(ohlcv.high, ohlcv.low, ohlcv.close, 14),
        )

    def test_natr_is_scaled_atr(self, ohlcv):
        a = atr(ohlcv.high, ohlcv.low, ohlcv.close, 14)
        n = natr(ohlcv.high, ohlcv.low, ohlcv.close, 14)
        mask = ~np.isnan(a)
        np.testing.assert_allclose(n[mask], 100.0 * a[mask] / ohlcv.close[mask], rtol=1e-12)

    def test_chaikin_oscillator(self, ohlcv):
        prod = chaikin_oscillator(ohlcv.high, ohlcv.low, ohlcv.close, ohlcv.volume)
        _assert_twin(prod, ref_co(ohlcv.high, ohlcv.low, ohlcv.close, ohlcv.volume))

    def test_obv(self, ohlcv):
        _assert_twin(
            on_balance_volume(ohlcv.close, ohlcv.volume),
            ref_obv(ohlcv.close, ohlcv.volume),
        )


# ---------------------------------------------------------------------------
# hand-computed examples


class TestHandExamples:
    def test_momentum_small(self):
        out = momentum(np.array([1.0, 2.0, 3.0, 4.0]), period=2)
        assert np.isnan(out[0]) and np.isnan(out[1])
        np.testing.assert_allclose(out[2:], [2.0, 2.0])

    def test_rsi_strictly_increasing_is_100(self):
        close = np.linspace(10.0, 40.0, 40)
        out = rsi(close, 14)
        np.testing.assert_allclose(out[14:], 100.0)

    def test_rsi_strictly_decreasing_is_0(self):
        close = np.linspace(40.0, 10.0, 40)
        out = rsi(close, 14)
        np.testing.assert_allclose(out[14:], 0.0)

    def test_rsi_constant_tail_hits_zero_denominator_guard(self):
        close = np.full(40, 25.0)
        out = rsi(close, 14)
        np.testing.assert_allclose(out[14:], 0.0)

    def test_obv_hand_case(self):
        close = np.array([10.0, 11.0, 10.0, 10.0])
        volume = np.array([5.0, 6.0, 7.0, 8.0])
        np.testing.assert_allclose(on_balance_volume(close, volume), [5.0, 11.0, 4.0, 4.0])

    def test_mfi_all_up_is_100(self):
        n = 30
        close = np.linspace(10.0, 20.0, n)
        high, low = close * 1.01, close * 0.99
        volume = np.full(n, 1000.0)
        out = money_flow_index(high, low, close, volume, 14)
        np.testing.assert_allclose(out[14:], 100.0)

    def test_mfi_tiny_flow_guard(self):
        # Sub-unit money flow trips the reference guard and yields 0.
        n = 30
        close = np.linspace(0.001, 0.002, n)
        high, low = close, close
        volume = np.full(n, 0.001)
        out = money_flow_index(high, low, close, volume, 14)
        np.testing.assert_allclose(out[14:], 0.0)

    def test_atr_constant_range(self):
        n = 30
        close = np.full(n, 10.0)
        high = np.full(n, 10.5)
        low = np.full(n, 9.5)
        out = atr(high, low, close, 14)
        np.testing.assert_allclose(out[14:], 1.0)

    def test_macd_constant_series_is_zero(self):
        close = np.full(60, 10.0)
        line, sig, hist = macd(close)
        np.testing.assert_allclose(line[33:], 0.0)
        np.testing.assert_allclose(hist[33:], 0.0)

    def test_macd_line_defined_from_bar_33(self):
        close = gbm_closes(60, seed=5)
        line, _, _ = macd(close)
        assert np.all(np.isnan(line[:33]))
        assert not np.isnan(line[33:]).any()

    def test_short_series_all_nan(self):
        close = gbm_closes(20, seed=5)
        line, sig, hist = macd(close)
        assert np.all(np.isnan(line))
        assert np.all(np.isnan(rsi(close[:10], 14)))
        assert np.all(np.isnan(atr(close[:10], close[:10] * 0.99, close[:10], 14)))


# ---------------------------------------------------------------------------
# z-scoring


class TestZscore:
    def test_three_points(self):
        out = zscore(np.array([1.0, 2.0, 3.0]))
        expected = 1.0 / math.sqrt(2.0 / 3.0)
        np.testing.assert_allclose(out, [-expected, 0.0, expected], rtol=1e-12)

    def test_population_moments(self):
        rng = np.random.default_rng(9)
        out = zscore(rng.random(200) * 5.0 + 3.0)
        assert abs(float(np.mean(out))) < 1e-12
        assert abs(float(np.std(out)) - 1.0) < 1e-12  # population std

    def test_constant_column_emits_zeros_with_warning(self):
        with pytest.warns(RuntimeWarning):
            out = zscore(np.full(10, 4.2))
        np.testing.assert_array_equal(out, np.zeros(10))

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            zscore(np.array([]))

    @given(
        st.lists(
            st.floats(min_value=-100, max_value=100), min_size=3, max_size=30
        ).filter(lambda xs: max(xs) - min(xs) > 1e-6),
        st.floats(min_value=0.1, max_value=10.0),
        st.floats(min_value=-50.0, max_value=50.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_affine_invariance(self, xs, a, b):
        x = np.asarray(xs)
        np.testing.assert_allclose(zscore(a * x + b), zscore(x), rtol=1e-6, atol=1e-9)


# ---------------------------------------------------------------------------
# assembled indicator table


class TestComputeIndicators:
    def test_column_order_and_warmup(self, ohlcv):
        table = compute_indicators(ohlcv)
        assert table.values.shape[1] == 11
        assert tuple(INDICATOR_ORDER) == (
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
        # The cycle-analysis columns dominate the warmup.
        assert table.warmup_len == 63
        assert table.values.shape[0] == len(ohlcv) - 63
        assert not np.isnan(table.values).any()

    def test_prefix_consistency(self, ohlcv):
        """Every column is causal: truncating the input reproduces a prefix."""
        full = compute_indicators(ohlcv)
        short = compute_indicators(ohlcv.tail(len(ohlcv)))  # same series
        np.testing.assert_array_equal(full.values, short.values)
        prefix_len = 200
        sliced = OhlcvSeries(
            symbol=ohlcv.symbol,
            dates=ohlcv.dates[:prefix_len],
            open=ohlcv.open[:prefix_len],
            high=ohlcv.high[:prefix_len],
            low=ohlcv.low[:prefix_len],
            close=ohlcv.close[:prefix_len],
            volume=ohlcv.volume[:prefix_len],
        )
        part = compute_indicators(sliced)
        assert part.warmup_len == full.warmup_len
        np.testing.assert_allclose(
            part.values, full.values[: part.values.shape[0]], rtol=1e-12, atol=1e-12
        )

    def test_zero_volume_rejected(self):
        s = make_series("Z", gbm_closes(120, seed=2), volume=np.zeros(120))
        with pytest.raises(DataError):
            compute_indicators(s)

    def test_too_short_series_rejected(self):
        s = make_series("Z", gbm_closes(50, seed=2))
        with pytest.raises(DataError):
            compute_indicators(s)

    def test_custom_periods_change_warmup(self, ohlcv):
        params = IndicatorParams(mom_period=5)
        table = compute_indicators(ohlcv, params)
        assert table.values.shape[1] == 11

    def test_normalize_table_zscores_every_column(self, ohlcv):
        table = normalize_table(compute_indicators(ohlcv))
        mats = table.values
        for j in range(mats.shape[1]):
            col = mats[:, j]
            assert abs(float(np.mean(col))) < 1e-10
            std = float(np.std(col))
            assert std == 0.0 or abs(std - 1.0) < 1e-10
