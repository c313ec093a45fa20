"""Loader, alignment, returns, and summary statistics."""

from __future__ import annotations

from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rrltrade.data import (
    OhlcvPanel,
    OhlcvSeries,
    align,
    load_ohlcv,
    simple_returns,
    summary_stats,
)
from rrltrade.errors import DataError

from conftest import DATA_DIR, OHLCV_HEADER, business_dates, make_series, write_csv


def _rows(cells: list[list[str]]) -> list[list[str]]:
    return [OHLCV_HEADER] + cells


def _cell_row(day: int, close: str, volume: str = "1000") -> list[str]:
    return [f"2020-01-{day:02d}", close, close, close, close, volume]


class TestLoadOhlcv:
    def test_clean_file_keeps_every_row(self, tmp_path):
        rows = _rows([_cell_row(d, "10.5") for d in (6, 7, 8, 9, 10)])
        series = load_ohlcv(write_csv(tmp_path / "a.csv", rows), symbol="A")
        assert len(series) == 5
        assert series.symbol == "A"
        assert series.dates[0] == date(2020, 1, 6)

    def test_null_close_row_is_dropped(self, tmp_path):
        # 5 rows with one unparseable Close leave exactly 4 usable rows.
        rows = _rows(
            [
                _cell_row(6, "10.0"),
                _cell_row(7, "11.0"),
                ["2020-01-08", "11.0", "11.0", "11.0", "null", "1000"],
                _cell_row(9, "12.0"),
                _cell_row(10, "13.0"),
            ]
        )
        series = load_ohlcv(write_csv(tmp_path / "a.csv", rows))
        assert len(series) == 4
        np.testing.assert_allclose(series.close, [10.0, 11.0, 12.0, 13.0])

    @pytest.mark.parametrize("token", ["", "NA", "n/a", "NaN", "None", "#N/A", "missing"])
    def test_na_token_variants_drop_the_row(self, tmp_path, token):
        rows = _rows(
            [
                _cell_row(6, "10.0"),
                ["2020-01-07", "10.0", "10.0", "10.0", token, "1000"],
                _cell_row(8, "12.0"),
            ]
        )
        series = load_ohlcv(write_csv(tmp_path / "a.csv", rows))
        assert len(series) == 2

    def test_dropping_never_reorders_dates(self, tmp_path):
        rows = _rows(
            [
                _cell_row(6, "10.0"),
                ["2020-01-07", "x", "10.0", "10.0", "10.0", "1000"],
                _cell_row(8, "12.0"),
                ["2020-01-09", "10.0", "10.0", "10.0", "10.0", "bad"],
                _cell_row(10, "14.0"),
            ]
        )
        series = load_ohlcv(write_csv(tmp_path / "a.csv", rows))
        assert list(series.dates) == [date(2020, 1, 6), date(2020, 1, 8), date(2020, 1, 10)]

    def test_all_rows_unusable_is_an_error(self, tmp_path):
        rows = _rows([["2020-01-06", "", "", "", "", ""]])
        with pytest.raises(DataError):
            load_ohlcv(write_csv(tmp_path / "a.csv", rows))

    def test_missing_column_is_an_error(self, tmp_path):
        rows = [["Date", "Open", "High", "Low", "Close"], ["2020-01-06", "1", "1", "1", "1"]]
        with pytest.raises(DataError):
            load_ohlcv(write_csv(tmp_path / "a.csv", rows))

    def test_missing_file_is_an_error(self, tmp_path):
        with pytest.raises(DataError):
            load_ohlcv(tmp_path / "absent.csv")

    def test_non_increasing_dates_rejected(self, tmp_path):
        rows = _rows([_cell_row(7, "10.0"), _cell_row(6, "11.0")])
        with pytest.raises(DataError):
            load_ohlcv(write_csv(tmp_path / "a.csv", rows))

    def test_duplicate_date_rejected(self, tmp_path):
        rows = _rows([_cell_row(6, "10.0"), _cell_row(6, "11.0")])
        with pytest.raises(DataError):
            load_ohlcv(write_csv(tmp_path / "a.csv", rows))

    def test_adjusted_close_substitution(self, tmp_path):
        header = OHLCV_HEADER + ["Adj Close"]
        rows = [header] + [
            ["2020-01-06", "10", "10", "10", "10", "1000", "9.5"],
            ["2020-01-07", "11", "11", "11", "11", "1000", "10.45"],
        ]
        path = write_csv(tmp_path / "a.csv", rows)
        plain = load_ohlcv(path)
        adj = load_ohlcv(path, use_adjusted_close=True)
        np.testing.assert_allclose(plain.close, [10.0, 11.0])
        np.testing.assert_allclose(adj.close, [9.5, 10.45])

    def test_adjusted_close_flag_requires_the_column(self, tmp_path):
        rows = _rows([_cell_row(6, "10.0")])
        with pytest.raises(DataError):
            load_ohlcv(write_csv(tmp_path / "a.csv", rows), use_adjusted_close=True)

    def test_symbol_defaults_to_file_stem(self, tmp_path):
        rows = _rows([_cell_row(6, "10.0"), _cell_row(7, "11.0")])
        series = load_ohlcv(write_csv(tmp_path / "TICK.csv", rows))
        assert series.symbol == "TICK"

    def test_bundled_file_with_na_cells(self):
        # BLYT.csv ships with deliberate NA warts; they must drop cleanly.
        series = load_ohlcv(DATA_DIR / "BLYT.csv")
        assert len(series) == 2013 - 6
        assert all(a < b for a, b in zip(series.dates, series.dates[1:]))


class TestSeriesInvariants:
    def test_non_positive_close_rejected(self):
        with pytest.raises(DataError):
            make_series("A", np.array([10.0, 0.0, 11.0]))

    def test_negative_volume_rejected(self):
        with pytest.raises(DataError):
            make_series("A", np.array([10.0, 11.0]), volume=np.array([1.0, -1.0]))

    def test_length_mismatch_rejected(self):
        dates = business_dates(3)
        with pytest.raises(DataError):
            OhlcvSeries(
                symbol="A",
                dates=dates,
                open=np.ones(3),
                high=np.ones(3),
                low=np.ones(3),
                close=np.ones(2),
                volume=np.ones(3),
            )

    def test_tail_keeps_the_last_rows(self):
        s = make_series("A", np.linspace(10, 20, 11))
        t = s.tail(4)
        assert len(t) == 4
        np.testing.assert_allclose(t.close, s.close[-4:])
        assert t.dates == s.dates[-4:]


class TestAlign:
    def test_equal_lengths_pass_through(self):
        a = make_series("A", np.linspace(10, 11, 5))
        b = make_series("B", np.linspace(20, 21, 5))
        panel = align([a, b])
        assert panel.length == 5
        assert panel.symbols == ("A", "B")

    def test_positional_truncates_to_shortest_keeping_tails(self):
        # Lengths 2013 and 2000 leave a 2000-row panel ending on each
        # series' final row.
        a = make_series("A", np.linspace(10, 30, 2013))
        b = make_series("B", np.linspace(40, 60, 2000))
        panel = align([a, b])
        assert panel.length == 2000
        np.testing.assert_allclose(panel.series[0].close, a.close[-2000:])
        np.testing.assert_allclose(panel.series[1].close, b.close)

    def test_intersect_keeps_only_shared_dates(self):
        a = make_series("A", np.linspace(10, 11, 6))
        full = make_series("B", np.linspace(20, 21, 6))
        # Drop B's third row to force a date mismatch.
        keep = [0, 1, 3, 4, 5]
        b = OhlcvSeries(
            symbol="B",
            dates=tuple(full.dates[i] for i in keep),
            open=full.open[keep],
            high=full.high[keep],
            low=full.low[keep],
            close=full.close[keep],
            volume=full.volume[keep],
        )
        panel = align([a, b], mode="intersect")
        assert panel.length == 5
        assert panel.series[0].dates == b.dates

    def test_duplicate_symbols_rejected(self):
        a = make_series("A", np.linspace(10, 11, 5))
        with pytest.raises(DataError):
            align([a, a])

    def test_empty_input_rejected(self):
        with pytest.raises(DataError):
            align([])

    def test_unknown_mode_rejected(self):
        a = make_series("A", np.linspace(10, 11, 5))
        with pytest.raises(DataError):
            align([a], mode="resample")


class TestSimpleReturns:
    def test_hand_values(self):
        panel = align([make_series("A", np.array([100.0, 110.0, 55.0]))])
        rets = simple_returns(panel)
        np.testing.assert_allclose(rets.values[:, 0], [0.10, -0.5])

    def test_constant_prices_give_zero(self):
        panel = align([make_series("A", np.full(10, 42.0))])
        assert np.all(simple_returns(panel).values == 0.0)

    def test_single_row_panel_rejected(self):
        panel = align([make_series("A", np.array([100.0]))])
        with pytest.raises(DataError):
            simple_returns(panel)

    @given(
        st.lists(st.floats(min_value=0.5, max_value=500.0), min_size=2, max_size=40)
    )
    @settings(max_examples=60, deadline=None)
    def test_round_trip_reconstructs_prices(self, prices):
        closes = np.asarray(prices, dtype=np.float64)
        panel = align([make_series("A", closes)])
        rets = simple_returns(panel).values[:, 0]
        rebuilt = closes[0] * np.cumprod(1.0 + rets)
        np.testing.assert_allclose(rebuilt, closes[1:], rtol=1e-12, atol=1e-12)


class TestSummaryStats:
    def test_hand_values(self):
        panel = align([make_series("A", np.array([1.0, 2.0, 3.0]))])
        stats = summary_stats(panel)["A"]
        assert stats["mean"] == pytest.approx(2.0)
        assert stats["std"] == pytest.approx(1.0)  # sample std, ddof=1
        assert stats["min"] == 1.0
        assert stats["max"] == 3.0
        assert stats["range"] == pytest.approx(2.0)

    def test_constant_series(self):
        panel = align([make_series("A", np.full(5, 7.0))])
        stats = summary_stats(panel)["A"]
        assert stats["std"] == 0.0
        assert stats["range"] == 0.0

    def test_oracle_against_numpy(self):
        rng = np.random.default_rng(3)
        closes = 50.0 + 10.0 * rng.random(40)
        panel = align([make_series("A", closes)])
        stats = summary_stats(panel)["A"]
        assert stats["mean"] == pytest.approx(float(np.mean(closes)), rel=1e-12)
        assert stats["std"] == pytest.approx(float(np.std(closes, ddof=1)), rel=1e-12)
