from datetime import date, timedelta

import numpy as np
from django.test import SimpleTestCase

from trends.exceptions import SeriesError
from trends.series import (
    FRIDAY,
    MONDAY,
    DailyPriceSeries,
    WeeklySeries,
    align,
    rolling_mean,
    rolling_median,
    week_key,
    weekly_return,
)

from .factories import (
    FIRST_FRIDAY,
    FIRST_MONDAY,
    fridays,
    random_walk_prices,
    trading_days,
    weekly,
)


class WeekKeyTests(SimpleTestCase):
    def test_weekend_maps_to_preceding_friday(self):
        self.assertEqual(week_key(date(2015, 1, 10)), date(2015, 1, 9))
        self.assertEqual(week_key(date(2015, 1, 11)), date(2015, 1, 9))

    def test_weekday_maps_to_friday_of_same_week(self):
        self.assertEqual(week_key(date(2015, 1, 5)), date(2015, 1, 9))
        self.assertEqual(week_key(date(2015, 1, 9)), date(2015, 1, 9))


class WeeklySeriesTests(SimpleTestCase):
    def test_rejects_non_finite_values(self):
        with self.assertRaisesMessage(SeriesError, "non-finite value"):
            weekly([1.0, np.nan])

    def test_rejects_off_grid_spacing(self):
        weeks = (FIRST_FRIDAY, FIRST_FRIDAY + timedelta(days=10))
        with self.assertRaisesMessage(SeriesError, "irregular spacing"):
            WeeklySeries("x", weeks, [1.0, 2.0])

    def test_values_are_read_only(self):
        s = weekly([1.0, 2.0])
        with self.assertRaises(ValueError):
            s.values[0] = 5.0

    def test_truncate_keeps_weeks_up_to_cut(self):
        s = weekly([1.0, 2.0, 3.0])
        self.assertEqual(s.truncate(s.weeks[1]).values.tolist(), [1.0, 2.0])


class WeeklyReturnTests(SimpleTestCase):
    def prices(self, closes_by_day):
        days = sorted(closes_by_day)
        return DailyPriceSeries("SPY", tuple(days), [closes_by_day[day] for day in days])

    def test_constant_prices_give_zero_returns(self):
        days = trading_days(6)
        returns = weekly_return(DailyPriceSeries("SPY", tuple(days), [100.0] * len(days)))
        self.assertEqual(len(returns), 6)
        self.assertTrue(np.all(returns.values == 0.0))
        self.assertEqual(returns.label, "SPY")

    def test_monday_to_friday_return(self):
        closes = dict(zip(trading_days(1), [100, 99, 100, 102, 101]))
        returns = weekly_return(self.prices(closes))
        self.assertEqual(returns.weeks, (FIRST_FRIDAY,))
        self.assertAlmostEqual(returns.values[0], 0.01)

    def test_friday_holiday_uses_thursday_close(self):
        closes = dict(zip(trading_days(1)[:4], [100, 101, 101.5, 102]))
        returns = weekly_return(self.prices(closes))
        self.assertAlmostEqual(returns.values[0], 0.02)

    def test_week_without_entry_close_is_a_gap(self):
        days = [day for day in trading_days(3) if day != FIRST_MONDAY + timedelta(days=7)]
        prices = DailyPriceSeries("SPY", tuple(days), np.linspace(100, 110, len(days)))
        returns = weekly_return(prices)
        week_two = FIRST_FRIDAY + timedelta(days=7)
        self.assertNotIn(week_two, returns.weeks)
        self.assertIn(week_two, returns.gaps)
        self.assertEqual(len(returns), 2)

    def test_full_week_mode_runs_monday_to_next_monday(self):
        mondays = [FIRST_MONDAY + timedelta(days=7 * i) for i in range(3)]
        closes = dict(zip(mondays, [100.0, 110.0, 121.0]))
        returns = weekly_return(self.prices(closes), entry_day=MONDAY, exit_day=MONDAY)
        self.assertEqual(returns.weeks, fridays(2))
        np.testing.assert_allclose(returns.values, [0.1, 0.1])

    def test_exit_before_entry_is_rejected(self):
        days = trading_days(1)
        with self.assertRaisesMessage(SeriesError, "exit day precedes entry day"):
            weekly_return(
                DailyPriceSeries("SPY", tuple(days), [100.0] * 5), entry_day=3, exit_day=1
            )

    def test_invalid_price_is_rejected(self):
        with self.assertRaisesMessage(SeriesError, "invalid price"):
            DailyPriceSeries("SPY", (FIRST_MONDAY,), [0.0])

    def test_empty_series_is_rejected(self):
        with self.assertRaisesMessage(SeriesError, "empty series"):
            DailyPriceSeries("SPY", (), [])

    def test_full_week_mode_on_a_complete_calendar_has_no_gaps(self):
        days = trading_days(10)
        closes = np.linspace(100.0, 120.0, len(days))
        with self.assertNoLogs("trends.series", level="WARNING"):
            returns = weekly_return(
                DailyPriceSeries("SPY", tuple(days), closes), entry_day=MONDAY, exit_day=MONDAY
            )
        self.assertEqual(returns.gaps, ())
        self.assertEqual(returns.weeks, fridays(9))

    def test_price_scale_does_not_change_returns(self):
        prices = random_walk_prices("SPY", 30, np.random.default_rng(4))
        for c in (0.01, 37.5):
            scaled = DailyPriceSeries("SPY", prices.dates, c * prices.closes)
            for entry_day, exit_day in ((MONDAY, FRIDAY), (MONDAY, MONDAY)):
                np.testing.assert_allclose(
                    weekly_return(scaled, entry_day, exit_day).values,
                    weekly_return(prices, entry_day, exit_day).values,
                    rtol=1e-12,
                    atol=1e-15,
                )


class RollingTests(SimpleTestCase):
    def test_constant_series_has_constant_mean(self):
        result = rolling_mean(weekly([4.0] * 10), 3)
        self.assertTrue(np.allclose(result.values, 4.0))

    def test_mean_uses_strictly_past_window(self):
        s = weekly([10.0, 20.0, 30.0])
        result = rolling_mean(s, 2)
        self.assertEqual(result.value_at(s.weeks[2]), 15.0)
        self.assertEqual(result.weeks[0], s.weeks[2])

    def test_window_equal_to_length_gives_one_point_after_the_end(self):
        s = weekly([1.0, 2.0, 6.0])
        result = rolling_mean(s, 3)
        self.assertEqual(len(result), 1)
        self.assertEqual(result.weeks[0], s.weeks[-1] + timedelta(days=7))
        self.assertEqual(result.values[0], 3.0)

    def test_median_examples(self):
        s = weekly([3.0, 1.0, 4.0])
        self.assertEqual(rolling_median(s, 3).values.tolist(), [3.0])
        self.assertEqual(rolling_median(weekly([1.0, 100.0]), 2).values.tolist(), [50.5])
        self.assertTrue(np.all(rolling_median(weekly([7.0] * 6), 4).values == 7.0))

    def test_window_longer_than_series_is_rejected(self):
        with self.assertRaisesMessage(SeriesError, "insufficient history"):
            rolling_mean(weekly([1.0, 2.0]), 3)

    def test_holes_are_rejected(self):
        weeks = (FIRST_FRIDAY, FIRST_FRIDAY + timedelta(days=14), FIRST_FRIDAY + timedelta(days=21))
        with self.assertRaisesMessage(SeriesError, "irregular spacing"):
            rolling_median(WeeklySeries("x", weeks, [1.0, 2.0, 3.0]), 2)

    def test_affine_maps_commute_with_rolling_statistics(self):
        s = weekly(np.random.default_rng(8).normal(50.0, 10.0, 40))
        for a, b in ((2.5, -3.0), (-1.5, 7.0)):
            for k in (1, 4, 9):
                np.testing.assert_allclose(
                    rolling_mean(s.scaled(a, b), k).values,
                    a * rolling_mean(s, k).values + b,
                    rtol=1e-12,
                )
                np.testing.assert_allclose(
                    rolling_median(s.scaled(a, b), k).values,
                    a * rolling_median(s, k).values + b,
                    rtol=1e-12,
                )


class AlignTests(SimpleTestCase):
    def test_identical_spans_are_unchanged(self):
        a, b = weekly([1.0, 2.0], "a"), weekly([3.0, 4.0], "b")
        left, right = align(a, b)
        self.assertEqual(left.weeks, a.weeks)
        self.assertEqual(right.values.tolist(), [3.0, 4.0])

    def test_overlap_is_kept(self):
        a = weekly(np.arange(10.0), "a")
        b = weekly(np.arange(11.0), "b", start=FIRST_FRIDAY + timedelta(days=28))
        left, right = align(a, b)
        self.assertEqual(left.weeks, a.weeks[4:])
        self.assertEqual(right.weeks, a.weeks[4:])
        self.assertEqual(left.values.tolist(), list(range(4, 10)))
        self.assertEqual(right.values.tolist(), list(range(6)))

    def test_disjoint_spans_are_rejected(self):
        a = weekly([1.0], "a")
        b = weekly([1.0], "b", start=FIRST_FRIDAY + timedelta(days=70))
        with self.assertRaisesMessage(SeriesError, "disjoint spans"):
            align(a, b)

    def test_align_is_idempotent_and_symmetric(self):
        a = weekly(np.arange(12.0), "a")
        b = weekly(np.arange(20.0, 29.0), "b", start=FIRST_FRIDAY + timedelta(days=35))
        left, right = align(a, b)
        again_left, again_right = align(left, right)
        self.assertEqual(again_left.weeks, left.weeks)
        self.assertEqual(again_left.values.tolist(), left.values.tolist())
        self.assertEqual(again_right.values.tolist(), right.values.tolist())
        swapped_right, swapped_left = align(b, a)
        self.assertEqual(swapped_left.weeks, left.weeks)
        self.assertEqual(swapped_left.values.tolist(), left.values.tolist())
        self.assertEqual(swapped_right.values.tolist(), right.values.tolist())
