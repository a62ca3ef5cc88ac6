import tempfile
from datetime import timedelta
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from trends.exceptions import IngestError, SeriesError
from trends.ingest import (
    RawSviWindow,
    load_keyword_set,
    parse_price_csv,
    parse_svi_csv,
    stitch_windows,
)

from .factories import FIRST_FRIDAY, fridays


def svi_csv(rows):
    return ("week_end,value\n" + "".join(f"{day},{value}\n" for day, value in rows)).encode()


def window(values, offset=0, keyword="flu"):
    weeks = fridays(offset + len(values))[offset:]
    return RawSviWindow(keyword, weeks, tuple(values))


class ParseSviTests(SimpleTestCase):
    def test_well_formed_file(self):
        saturdays = [FIRST_FRIDAY + timedelta(days=1 + 7 * i) for i in range(10)]
        rows = [(day.isoformat(), value) for day, value in zip(saturdays, range(10, 101, 10))]
        result = parse_svi_csv(svi_csv(rows), "flu")
        self.assertEqual(len(result.values), 10)
        self.assertEqual(result.weeks[0], FIRST_FRIDAY)
        self.assertTrue(result.has_peak)

    def test_value_above_hundred_is_rejected(self):
        with self.assertRaisesMessage(IngestError, "out-of-range SVI"):
            parse_svi_csv(svi_csv([("2015-01-10", 100), ("2015-01-17", 101)]))

    def test_two_week_gap_is_rejected(self):
        with self.assertRaisesMessage(IngestError, "irregular spacing"):
            parse_svi_csv(svi_csv([("2015-01-10", 100), ("2015-01-24", 50)]))

    def test_below_one_marker_reads_as_zero(self):
        result = parse_svi_csv(svi_csv([("2015-01-10", "<1"), ("2015-01-17", 100)]))
        self.assertEqual(result.values, (0, 100))

    def test_fractional_value_is_rejected(self):
        with self.assertRaisesMessage(IngestError, "invalid SVI value"):
            parse_svi_csv(svi_csv([("2015-01-10", 12.5), ("2015-01-17", 100)]))

    def test_window_without_peak_is_accepted_with_a_warning(self):
        with self.assertLogs("trends.ingest", level="WARNING"):
            result = parse_svi_csv(svi_csv([("2015-01-10", 40), ("2015-01-17", 60)]), "flu")
        self.assertFalse(result.has_peak)

    def test_missing_column_is_rejected(self):
        with self.assertRaisesMessage(IngestError, "missing CSV columns"):
            parse_svi_csv(b"date,value\n2015-01-10,1\n")


class ParsePriceTests(SimpleTestCase):
    def test_extra_columns_are_ignored(self):
        data = b"date,open,close\n2015-01-05,1,100\n2015-01-06,1,101.5\n"
        prices = parse_price_csv(data, "SPY")
        self.assertEqual(prices.closes.tolist(), [100.0, 101.5])

    def test_non_numeric_close_is_an_invalid_price(self):
        with self.assertRaisesMessage(SeriesError, "invalid price"):
            parse_price_csv(b"date,close\n2015-01-05,abc\n", "SPY")

    def test_negative_close_is_an_invalid_price(self):
        with self.assertRaisesMessage(SeriesError, "invalid price"):
            parse_price_csv(b"date,close\n2015-01-05,-3\n", "SPY")

    def test_header_only_is_an_empty_series(self):
        with self.assertRaisesMessage(SeriesError, "empty series"):
            parse_price_csv(b"date,close\n", "SPY")


class KeywordSetTests(SimpleTestCase):
    def setUp(self):
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        self.tmp = Path(directory.name)

    def test_ailments(self):
        ailments = load_keyword_set("ailments")
        self.assertEqual(len(ailments), 200)
        self.assertIn("Multiple sclerosis", ailments.keywords)
        self.assertIn("Bone cancer", ailments.keywords)

    def test_arcade_games(self):
        games = load_keyword_set("arcade_games")
        self.assertIn("Moon Patrol", games.keywords)
        self.assertIn("Moon Buggy", games.keywords)
        self.assertIn("Q*bert", games.keywords)

    def test_repeated_keywords_are_dropped(self):
        with self.assertLogs("trends.ingest", level="WARNING") as logs:
            cars = load_keyword_set("classic_cars")
        self.assertEqual(len(cars), 82)
        self.assertEqual(len(set(cars.keywords)), 82)
        self.assertEqual(len(logs.records), 2)

    def test_user_file(self):
        path = self.tmp / "mine.txt"
        path.write_text("alpha\n\nbeta\n", encoding="utf-8")
        result = load_keyword_set(str(path))
        self.assertEqual(result.name, "mine")
        self.assertEqual(result.keywords, ("alpha", "beta"))

    def test_empty_user_file_is_rejected(self):
        path = self.tmp / "empty.txt"
        path.write_text("\n", encoding="utf-8")
        with self.assertRaisesMessage(IngestError, "empty keyword set"):
            load_keyword_set(str(path))

    def test_unknown_set_is_rejected(self):
        with self.assertRaisesMessage(IngestError, "unknown keyword set"):
            load_keyword_set(str(self.tmp / "nope.txt"))


class StitchTests(SimpleTestCase):
    def setUp(self):
        self.truth = 50.0 + 30.0 * np.sin(np.arange(100) / 7.0)

    def windows(self, rounded):
        result = []
        for start, stop in ((0, 60), (40, 100)):
            part = 100.0 * (self.truth[start:stop] / self.truth[start:stop].max())
            if rounded:
                part = np.round(part)
            result.append(window(part, offset=start))
        return result

    def test_single_window_is_returned_unchanged(self):
        only = window([10, 100, 55])
        stitched = stitch_windows([only])
        self.assertEqual(stitched.series.values.tolist(), [10.0, 100.0, 55.0])
        self.assertEqual(stitched.scales, (1.0,))
        self.assertEqual(stitched.windows_used, 1)
        self.assertEqual(stitched.overlap_fit_error, 0.0)

    def test_exact_windows_recover_the_truth_up_to_scale(self):
        stitched = stitch_windows(self.windows(rounded=False))
        ratio = stitched.series.values / self.truth
        np.testing.assert_allclose(ratio, ratio[0], rtol=1e-9)
        self.assertLess(stitched.overlap_fit_error, 1e-9)
        self.assertEqual(len(stitched.series), 100)

    def test_rounded_windows_stay_close_to_the_truth(self):
        stitched = stitch_windows(self.windows(rounded=True))
        correlation = np.corrcoef(stitched.series.values, self.truth)[0, 1]
        self.assertGreaterEqual(correlation, 0.99)
        expected_scale = self.truth[40:100].max() / self.truth[0:60].max()
        self.assertAlmostEqual(stitched.scales[1] / expected_scale, 1.0, delta=0.05)

    def test_window_order_does_not_matter(self):
        forward = stitch_windows(self.windows(rounded=True))
        backward = stitch_windows(list(reversed(self.windows(rounded=True))))
        self.assertTrue(np.array_equal(forward.series.values, backward.series.values))

    def test_long_history_from_five_windows(self):
        rng = np.random.default_rng(40)
        truth = 60.0 + 25.0 * np.sin(np.arange(400) / 15.0) + rng.normal(0.0, 2.0, 400)
        spans = [(78 * i, min(78 * i + 90, 400)) for i in range(5)]
        peaks = [truth[start:stop].max() for start, stop in spans]
        windows = [
            window(np.round(100.0 * truth[start:stop] / peak), offset=start)
            for (start, stop), peak in zip(spans, peaks)
        ]
        stitched = stitch_windows(windows, min_overlap=12)
        self.assertEqual(len(stitched.series), 400)
        self.assertEqual(stitched.windows_used, 5)
        self.assertGreaterEqual(np.corrcoef(stitched.series.values, truth)[0, 1], 0.99)
        for scale, peak in zip(stitched.scales, peaks):
            self.assertAlmostEqual(scale / (peak / peaks[0]), 1.0, delta=0.05)

    def test_short_overlap_is_rejected(self):
        windows = [window([100] * 20), window([100] * 25, offset=15)]
        with self.assertRaisesMessage(IngestError, "insufficient overlap"):
            stitch_windows(windows)

    def test_zero_overlap_is_degenerate(self):
        windows = [window([100] * 10 + [0] * 10), window([0] * 10 + [100] * 10, offset=10)]
        with self.assertRaisesMessage(IngestError, "degenerate overlap"):
            stitch_windows(windows)
