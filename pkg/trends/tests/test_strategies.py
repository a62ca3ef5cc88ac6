import numpy as np
from django.test import SimpleTestCase

from trends.exceptions import StrategyError
from trends.strategies import (
    PositionSeries,
    ensemble_positions,
    k_scan,
    preis_signal,
    preis_tstat,
)

from .factories import fridays, weekly


class PreisSignalTests(SimpleTestCase):
    def test_increasing_svi_is_always_short(self):
        positions = preis_signal(weekly(np.arange(1.0, 31.0), "flu"), 5)
        self.assertEqual(len(positions), 25)
        self.assertTrue(np.all(positions.weights == -1.0))

    def test_constant_svi_is_flat(self):
        positions = preis_signal(weekly([0.1] * 30), 10)
        self.assertTrue(np.all(positions.weights == 0.0))

    def test_hand_computed_example(self):
        svi = weekly([10.0, 20.0, 30.0, 20.0, 10.0])
        positions = preis_signal(svi, 2, asset="SPY")
        self.assertEqual(positions.asset, "SPY")
        self.assertEqual(positions.weeks, svi.weeks[2:])
        self.assertEqual(positions.weights.tolist(), [-1.0, 1.0, 1.0])

    def test_short_series_is_rejected(self):
        with self.assertRaisesMessage(StrategyError, "insufficient history"):
            preis_signal(weekly([1.0, 2.0]), 2)

    def test_positions_survive_affine_rescaling(self):
        rng = np.random.default_rng(7)
        svi = weekly(rng.integers(0, 101, size=60).astype(float))
        reference = preis_signal(svi, 10).weights
        for _ in range(1000):
            a = rng.uniform(0.1, 10.0)
            b = rng.uniform(-100.0, 100.0)
            self.assertTrue(np.array_equal(preis_signal(svi.scaled(a, b), 10).weights, reference))


class KScanTests(SimpleTestCase):
    def test_constant_svi_scores_zero(self):
        rng = np.random.default_rng(1)
        returns = weekly(rng.normal(0, 0.02, 60), "SPY")
        self.assertEqual(k_scan(weekly([50.0] * 60), returns, [10], 2.0), [(10, 0.0)])

    def test_scan_is_ordered_by_k_and_thread_independent(self):
        rng = np.random.default_rng(2)
        returns = weekly(rng.normal(0, 0.02, 120), "SPY")
        svi = weekly(rng.normal(50, 10, 120), "flu")
        single = k_scan(svi, returns, range(1, 21), 2.0)
        pooled = k_scan(svi, returns, range(1, 21), 2.0, threads=4)
        self.assertEqual([k for k, _ in single], list(range(1, 21)))
        self.assertEqual(single, pooled)

    def test_anti_predictor_scores_high_and_grows_with_history(self):
        rng = np.random.default_rng(3)
        n = 400
        returns = rng.normal(0, 0.02, n)
        # SVI jumps the week before a falling market
        svi = np.where(np.roll(returns, -1) < 0, 60.0, 40.0)
        t_long = preis_tstat(weekly(svi, "flu"), weekly(returns, "SPY"), 3, 2.0)
        t_short = preis_tstat(weekly(svi[:100], "flu"), weekly(returns[:100], "SPY"), 3, 2.0)
        self.assertGreater(t_short, 5.0)
        self.assertGreater(t_long, t_short)

    def test_k_beyond_history_is_rejected(self):
        with self.assertRaisesMessage(StrategyError, "k range exceeds available history"):
            k_scan(weekly([1.0] * 5), weekly([0.0] * 5), [5], 2.0)


class EnsembleTests(SimpleTestCase):
    def series(self, weights, asset="SPY"):
        return PositionSeries(asset, fridays(len(weights)), weights)

    def test_identical_signals(self):
        signal = self.series([1.0, -1.0, 0.0])
        self.assertEqual(ensemble_positions([signal, signal]).weights.tolist(), [1.0, -1.0, 0.0])

    def test_opposite_signals_cancel(self):
        result = ensemble_positions([self.series([1.0, 1.0]), self.series([-1.0, -1.0])])
        self.assertEqual(result.weights.tolist(), [0.0, 0.0])

    def test_mean_of_three(self):
        result = ensemble_positions([self.series([1.0]), self.series([1.0]), self.series([0.0])])
        self.assertAlmostEqual(result.weights[0], 2.0 / 3.0)

    def test_only_common_weeks_are_kept(self):
        long = self.series([1.0, 1.0, 1.0])
        short = PositionSeries("SPY", fridays(3)[1:], [-1.0, 1.0])
        result = ensemble_positions([long, short])
        self.assertEqual(result.weeks, fridays(3)[1:])
        self.assertEqual(result.weights.tolist(), [0.0, 1.0])

    def test_empty_and_mixed_inputs_are_rejected(self):
        with self.assertRaisesMessage(StrategyError, "empty signal list"):
            ensemble_positions([])
        with self.assertRaisesMessage(StrategyError, "mixed assets"):
            ensemble_positions([self.series([1.0]), self.series([1.0], asset="QQQ")])

    def test_weights_outside_unit_interval_are_rejected(self):
        with self.assertRaises(StrategyError):
            self.series([1.5])
