"""
Walk-forward ensemble learner.

Every decision week is predicted by bagged, depth-limited regression trees
trained on the preceding calibration rows only. Splits are placed at order
statistics of the feature columns, so the fitted trees depend on the rank
order of each feature and not on its scale.
"""

import logging
import zlib
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .exceptions import ConfigError, LearnerError
from .parallel import ordered_map
from .series import WeeklySeries
from .strategies import PositionSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WalkForwardConfig:
    """
    Parameters of the sliding in-sample / out-of-sample learner.

    Attributes:
    calibration_weeks (int): Number of past rows each model is trained on.
    retrain_every (int): Decision weeks between two retrains; models are reused in between.
    ensemble_size (int): Number of bagged trees.
    tree_depth (int): Maximum depth of each tree.
    subsample_fraction (float): Bootstrap sample size as a fraction of the training rows.
    seed (int): Root of every random draw.
    split_quantiles (int): Candidate thresholds per feature are its 1/Q ... (Q-1)/Q quantiles.
    """

    calibration_weeks: int = 26
    retrain_every: int = 1
    ensemble_size: int = 100
    tree_depth: int = 2
    subsample_fraction: float = 0.8
    seed: int = 0
    split_quantiles: int = 10

    def __post_init__(self):
        errors = []
        if self.calibration_weeks < 10:
            errors.append({"field": "calibration_weeks", "message": "must be at least 10"})
        if self.retrain_every < 1:
            errors.append({"field": "retrain_every", "message": "must be at least 1"})
        if self.ensemble_size < 1:
            errors.append({"field": "ensemble_size", "message": "must be at least 1"})
        if self.tree_depth < 1:
            errors.append({"field": "tree_depth", "message": "must be at least 1"})
        if not 0 < self.subsample_fraction <= 1:
            errors.append({"field": "subsample_fraction", "message": "must be in (0, 1]"})
        if self.seed < 0:
            errors.append({"field": "seed", "message": "must be non-negative"})
        if self.split_quantiles < 2:
            errors.append({"field": "split_quantiles", "message": "must be at least 2"})
        if errors:
            raise ConfigError("invalid walk-forward configuration", errors=errors)

    def as_dict(self):
        return asdict(self)


def tree_rng(seed, asset, week, tree_index):
    """
    Counter-based generator for one tree of one retrain.

    The stream depends only on (seed, asset, week, tree index), so trees can
    be trained in any order or on any thread and still draw the same samples.
    """
    key = np.random.SeedSequence(
        [seed, zlib.crc32(asset.encode("utf-8")), week.toordinal(), tree_index]
    )
    return np.random.Generator(np.random.Philox(key))


# ---------------------------- Trees ----------------------------


@dataclass(frozen=True)
class _Node:
    value: float
    feature: int = -1
    threshold: float = 0.0
    left: Optional["_Node"] = None
    right: Optional["_Node"] = None

    @property
    def is_leaf(self):
        return self.left is None


class QuantileTree:
    """Least-squares regression tree splitting on `x <= threshold` at empirical quantiles."""

    def __init__(self, depth=2, split_quantiles=10):
        self.depth = depth
        self.levels = np.arange(1, split_quantiles) / split_quantiles
        self.root = None

    def fit(self, X, y):
        self.root = self._grow(np.asarray(X, dtype=np.float64), np.asarray(y, dtype=np.float64), 0)
        return self

    def _grow(self, X, y, depth):
        node = _Node(value=float(y.mean()))
        if depth >= self.depth or len(y) < 2:
            return node
        split = self._best_split(X, y)
        if split is None:
            return node
        feature, threshold = split
        mask = X[:, feature] <= threshold
        return _Node(
            value=node.value,
            feature=feature,
            threshold=threshold,
            left=self._grow(X[mask], y[mask], depth + 1),
            right=self._grow(X[~mask], y[~mask], depth + 1),
        )

    def _best_split(self, X, y):
        n = len(y)
        best_sse = float(np.sum((y - y.mean()) ** 2))
        best = None
        for feature in range(X.shape[1]):
            column = X[:, feature]
            order = np.argsort(column, kind="stable")
            sorted_x = column[order]
            sums = np.cumsum(y[order])
            squares = np.cumsum(y[order] ** 2)
            thresholds = np.unique(np.quantile(column, self.levels, method="lower"))
            for threshold in thresholds:
                count = int(np.searchsorted(sorted_x, threshold, side="right"))
                if count == 0 or count == n:
                    continue
                left_sum, left_sq = sums[count - 1], squares[count - 1]
                right_sum, right_sq = sums[-1] - left_sum, squares[-1] - left_sq
                sse = (left_sq - left_sum**2 / count) + (right_sq - right_sum**2 / (n - count))
                if sse < best_sse:
                    best_sse, best = sse, (feature, float(threshold))
        return best

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.empty(len(X))
        for row, x in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if x[node.feature] <= node.threshold else node.right
            out[row] = node.value
        return out

    def vote(self, X):
        return np.sign(self.predict(X))


class BaggedQuantileTrees:
    """Bootstrap aggregate of QuantileTree models voting by the sign of their prediction."""

    def __init__(self, cfg, threads=1):
        self.cfg = cfg
        self.threads = threads
        self.trees = []

    def fit(self, X, y, asset, week):
        n = len(y)
        size = max(1, int(round(self.cfg.subsample_fraction * n)))

        def grow(tree_index):
            rng = tree_rng(self.cfg.seed, asset, week, tree_index)
            rows = rng.integers(0, n, size=size)
            tree = QuantileTree(self.cfg.tree_depth, self.cfg.split_quantiles)
            return tree.fit(X[rows], y[rows])

        self.trees = ordered_map(grow, range(self.cfg.ensemble_size), self.threads)
        return self

    def position(self, x):
        """Mean vote of the trees for one row, clamped to [-1, +1]."""
        votes = np.array([tree.vote(x)[0] for tree in self.trees])
        return float(np.clip(votes.mean(), -1.0, 1.0))


# ---------------------------- Walk Forward ----------------------------


def walk_forward(fm, cfg, threads=1, model_factory=BaggedQuantileTrees):
    """
    Runs the learner over a FeatureMatrix with sliding calibration windows.

    Row i (i >= calibration_weeks) is predicted by a model trained on rows
    i - calibration_weeks ... i - 1, whose targets are all realized by the
    decision week of row i. Labels are sign(target). A model is retrained on
    rows calibration_weeks, calibration_weeks + retrain_every, ... and reused
    in between.

    Parameters:
    fm (FeatureMatrix): Causal learner inputs of one asset.
    cfg (WalkForwardConfig): Learner parameters.
    threads (int): Worker threads used to grow trees.
    model_factory (callable): Builds a model from (cfg, threads=...); the model
        exposes fit(X, y, asset, week) and position(x).

    Returns:
    PositionSeries: One position per out-of-sample decision week.
    """
    cal = cfg.calibration_weeks
    if len(fm) < cal + 1:
        raise LearnerError("insufficient rows", asset=fm.asset, rows=len(fm), required=cal + 1)

    labels = np.sign(fm.target)
    model = None
    positions = []
    for i in range(cal, len(fm)):
        if (i - cal) % cfg.retrain_every == 0:
            model = model_factory(cfg, threads=threads)
            model.fit(fm.X[i - cal : i], labels[i - cal : i], fm.asset, fm.weeks[i])
        positions.append(model.position(fm.X[i : i + 1]))
    logger.debug("%s: %d out-of-sample week(s)", fm.asset, len(positions))
    return PositionSeries(fm.asset, fm.weeks[cal:], np.array(positions))


def out_of_sample_returns(fm, positions):
    """Per-week return of trading `positions` on the matrix's targets (no costs)."""
    index = {week: row for row, week in enumerate(fm.weeks)}
    rows = [index[week] for week in positions.weeks]
    return WeeklySeries(fm.asset, positions.weeks, positions.weights * fm.target[rows])


# ---------------------------- Anti Look-ahead ----------------------------


@dataclass(frozen=True)
class LookaheadReport:
    horizon_cut: object
    compared: int = 0
    mismatches: tuple = ()

    @property
    def ok(self):
        return not self.mismatches


def anti_lookahead_check(fm, cfg, horizon_cut, walker=walk_forward):
    """
    Compares positions computed with and without the rows from `horizon_cut` on.

    Positions of decision weeks before the cut must be bitwise identical.
    A cut leaving fewer rows than one calibration window makes the check
    vacuous.

    Parameters:
    fm (FeatureMatrix): Learner inputs.
    cfg (WalkForwardConfig): Learner parameters.
    horizon_cut (datetime.date): First decision week withheld from the truncated run.
    walker (callable): Function (fm, cfg) -> PositionSeries under test.

    Returns:
    LookaheadReport: Decision weeks whose positions differ.
    """
    try:
        truncated = walker(fm.truncate(horizon_cut), cfg)
    except LearnerError:
        return LookaheadReport(horizon_cut)
    full = walker(fm, cfg)
    full_weights = dict(zip(full.weeks, full.weights))
    mismatches = []
    for week, weight in zip(truncated.weeks, truncated.weights):
        other = full_weights.get(week)
        if other is None or other != weight:
            mismatches.append(week)
    if mismatches:
        logger.warning(
            "%s: %d look-ahead mismatch(es) before %s", fm.asset, len(mismatches), horizon_cut
        )
    return LookaheadReport(horizon_cut, len(truncated), tuple(mismatches))
