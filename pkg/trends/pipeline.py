"""
Batch pipelines behind the management commands.

Each pipeline checks that every input it needs exists before starting any
computation, then writes its reports under the configured output directory
and returns the written paths.
"""

import logging
from dataclasses import replace
from itertools import combinations

from django.utils.text import slugify

from . import reports
from .backtest import equity_curve, priced_positions, run_backtest
from .calibration import null_calibration
from .exceptions import InputError, TrendsError
from .features import build_features, leakage_audit
from .ingest import KeywordSet, load_keyword_set, parse_price_csv, parse_svi_csv, stitch_windows
from .learner import anti_lookahead_check, walk_forward
from .parallel import ordered_map
from .series import weekly_return
from .stats import perf_stats, wilcoxon_ranksum
from .strategies import ensemble_positions, k_scan, preis_signal

logger = logging.getLogger(__name__)


# ---------------------------- Inputs ----------------------------


def price_path(cfg, asset):
    return cfg.price_dir / f"{asset}.csv"


def svi_source(cfg, keyword):
    """Single export `<slug>.csv` or a `<slug>/` directory of windows, whichever exists."""
    if cfg.svi_dir is None:
        return None
    slug = slugify(keyword)
    directory = cfg.svi_dir / slug
    if directory.is_dir():
        return directory
    path = cfg.svi_dir / f"{slug}.csv"
    return path if path.is_file() else None


def load_keyword_sets(cfg):
    sets, errors = [], []
    for name in cfg.keyword_sets:
        try:
            sets.append(load_keyword_set(name))
        except TrendsError as exc:
            errors.extend(exc.records())
    if errors:
        raise InputError("invalid keyword sets", errors=errors)
    return sets


def check_inputs(cfg, assets=(), keywords=()):
    """
    Fails fast with the complete list of missing price and SVI files.

    Raises:
    InputError: One record per missing input.
    """
    errors = []
    if not cfg.price_dir.is_dir() and assets:
        errors.append({"message": "missing price directory", "path": str(cfg.price_dir)})
    else:
        for asset in assets:
            path = price_path(cfg, asset)
            if not path.is_file():
                errors.append({"message": "missing price file", "asset": asset, "path": str(path)})
    if keywords and (cfg.svi_dir is None or not cfg.svi_dir.is_dir()):
        errors.append(
            {"message": "missing SVI directory", "path": str(cfg.svi_dir) if cfg.svi_dir else None}
        )
    elif keywords:
        for keyword in keywords:
            if svi_source(cfg, keyword) is None:
                errors.append(
                    {
                        "message": "missing SVI data",
                        "keyword": keyword,
                        "path": str(cfg.svi_dir / slugify(keyword)),
                    }
                )
    if errors:
        raise InputError("missing input data", errors=errors)


def load_returns(cfg, asset):
    prices = parse_price_csv(price_path(cfg, asset), asset)
    return weekly_return(prices, cfg.entry_day, cfg.exit_day)


def load_svi_windows(cfg, keyword):
    source = svi_source(cfg, keyword)
    paths = sorted(source.glob("*.csv")) if source.is_dir() else [source]
    if not paths:
        raise InputError(
            "missing input data",
            errors=[{"message": "missing SVI data", "keyword": keyword, "path": str(source)}],
        )
    return [parse_svi_csv(path, keyword) for path in paths]


def load_svi(cfg, keyword):
    """Stitched SVI of one keyword (a single export stitches to itself)."""
    return stitch_windows(load_svi_windows(cfg, keyword), cfg.min_overlap)


def _usable_ks(svi, ks):
    usable = [k for k in ks if k < len(svi)]
    if len(usable) < len(ks):
        logger.warning(
            "%s: %d value(s) of k skipped, only %d week(s) of SVI",
            svi.label,
            len(ks) - len(usable),
            len(svi),
        )
    return usable


def _set_svis(cfg, keyword_set):
    return ordered_map(lambda keyword: load_svi(cfg, keyword).series, keyword_set, cfg.threads)


# ---------------------------- Pipelines ----------------------------


def run_null_calibration(cfg):
    """T-stats of the moving-average rule per keyword of every keyword set."""
    keyword_sets = load_keyword_sets(cfg)
    keywords = [keyword for keyword_set in keyword_sets for keyword in keyword_set]
    check_inputs(cfg, assets=[cfg.target_asset], keywords=keywords)

    returns = load_returns(cfg, cfg.target_asset)
    written = []
    for keyword_set in keyword_sets:
        logger.info("null calibration: %s, %d keyword(s)", keyword_set.name, len(keyword_set))
        report = null_calibration(
            _set_svis(cfg, keyword_set),
            returns,
            k=cfg.k,
            cost_bps=cfg.cost_bps,
            threshold=cfg.threshold,
            threads=cfg.threads,
        )
        out = cfg.output_dir
        written.append(
            reports.write_rows(
                out / reports.report_name("tstats", keyword_set.name, "csv"),
                ("keyword", "tstat"),
                report.tstats,
            )
        )
        summary = {"keyword_set": keyword_set.name, "asset": cfg.target_asset, "k": cfg.k}
        summary.update(report.summary())
        written.append(
            reports.write_json(
                out / reports.report_name("summary", keyword_set.name, "json"), summary
            )
        )
        written.append(
            reports.write_rows(
                out / reports.report_name("histogram", keyword_set.name, "csv"),
                ("bin_left", "bin_right", "count"),
                report.histogram(),
            )
        )
    return written


def _scan_keywords(cfg):
    if cfg.keywords:
        return list(cfg.keywords)
    return [keyword for keyword_set in load_keyword_sets(cfg) for keyword in keyword_set]


def run_k_scan(cfg):
    """T-stat of the moving-average rule against k, one file per keyword."""
    keywords = _scan_keywords(cfg)
    if not keywords:
        raise InputError("no keywords", errors=[{"message": "no keywords or keyword sets given"}])
    check_inputs(cfg, assets=[cfg.target_asset], keywords=keywords)

    returns = load_returns(cfg, cfg.target_asset)
    written = []
    for keyword in keywords:
        svi = load_svi(cfg, keyword).series
        ks = _usable_ks(svi, cfg.ks)
        scan = k_scan(svi, returns, ks, cfg.cost_bps, threads=cfg.threads)
        logger.info("k scan: %s, %d value(s) of k", keyword, len(scan))
        written.append(
            reports.write_rows(
                cfg.output_dir / reports.report_name("kscan", keyword, "csv"), ("k", "tstat"), scan
            )
        )
    return written


def run_ensemble(cfg):
    """
    Equal-weight ensemble of the moving-average rule over every keyword and k of a set.

    An explicit `keywords` list is run as one more set named "keywords".
    """
    keyword_sets = load_keyword_sets(cfg)
    if cfg.keywords:
        keyword_sets.append(KeywordSet("keywords", tuple(dict.fromkeys(cfg.keywords))))
    if not keyword_sets:
        raise InputError("no keywords", errors=[{"message": "no keywords or keyword sets given"}])
    keywords = [keyword for keyword_set in keyword_sets for keyword in keyword_set]
    check_inputs(cfg, assets=[cfg.target_asset], keywords=keywords)

    asset = cfg.target_asset
    returns = load_returns(cfg, asset)
    written = []
    for keyword_set in keyword_sets:
        svis = _set_svis(cfg, keyword_set)

        def signals(svi):
            return [preis_signal(svi, k, asset=asset) for k in _usable_ks(svi, cfg.ks)]

        grouped = ordered_map(signals, svis, cfg.threads)
        positions = ensemble_positions(signal for group in grouped for signal in group)
        ledger = run_backtest(
            {asset: priced_positions(positions, returns)}, {asset: returns}, cfg.cost_bps
        )
        result = perf_stats(ledger.net_returns())
        logger.info("ensemble: %s, %d week(s), t = %s", keyword_set.name, len(ledger), result.tstat)
        out = cfg.output_dir
        written.append(
            reports.write_weekly(
                out / reports.report_name("equity", keyword_set.name, "csv"),
                equity_curve(ledger),
                column="equity",
            )
        )
        written.append(
            reports.write_ledger(
                out / reports.report_name("ledger", keyword_set.name, "csv"), ledger
            )
        )
        perf = {"keyword_set": keyword_set.name, "asset": asset, "cost_bps": cfg.cost_bps}
        perf.update(result.as_dict())
        written.append(
            reports.write_json(out / reports.report_name("perf", keyword_set.name, "json"), perf)
        )
    return written


def _mode_label(cfg, mode):
    return f"{mode}_binary" if cfg.binary else mode


def _audit(fm, positions, returns, svi, wf):
    """
    Bias controls of one asset's run: the leakage audit of its features and
    an anti-lookahead check cut halfway through the out-of-sample weeks.
    """
    leakage = leakage_audit(fm, returns, svi)
    cut = fm.weeks[(wf.calibration_weeks + len(fm)) // 2]

    def walker(matrix, cfg):
        return positions if matrix is fm else walk_forward(matrix, cfg)

    lookahead = anti_lookahead_check(fm, wf, cut, walker=walker)
    if not (leakage.ok and lookahead.ok):
        logger.warning("%s: bias audit failed", fm.asset)
    return {
        "asset": fm.asset,
        "leakage_violations": len(leakage.violations),
        "flagged_columns": leakage.flagged_columns,
        "lookahead_cut": cut,
        "lookahead_compared": lookahead.compared,
        "lookahead_mismatches": list(lookahead.mismatches),
    }


def run_learner(cfg):
    """
    Walk-forward learner over the universe for every configured feature mode.

    Writes per mode the feature matrix of every asset, a pooled ledger and
    its PerfStats, and a bias audit; then the rank-sum p-value of every pair
    of modes' weekly net returns.
    """
    needs_svi = any(mode != "returns_only" for mode in cfg.feature_modes)
    keywords = sorted({cfg.keyword_for(asset) for asset in cfg.universe}) if needs_svi else []
    check_inputs(cfg, assets=cfg.universe, keywords=keywords)

    returns = {asset: load_returns(cfg, asset) for asset in cfg.universe}
    svis = {}
    if needs_svi:
        svis = {asset: load_svi(cfg, cfg.keyword_for(asset)) for asset in cfg.universe}

    out = cfg.output_dir
    written = []
    net_returns = {}
    for mode in cfg.feature_modes:
        label = _mode_label(cfg, mode)

        def run_asset(asset):
            svi = svis.get(asset) if mode != "returns_only" else None
            fm = build_features(
                returns[asset],
                svi,
                mode=mode,
                lags=cfg.lags,
                binary=cfg.binary,
                median_window=cfg.median_window,
            )
            positions = walk_forward(fm, cfg.walk_forward)
            audit = _audit(fm, positions, returns[asset], svi, cfg.walk_forward)
            return fm, priced_positions(positions, returns[asset]), audit

        results = ordered_map(run_asset, cfg.universe, cfg.threads)
        for fm, _, _ in results:
            written.append(
                reports.write_features(
                    out / reports.report_name("features", f"{fm.asset}_{label}", "csv"), fm
                )
            )
        positions = {fm.asset: priced for fm, priced, _ in results}
        ledger = run_backtest(positions, returns, cfg.cost_bps)
        result = perf_stats(ledger.net_returns())
        net_returns[label] = ledger.net_returns()
        logger.info("learner: %s, %d week(s), t = %s", label, len(ledger), result.tstat)

        written.append(reports.write_ledger(out / f"ledger_{label}.csv", ledger))
        perf = {
            "feature_mode": mode,
            "binary": cfg.binary,
            "cost_bps": cfg.cost_bps,
            "universe": list(cfg.universe),
            "walk_forward": cfg.walk_forward.as_dict(),
        }
        perf.update(result.as_dict())
        written.append(reports.write_json(out / f"perf_{label}.json", perf))
        audit = {"feature_mode": mode, "assets": [entry for _, _, entry in results]}
        written.append(reports.write_json(out / f"audit_{label}.json", audit))

    pairs = [
        {"a": a, "b": b, "p_value": wilcoxon_ranksum(net_returns[a].values, net_returns[b].values)}
        for a, b in combinations(net_returns, 2)
    ]
    written.append(reports.write_json(cfg.output_dir / "wilcoxon.json", {"pairs": pairs}))
    return written


def run_stitch(cfg):
    """Stitches the SVI windows of every keyword and reports the overlap fit."""
    keywords = _scan_keywords(cfg)
    if not keywords:
        raise InputError("no keywords", errors=[{"message": "no keywords or keyword sets given"}])
    check_inputs(cfg, keywords=keywords)

    written = []
    rows = []
    for keyword in keywords:
        windows = load_svi_windows(cfg, keyword)
        stitched = stitch_windows(windows, cfg.min_overlap)
        written.append(
            reports.write_weekly(
                cfg.output_dir / reports.report_name("svi", keyword, "csv"), stitched.series
            )
        )
        rows.append(
            (
                keyword,
                stitched.windows_used,
                stitched.overlap_fit_error,
                sum(not window.has_peak for window in windows),
            )
        )
    written.append(
        reports.write_rows(
            cfg.output_dir / "stitch_report.csv",
            ("keyword", "windows_used", "overlap_fit_error", "windows_without_peak"),
            rows,
        )
    )
    return written


def run_single(cfg):
    """One moving-average strategy of length k per keyword set."""
    return run_ensemble(replace(cfg, k_range=(cfg.k, cfg.k)))


PIPELINES = {
    "preis_single": run_single,
    "preis_ensemble": run_ensemble,
    "learner": run_learner,
}
