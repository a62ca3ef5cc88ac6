"""
Run configuration: a YAML file validated with Django forms, with command-line
overrides and process-level defaults from settings.
"""

from dataclasses import dataclass, field
from pathlib import Path

import yaml
from django.conf import settings

from .exceptions import ConfigError
from .features import DEFAULT_LAGS, DEFAULT_MEDIAN_WINDOW
from .forms import RunConfigForm, WalkForwardForm
from .ingest import BUNDLED_KEYWORD_SETS, DEFAULT_MIN_OVERLAP
from .learner import WalkForwardConfig
from .series import WEEKDAYS

DEFAULT_K = 10

DEFAULT_K_RANGE = (1, 100)

DEFAULT_THRESHOLD = 1.96


@dataclass(frozen=True)
class RunConfig:
    universe: tuple
    price_dir: Path
    svi_dir: Path | None = None
    target_asset: str = ""
    keyword_sets: tuple = ()
    keywords: tuple = ()
    asset_keywords: dict = field(default_factory=dict)
    mode: str = "learner"
    feature_modes: tuple = ("both",)
    binary: bool = False
    k: int = DEFAULT_K
    k_range: tuple = DEFAULT_K_RANGE
    cost_bps: float = 2.0
    entry_day: int = WEEKDAYS["monday"]
    exit_day: int = WEEKDAYS["friday"]
    lags: int = DEFAULT_LAGS
    median_window: int = DEFAULT_MEDIAN_WINDOW
    threshold: float = DEFAULT_THRESHOLD
    min_overlap: int = DEFAULT_MIN_OVERLAP
    walk_forward: WalkForwardConfig = field(default_factory=WalkForwardConfig)
    output_dir: Path = Path("output")
    threads: int = 1

    @property
    def ks(self):
        low, high = self.k_range
        return list(range(low, high + 1))

    def keyword_for(self, asset):
        """SVI keyword paired with an asset by the learner (the ticker by default)."""
        return self.asset_keywords.get(asset, asset)


def _form_errors(form, prefix=""):
    records = []
    for name, errors in form.errors.get_json_data().items():
        for error in errors:
            records.append(
                {
                    "field": f"{prefix}{name}",
                    "message": error["message"],
                    "reason": error["code"] or "invalid",
                }
            )
    return records


def _resolve(base, value):
    if not value:
        return None
    path = Path(value).expanduser()
    return path if path.is_absolute() else base / path


def _read_yaml(path):
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(
            "unreadable configuration file",
            errors=[{"field": "config", "message": str(exc), "path": str(path)}],
        ) from exc
    except yaml.YAMLError as exc:
        raise ConfigError(
            "invalid YAML", errors=[{"field": "config", "message": str(exc), "path": str(path)}]
        ) from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(
            "invalid configuration",
            errors=[{"field": "config", "message": "The file must hold a mapping."}],
        )
    return raw


def load_run_config(path, seed=None, threads=None, output=None):
    """
    Reads, validates and completes a run configuration.

    Relative paths are resolved against the directory of the configuration
    file. Every validation error of the file is reported at once.

    Parameters:
    path (str | Path): YAML configuration file.
    seed (int): Overrides walk_forward.seed when given.
    threads (int): Overrides threads when given.
    output (str | Path): Overrides output_dir when given.

    Returns:
    RunConfig: The validated configuration.
    """
    raw = _read_yaml(path)
    base = Path(path).resolve().parent
    walk_forward_raw = raw.pop("walk_forward", None) or {}
    if not isinstance(walk_forward_raw, dict):
        raise ConfigError(
            "invalid configuration",
            errors=[{"field": "walk_forward", "message": "Enter a mapping."}],
        )
    if seed is not None:
        walk_forward_raw["seed"] = seed
    if threads is not None:
        raw["threads"] = threads

    form = RunConfigForm(data=raw)
    wf_form = WalkForwardForm(data=walk_forward_raw)
    errors = []
    unknown = sorted(set(raw) - set(form.fields)) + [
        f"walk_forward.{name}" for name in sorted(set(walk_forward_raw) - set(wf_form.fields))
    ]
    errors.extend(
        {"field": name, "message": "Unknown field.", "reason": "unknown"} for name in unknown
    )
    if not form.is_valid():
        errors.extend(_form_errors(form))
    if not wf_form.is_valid():
        errors.extend(_form_errors(wf_form, prefix="walk_forward."))
    if errors:
        raise ConfigError("invalid configuration", errors=errors)

    data = form.cleaned_data
    walk_forward = WalkForwardConfig(
        **{name: value for name, value in wf_form.cleaned_data.items() if value is not None}
    )
    universe = tuple(data["universe"])
    output_dir = (
        Path(output)
        if output is not None
        else _resolve(base, data["output_dir"]) or Path(settings.TRENDS["OUTPUT_DIR"])
    )
    return RunConfig(
        universe=universe,
        price_dir=_resolve(base, data["price_dir"]),
        svi_dir=_resolve(base, data["svi_dir"]),
        target_asset=data["target_asset"] or universe[0],
        keyword_sets=tuple(
            name if name in BUNDLED_KEYWORD_SETS else str(_resolve(base, name))
            for name in data["keyword_sets"]
        ),
        keywords=tuple(data["keywords"]),
        asset_keywords=data["asset_keywords"],
        mode=data["mode"] or "learner",
        feature_modes=tuple(data["feature_mode"]) or ("both",),
        binary=data["binary"],
        k=data["k"] or DEFAULT_K,
        k_range=data["k_range"] or DEFAULT_K_RANGE,
        cost_bps=(
            data["cost_bps"] if data["cost_bps"] is not None else settings.TRENDS["COST_BPS"]
        ),
        entry_day=WEEKDAYS[data["entry_day"] or "monday"],
        exit_day=WEEKDAYS[data["exit_day"] or "friday"],
        lags=data["lags"] or DEFAULT_LAGS,
        median_window=data["median_window"] or DEFAULT_MEDIAN_WINDOW,
        threshold=data["threshold"] if data["threshold"] is not None else DEFAULT_THRESHOLD,
        min_overlap=data["min_overlap"] or DEFAULT_MIN_OVERLAP,
        walk_forward=walk_forward,
        output_dir=output_dir,
        threads=data["threads"] or settings.TRENDS["THREADS"],
    )
