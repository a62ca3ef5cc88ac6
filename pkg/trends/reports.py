"""Plain CSV / JSON report writers. Plotting is left to external tools."""

import json
from pathlib import Path

import pandas as pd
from django.core.serializers.json import DjangoJSONEncoder
from django.utils.text import slugify


def report_name(prefix, name, suffix):
    """File name such as `tstats_ailments.csv` or `kscan_moon-patrol.csv`."""
    return f"{prefix}_{slugify(name) or 'unnamed'}.{suffix}"


def _prepare(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_rows(path, columns, rows):
    path = _prepare(path)
    pd.DataFrame(list(rows), columns=list(columns)).to_csv(path, index=False, lineterminator="\n")
    return path


def write_weekly(path, series, column="value"):
    """Writes a WeeklySeries as `week_end,<column>`."""
    frame = pd.DataFrame(
        {
            "week_end": [week.isoformat() for week in series.weeks],
            column: series.values,
        }
    )
    path = _prepare(path)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def write_ledger(path, ledger):
    path = _prepare(path)
    ledger.to_csv(path)
    return path


def write_json(path, data):
    path = _prepare(path)
    serialized_json = json.dumps(data, cls=DjangoJSONEncoder, indent=2, sort_keys=True)
    path.write_text(serialized_json + "\n", encoding="utf-8")
    return path


def write_features(path, fm):
    path = _prepare(path)
    fm.to_csv(path)
    return path
