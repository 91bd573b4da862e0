"""Per-round metrics CSV: write and re-read with exact float round trip."""

from __future__ import annotations

import csv
from decimal import Decimal
from pathlib import Path

from .engine import MetricsSeries, RoundMetrics

HEADER = (
    "round", "energy_nj", "cum_energy_nj", "dead_nodes", "active_nodes",
    "status_msgs", "location_msgs", "change_msgs", "relay_msgs", "root_ids",
)
_FLOATS = {"energy_nj", "cum_energy_nj"}


def fixed(x: float) -> str:
    """Shortest round-tripping decimal for `x`, never in exponent notation."""
    if x == 0:
        return "0.0"
    s = format(Decimal(repr(float(x))), "f")
    return s if "." in s else s + ".0"


def metrics_rows(series: MetricsSeries) -> list[list[str]]:
    rows = []
    for r in series:
        row = []
        for name in HEADER:
            v = getattr(r, name)
            if name == "root_ids":
                row.append(";".join(str(i) for i in sorted(v)))
            elif name in _FLOATS:
                row.append(fixed(v))
            else:
                row.append(str(int(v)))
        rows.append(row)
    return rows


def write_metrics(series: MetricsSeries, path: str | Path) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(HEADER)
            w.writerows(metrics_rows(series))
    except OSError as exc:
        raise OSError(f"cannot write metrics to {path}: {exc}") from exc
    return path


def read_metrics(path: str | Path) -> MetricsSeries:
    """Parse a CSV written by write_metrics; only the CSV columns are restored."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        out = MetricsSeries()
        for row in reader:
            kw: dict = {}
            for name in HEADER:
                raw = row[name]
                if name == "root_ids":
                    kw[name] = tuple(int(i) for i in raw.split(";")) if raw else ()
                elif name in _FLOATS:
                    kw[name] = float(raw)
                else:
                    kw[name] = int(raw)
            out.rounds.append(RoundMetrics(**kw))
    return out
