"""Scheme comparison: the same seeds (hence the same placements) under every scheme."""

from __future__ import annotations

import csv
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .configfile import load_config
from .engine import run
from .metrics import fixed
from .types import ConfigError, Scheme, SimConfig

LONG_HEADER = ("scheme", "seed", "round", "energy_nj", "cum_energy_nj", "dead_nodes")
SUMMARY_HEADER = ("scheme", "runs", "mean_cum_energy_nj", "mean_dead_nodes")
ORDER = (Scheme.PROPOSED, Scheme.WOUND_ONLY_STATIC, Scheme.ALL_ACTIVE)


@dataclass
class RunManifest:
    config_path: str | Path | None
    output_dir: str | Path
    schemes: tuple[Scheme, ...] = ORDER
    snapshot_interval: int | None = None  # None: keep the config's value
    seeds: tuple[int, ...] = (0,)
    rounds: int | None = None

    def problems(self) -> list[str]:
        out = []
        if not self.seeds:
            out.append("seeds non-empty")
        if not self.schemes:
            out.append("schemes non-empty")
        if self.snapshot_interval is not None and self.snapshot_interval < 1:
            out.append("snapshot_interval ≥ 1")
        return out

    def base_config(self) -> SimConfig:
        problems = self.problems()
        if problems:
            raise ConfigError(problems)
        cfg = load_config(self.config_path) if self.config_path else SimConfig()
        changes: dict = {}
        if self.snapshot_interval is not None:
            changes["snapshot_interval"] = self.snapshot_interval
        if self.rounds is not None:
            changes["rounds"] = self.rounds
        return cfg.replace(**changes).validate() if changes else cfg


@dataclass
class SchemeSummary:
    scheme: Scheme
    runs: int
    mean_cum_energy_nj: float
    mean_dead_nodes: float


@dataclass
class CompareResult:
    rows: list[tuple] = field(default_factory=list)
    summary: list[SchemeSummary] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)
    long_csv: Path | None = None
    summary_csv: Path | None = None

    @property
    def ordering_ok(self) -> bool:
        return not self.violations


def _one(cfg: SimConfig) -> tuple[Scheme, int, list[tuple]]:
    try:
        series, _ = run(cfg, snapshots=False)
    except Exception as exc:
        raise RuntimeError(f"run failed for scheme={cfg.scheme.value} seed={cfg.rng_seed}: {exc}") from exc
    rows = [(r.round, r.energy_nj, r.cum_energy_nj, r.dead_nodes) for r in series]
    return cfg.scheme, cfg.rng_seed, rows


def ordering_violations(summary: list[SchemeSummary]) -> list[str]:
    """Check PROPOSED ≤ WOUND_ONLY_STATIC ≤ ALL_ACTIVE on mean energy and mean dead nodes,
    over whichever of those schemes were run."""
    by = {s.scheme: s for s in summary}
    present = [by[s] for s in ORDER if s in by]
    out = []
    for lo, hi in zip(present, present[1:]):
        for attr in ("mean_cum_energy_nj", "mean_dead_nodes"):
            a, b = getattr(lo, attr), getattr(hi, attr)
            if a > b:
                out.append(f"{attr}: {lo.scheme.value} {a:.6g} > {hi.scheme.value} {b:.6g}")
    return out


def compare_schemes(manifest: RunManifest, *, workers: int = 1) -> CompareResult:
    base = manifest.base_config()
    out_dir = Path(manifest.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    schemes = [Scheme(s) for s in manifest.schemes]
    jobs = [base.replace(scheme=s, rng_seed=seed) for s in schemes for seed in manifest.seeds]

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, os.cpu_count() or 1)) as pool:
            results = list(pool.map(_one, jobs))
    else:
        results = [_one(cfg) for cfg in jobs]

    res = CompareResult()
    finals: dict[Scheme, list[tuple[float, int]]] = {s: [] for s in schemes}
    for scheme, seed, rows in results:
        for rnd, e, cum, dead in rows:
            res.rows.append((scheme.value, seed, rnd, e, cum, dead))
        finals[scheme].append((rows[-1][2], rows[-1][3]) if rows else (0.0, 0))
    for s in schemes:
        vals = finals[s]
        res.summary.append(
            SchemeSummary(
                s,
                len(vals),
                statistics.fmean(v[0] for v in vals),
                statistics.fmean(v[1] for v in vals),
            )
        )
    res.violations = ordering_violations(res.summary)

    res.long_csv = out_dir / "compare.csv"
    with res.long_csv.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LONG_HEADER)
        for scheme, seed, rnd, e, cum, dead in res.rows:
            w.writerow((scheme, seed, rnd, fixed(e), fixed(cum), dead))
    res.summary_csv = out_dir / "summary.csv"
    with res.summary_csv.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for s in res.summary:
            w.writerow((s.scheme.value, s.runs, fixed(s.mean_cum_energy_nj), fixed(s.mean_dead_nodes)))
    return res
