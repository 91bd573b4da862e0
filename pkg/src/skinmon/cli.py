"""Command line: ``skinmon run | compare | render``.

Exit codes: 0 ok, 1 invalid configuration or arguments, 2 runtime failure,
3 scheme-ordering failure in ``compare``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .compare import ORDER, RunManifest, compare_schemes
from .configfile import format_config, load_config
from .engine import init_state, run, step_round
from .metrics import write_metrics
from .render import render_snapshot
from .types import ConfigError, Scheme, SimConfig

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME, EXIT_ORDERING = 0, 1, 2, 3

log = logging.getLogger("skinmon")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def snapshot_name(round_: int) -> str:
    return "initial.svg" if round_ < 0 else f"round_{round_:04d}.svg"


def write_run(config: SimConfig, out_dir: str | Path) -> dict[str, Path]:
    """Run one configuration and write config.ini, metrics.csv and snapshots/ under `out_dir`."""
    out = Path(out_dir)
    snap_dir = out / "snapshots"
    snap_dir.mkdir(parents=True, exist_ok=True)
    series, shots = run(config)
    paths = {"config": out / "config.ini", "metrics": out / "metrics.csv"}
    paths["config"].write_text(format_config(config), encoding="utf-8")
    write_metrics(series, paths["metrics"])
    for rnd, svg in shots:
        (snap_dir / snapshot_name(rnd)).write_text(svg, encoding="utf-8")
    return paths


def render_after(config: SimConfig, rounds: int, path: str | Path) -> Path:
    """Render the state after `rounds` rounds (0: the deployment before any round)."""
    state = init_state(config)
    for _ in range(rounds):
        step_round(state)
    return render_snapshot(state, path)


def _config(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    changes: dict = {}
    if getattr(args, "seed", None) is not None:
        changes["rng_seed"] = args.seed
    if getattr(args, "scheme", None) is not None:
        changes["scheme"] = Scheme(args.scheme)
    if args.rounds is not None:
        changes["rounds"] = args.rounds
    if args.snapshot_interval is not None:
        changes["snapshot_interval"] = args.snapshot_interval
    return cfg.replace(**changes).validate() if changes else cfg


def _cmd_run(args) -> int:
    paths = write_run(_config(args), args.out)
    print(f"wrote {paths['metrics']}")
    return EXIT_OK


def _cmd_render(args) -> int:
    cfg = _config(args)
    out = Path(args.out)
    if out.suffix.lower() != ".svg":
        out.mkdir(parents=True, exist_ok=True)
        out = out / snapshot_name(cfg.rounds - 1 if cfg.rounds else -1)
    render_after(cfg, cfg.rounds, out)
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    schemes = tuple(Scheme(s) for s in args.scheme) if args.scheme else ORDER
    seeds = tuple(args.seed) if args.seed else tuple(range(args.seeds))
    manifest = RunManifest(args.config, args.out, schemes, args.snapshot_interval, seeds, args.rounds)
    res = compare_schemes(manifest, workers=args.workers)
    for s in res.summary:
        print(f"{s.scheme.value:18s} runs={s.runs} energy={s.mean_cum_energy_nj:.1f} nJ dead={s.mean_dead_nodes:.2f}")
    for v in res.violations:
        print(f"ordering violated: {v}", file=sys.stderr)
    return EXIT_OK if res.ordering_ok else EXIT_ORDERING


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="skinmon", description="Wound-monitoring sensor network simulator.")
    p.add_argument("-v", "--verbose", action="store_true", help="log protocol warnings")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    schemes = [s.value for s in Scheme]

    def common(sp, *, multi_seed: bool = False):
        sp.add_argument("--config", help="INI config file (defaults if omitted)")
        sp.add_argument("--out", required=True, help="output directory (render: directory or .svg file)")
        sp.add_argument("--rounds", type=int)
        sp.add_argument("--snapshot-interval", type=int)
        if multi_seed:
            sp.add_argument("--seed", type=int, action="append", help="seed to run; repeatable")
            sp.add_argument("--scheme", choices=schemes, action="append", help="scheme to run; repeatable")
        else:
            sp.add_argument("--seed", type=int)
            sp.add_argument("--scheme", choices=schemes)

    sp = sub.add_parser("run", help="one run: metrics CSV and SVG snapshots")
    common(sp)
    sp.set_defaults(func=_cmd_run)

    sp = sub.add_parser("compare", help="all schemes over several seeds")
    common(sp, multi_seed=True)
    sp.add_argument("--seeds", type=int, default=1, help="run seeds 0..N-1 when --seed is not given")
    sp.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    sp.set_defaults(func=_cmd_compare)

    sp = sub.add_parser("render", help="one SVG of the state after --rounds rounds")
    common(sp)
    sp.set_defaults(func=_cmd_render)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
