"""INI-style run configuration: sections [patch], [radio], [protocol], [wound], [run].

Keys are the snake_case ``SimConfig`` field names; camelCase spellings
(``maxDir``, ``eTrx``) are accepted too. Unknown keys, unknown sections and
keys placed in the wrong section are hard errors.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import fields
from pathlib import Path

from .types import ConfigError, Scheme, SimConfig

SECTIONS: dict[str, tuple[str, ...]] = {
    "patch": ("patch_width", "patch_height", "grid_spacing", "placement_jitter", "comm_range", "relay_grid"),
    "radio": ("initial_energy", "energy_spread", "e_trx", "e_rec", "eps_amp"),
    "protocol": (
        "recharge", "alive_cap", "max_dir", "dof", "threshold", "threshold_mode", "settle_rounds", "t_interval",
        "sample_count", "tree_rules", "holddown", "reelect_drop", "hop_per_round",
    ),
    "wound": (
        "wound_scenario", "wound_center_x", "wound_center_y", "wound_radius", "wound_semi_major",
        "wound_semi_minor", "wound_scratch_length", "wound_scratch_radius", "wound_scratch_gap",
        "wound_growth_rounds", "wound_heal_rounds",
    ),
    "run": ("rounds", "scheme", "rng_seed", "snapshot_interval"),
}
_SECTION_OF = {name: sec for sec, names in SECTIONS.items() for name in names}
_DEFAULTS = SimConfig()

assert set(_SECTION_OF) == {f.name for f in fields(SimConfig)}, "every config field needs a section"


def _snake(key: str) -> str:
    return re.sub(r"(?<=[a-z0-9])([A-Z])", r"_\1", key.strip()).lower()


def _convert(name: str, raw: str):
    default = getattr(_DEFAULTS, name)
    raw = raw.strip()
    if isinstance(default, Scheme):
        try:
            return Scheme(raw.lower())
        except ValueError:
            raise ConfigError([f"{name}: unknown scheme {raw!r}"]) from None
    if isinstance(default, bool):
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError([f"{name}: expected a boolean, got {raw!r}"])
    try:
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        kind = type(default).__name__
        raise ConfigError([f"{name}: expected {kind}, got {raw!r}"]) from None
    return raw


def parse_config(text: str) -> SimConfig:
    """Parse a config document into a validated SimConfig; missing keys keep their defaults."""
    parser = configparser.ConfigParser(interpolation=None, default_section="\x00none")
    parser.optionxform = str  # keep case so camelCase can be mapped
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"malformed config: {exc}"]) from None

    problems: list[str] = []
    values: dict[str, object] = {}
    for section in parser.sections():
        if section not in SECTIONS:
            problems.append(f"unknown section [{section}]")
            continue
        for key, raw in parser.items(section):
            name = _snake(key)
            home = _SECTION_OF.get(name)
            if home is None:
                problems.append(f"unknown field: {key}")
            elif home != section:
                problems.append(f"field {key} belongs in [{home}], not [{section}]")
            elif name in values:
                problems.append(f"field {key} given twice")
            else:
                try:
                    values[name] = _convert(name, raw)
                except ConfigError as exc:
                    problems.extend(exc.problems)
    if problems:
        raise ConfigError(problems)
    return SimConfig(**values).validate()


def load_config(path: str | Path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def format_config(config: SimConfig) -> str:
    """Inverse of parse_config: every field written explicitly, grouped by section."""
    lines: list[str] = []
    for section, names in SECTIONS.items():
        if lines:
            lines.append("")
        lines.append(f"[{section}]")
        for name in names:
            value = getattr(config, name)
            if isinstance(value, Scheme):
                value = value.value
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{name} = {value}")
    return "\n".join(lines) + "\n"
