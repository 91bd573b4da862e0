"""Shared vocabulary: geometry, energy budgets, wire messages and run configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Union

NodeId = int

ID_BITS = 16
ENERGY_BITS = 16
COORD_BITS = 16
TAG_BITS = 2
SIGN_BITS = 2
COUNT_BITS = 8
BIN_BITS = 8
DIST_BITS = 16

_COORD_MAX = (1 << COORD_BITS) - 1
_ENERGY_MAX = (1 << ENERGY_BITS) - 1
_DIST_MAX = (1 << DIST_BITS) - 1


class ConfigError(ValueError):
    """Raised when a run configuration violates its constraints."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True, order=True)
class Location:
    x: float
    y: float

    def dist(self, other: Location) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class EnergyBudget:
    remaining: float
    initial: float

    @property
    def dead(self) -> bool:
        return self.remaining <= 0.0


class MsgKind(Enum):
    STATUS = 0b00
    LOCATION = 0b01
    CHANGE = 0b10
    RELAY = 0b11


@dataclass(frozen=True)
class StatusMsg:
    sender: NodeId
    root: NodeId
    root_energy: float

    kind = MsgKind.STATUS


@dataclass(frozen=True)
class LocationMsg:
    sender: NodeId
    loc: Location
    parent: NodeId

    kind = MsgKind.LOCATION


@dataclass(frozen=True)
class ChangeMsg:
    sender: NodeId
    root_loc: Location
    boundary_loc: Location
    sign: str  # "+" growth, "-" shrinkage

    kind = MsgKind.CHANGE


@dataclass(frozen=True)
class RelaySample:
    bin: int
    loc: Location
    dist: float


@dataclass(frozen=True)
class RelayBatch:
    sender: NodeId
    samples: tuple[RelaySample, ...]

    kind = MsgKind.RELAY


Message = Union[StatusMsg, LocationMsg, ChangeMsg, RelayBatch]

STATUS_BITS = TAG_BITS + 2 * ID_BITS + ENERGY_BITS  # sender, root, root energy
LOCATION_BITS = TAG_BITS + ID_BITS + 2 * COORD_BITS + ID_BITS
CHANGE_BITS = TAG_BITS + ID_BITS + 4 * COORD_BITS + SIGN_BITS
RELAY_HEADER_BITS = TAG_BITS + ID_BITS + COUNT_BITS
RELAY_SAMPLE_BITS = BIN_BITS + 2 * COORD_BITS + DIST_BITS


def message_bits(msg: Message) -> int:
    """Fixed on-air length of a message; only relay batches depend on content (sample count)."""
    if isinstance(msg, StatusMsg):
        return STATUS_BITS
    if isinstance(msg, LocationMsg):
        return LOCATION_BITS
    if isinstance(msg, ChangeMsg):
        return CHANGE_BITS
    if isinstance(msg, RelayBatch):
        return RELAY_HEADER_BITS + len(msg.samples) * RELAY_SAMPLE_BITS
    raise TypeError(f"not a message: {msg!r}")


def relay_batch_bits(count: int) -> int:
    return RELAY_HEADER_BITS + count * RELAY_SAMPLE_BITS


# ---------------------------------------------------------------------------
# bit-level codec


_SIGNS = {"+": 0b01, "-": 0b10}
_SIGNS_INV = {v: k for k, v in _SIGNS.items()}


@dataclass(frozen=True)
class Codec:
    """Fixed-point wire codec.

    Coordinates are quantized relative to the patch, energies relative to the
    deployment's initial energy. Values already on the quantization grid
    survive a round trip unchanged.
    """

    patch_width: float
    patch_height: float
    energy_scale: float

    @property
    def diagonal(self) -> float:
        return math.hypot(self.patch_width, self.patch_height)

    def q_x(self, x: float) -> int:
        return _clamp(round(x / self.patch_width * _COORD_MAX), _COORD_MAX)

    def q_y(self, y: float) -> int:
        return _clamp(round(y / self.patch_height * _COORD_MAX), _COORD_MAX)

    def q_energy(self, e: float) -> int:
        return _clamp(round(e / self.energy_scale * _ENERGY_MAX), _ENERGY_MAX)

    def q_dist(self, d: float) -> int:
        return _clamp(round(d / self.diagonal * _DIST_MAX), _DIST_MAX)

    def dq_x(self, code: int) -> float:
        return code * self.patch_width / _COORD_MAX

    def dq_y(self, code: int) -> float:
        return code * self.patch_height / _COORD_MAX

    def dq_energy(self, code: int) -> float:
        return code * self.energy_scale / _ENERGY_MAX

    def dq_dist(self, code: int) -> float:
        return code * self.diagonal / _DIST_MAX

    def quantize_loc(self, loc: Location) -> Location:
        return Location(self.dq_x(self.q_x(loc.x)), self.dq_y(self.q_y(loc.y)))

    def encode(self, msg: Message) -> str:
        """Serialize to a '0'/'1' string whose first two characters are the kind tag."""
        parts: list[tuple[int, int]] = [(msg.kind.value, TAG_BITS), (msg.sender, ID_BITS)]
        if isinstance(msg, StatusMsg):
            parts += [(msg.root, ID_BITS), (self.q_energy(msg.root_energy), ENERGY_BITS)]
        elif isinstance(msg, LocationMsg):
            parts += [
                (self.q_x(msg.loc.x), COORD_BITS),
                (self.q_y(msg.loc.y), COORD_BITS),
                (msg.parent, ID_BITS),
            ]
        elif isinstance(msg, ChangeMsg):
            parts += [
                (self.q_x(msg.root_loc.x), COORD_BITS),
                (self.q_y(msg.root_loc.y), COORD_BITS),
                (self.q_x(msg.boundary_loc.x), COORD_BITS),
                (self.q_y(msg.boundary_loc.y), COORD_BITS),
                (_SIGNS[msg.sign], SIGN_BITS),
            ]
        elif isinstance(msg, RelayBatch):
            if len(msg.samples) >= 1 << COUNT_BITS:
                raise ValueError("relay batch too large for count field")
            parts.append((len(msg.samples), COUNT_BITS))
            for s in msg.samples:
                parts += [
                    (s.bin, BIN_BITS),
                    (self.q_x(s.loc.x), COORD_BITS),
                    (self.q_y(s.loc.y), COORD_BITS),
                    (self.q_dist(s.dist), DIST_BITS),
                ]
        else:
            raise TypeError(f"not a message: {msg!r}")
        for value, width in parts:
            if not 0 <= value < (1 << width):
                raise ValueError(f"field value {value} does not fit in {width} bits")
        bits = "".join(format(v, f"0{w}b") for v, w in parts)
        assert len(bits) == message_bits(msg)
        return bits

    def decode(self, bits: str) -> Message:
        reader = _BitReader(bits)
        kind = MsgKind(reader.take(TAG_BITS))
        sender = reader.take(ID_BITS)
        if kind is MsgKind.STATUS:
            root = reader.take(ID_BITS)
            msg: Message = StatusMsg(sender, root, self.dq_energy(reader.take(ENERGY_BITS)))
        elif kind is MsgKind.LOCATION:
            loc = Location(self.dq_x(reader.take(COORD_BITS)), self.dq_y(reader.take(COORD_BITS)))
            msg = LocationMsg(sender, loc, reader.take(ID_BITS))
        elif kind is MsgKind.CHANGE:
            root_loc = Location(self.dq_x(reader.take(COORD_BITS)), self.dq_y(reader.take(COORD_BITS)))
            b_loc = Location(self.dq_x(reader.take(COORD_BITS)), self.dq_y(reader.take(COORD_BITS)))
            msg = ChangeMsg(sender, root_loc, b_loc, _SIGNS_INV[reader.take(SIGN_BITS)])
        else:
            count = reader.take(COUNT_BITS)
            samples = []
            for _ in range(count):
                b = reader.take(BIN_BITS)
                loc = Location(self.dq_x(reader.take(COORD_BITS)), self.dq_y(reader.take(COORD_BITS)))
                samples.append(RelaySample(b, loc, self.dq_dist(reader.take(DIST_BITS))))
            msg = RelayBatch(sender, tuple(samples))
        if reader.pos != len(bits):
            raise ValueError(f"trailing bits after {kind.name} message")
        return msg


def kind_of(bits: str) -> MsgKind:
    return MsgKind(int(bits[:TAG_BITS], 2))


class _BitReader:
    def __init__(self, bits: str):
        self.bits = bits
        self.pos = 0

    def take(self, width: int) -> int:
        if self.pos + width > len(self.bits):
            raise ValueError("truncated message")
        value = int(self.bits[self.pos:self.pos + width], 2)
        self.pos += width
        return value


def _clamp(v: int, hi: int) -> int:
    return min(max(v, 0), hi)


# ---------------------------------------------------------------------------
# configuration


class Scheme(str, Enum):
    PROPOSED = "proposed"
    WOUND_ONLY_STATIC = "wound_only_static"
    ALL_ACTIVE = "all_active"


@dataclass
class SimConfig:
    # [patch]
    patch_width: float = 20.0  # cm
    patch_height: float = 20.0
    grid_spacing: float = 0.5
    placement_jitter: float = 0.1
    comm_range: float = 0.8
    relay_grid: int = 3
    # [radio]
    initial_energy: float = 5.0e6  # nJ
    energy_spread: float = 0.2  # initial charge drawn uniformly from [(1 - spread) E0, E0]
    e_trx: float = 16.7  # nJ/bit
    e_rec: float = 36.1  # nJ/bit
    eps_amp: float = 1.97  # nJ/bit/m^2
    # [protocol]
    recharge: int = 3
    alive_cap: int = 6
    max_dir: int = 20
    dof: float = 2.0
    threshold: float = 0.10
    threshold_mode: str = "band"
    settle_rounds: int = 2  # in-band rounds a bin needs before its changes are reported
    t_interval: int = 5
    sample_count: int = 10
    tree_rules: str = "stable"
    holddown: int = 0  # 0 = derive from patch size
    reelect_drop: float = 0.3  # stable rules: fraction a root may drain before re-election
    hop_per_round: bool = False
    # [wound]
    wound_scenario: str = "oval"
    wound_center_x: float = -1.0  # negative = patch centre
    wound_center_y: float = -1.0
    wound_radius: float = 3.0
    wound_semi_major: float = 6.0
    wound_semi_minor: float = 4.0
    wound_scratch_length: float = 7.0
    wound_scratch_radius: float = 1.0
    wound_scratch_gap: float = 4.5
    wound_growth_rounds: int = 20
    wound_heal_rounds: int = 90
    # [run]
    rounds: int = 400  # covers the all-active baseline's whole lifetime at the default battery
    scheme: Scheme = Scheme.PROPOSED
    rng_seed: int = 0
    snapshot_interval: int = 10

    def __post_init__(self) -> None:
        if not isinstance(self.scheme, Scheme):
            self.scheme = Scheme(str(self.scheme).lower())

    @property
    def effective_holddown(self) -> int:
        if self.holddown > 0:
            return self.holddown
        # enough rounds for a stale root to be flushed across the widest possible tree
        return 2 * math.ceil(max(self.patch_width, self.patch_height) / self.grid_spacing)

    @property
    def codec(self) -> Codec:
        return Codec(self.patch_width, self.patch_height, self.initial_energy)

    def problems(self) -> list[str]:
        checks = [
            (self.recharge >= 1, "recharge ≥ 1"),
            (self.alive_cap >= self.recharge, "alive_cap ≥ recharge"),
            (self.max_dir >= 1, "max_dir ≥ 1"),
            (self.max_dir < (1 << BIN_BITS), "max_dir < 256"),
            (0 < self.threshold < 1, "0 < threshold < 1"),
            (self.t_interval >= 1, "t_interval ≥ 1"),
            (self.comm_range > self.grid_spacing, "comm_range > grid_spacing"),
            (
                self.comm_range > self.grid_spacing + 2 * self.placement_jitter,
                "comm_range > grid_spacing + 2·placement_jitter",
            ),
            (self.grid_spacing > 0, "grid_spacing > 0"),
            (self.placement_jitter >= 0, "placement_jitter ≥ 0"),
            (self.patch_width > 0 and self.patch_height > 0, "patch dimensions > 0"),
            (self.initial_energy > 0, "initial_energy > 0"),
            (0 <= self.energy_spread < 1, "0 ≤ energy_spread < 1"),
            (min(self.e_trx, self.e_rec, self.eps_amp) > 0, "radio constants > 0"),
            (self.dof > 0, "dof > 0"),
            (self.sample_count >= 1, "sample_count ≥ 1"),
            (self.threshold_mode in ("band", "literal"), "threshold_mode ∈ {band, literal}"),
            (self.settle_rounds >= 0, "settle_rounds ≥ 0"),
            (self.tree_rules in ("stable", "literal"), "tree_rules ∈ {stable, literal}"),
            (self.holddown >= 0, "holddown ≥ 0"),
            (0 <= self.reelect_drop < 1, "0 ≤ reelect_drop < 1"),
            (self.relay_grid >= 1, "relay_grid ≥ 1"),
            (self.wound_scenario in ("oval", "gunshot", "scratch"), "wound_scenario ∈ {oval, gunshot, scratch}"),
            (self.wound_heal_rounds >= 1, "wound_heal_rounds ≥ 1"),
            (0 <= self.wound_growth_rounds < self.wound_heal_rounds, "0 ≤ wound_growth_rounds < wound_heal_rounds"),
            (self.rounds >= 0, "rounds ≥ 0"),
            (self.snapshot_interval >= 1, "snapshot_interval ≥ 1"),
        ]
        return [msg for ok, msg in checks if not ok]

    def validate(self) -> SimConfig:
        problems = self.problems()
        if problems:
            raise ConfigError(problems)
        return self

    def replace(self, **changes) -> SimConfig:
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        unknown = set(changes) - set(values)
        if unknown:
            raise ConfigError([f"unknown field: {name}" for name in sorted(unknown)])
        values.update(changes)
        return SimConfig(**values)


CONFIG_FIELDS = tuple(f.name for f in fields(SimConfig))
