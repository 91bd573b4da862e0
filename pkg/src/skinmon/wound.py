"""Time-varying abnormal-skin regions: gunshot, scratch and oval wounds.

Every region is a finite union of closed disks, ellipses or capsules evaluated
exactly at sensor locations; no rasterization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .types import Location, NodeId, SimConfig


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    r: float

    def contains(self, x: float, y: float) -> bool:
        return self.r > 0 and (x - self.cx) ** 2 + (y - self.cy) ** 2 <= self.r * self.r


@dataclass(frozen=True)
class Ellipse:
    cx: float
    cy: float
    a: float  # semi-axis along x
    b: float  # semi-axis along y

    def contains(self, x: float, y: float) -> bool:
        if self.a <= 0 or self.b <= 0:
            return False
        return ((x - self.cx) / self.a) ** 2 + ((y - self.cy) / self.b) ** 2 <= 1.0


@dataclass(frozen=True)
class Capsule:
    """Segment (x0, y0)-(x1, y1) thickened by radius r."""

    x0: float
    y0: float
    x1: float
    y1: float
    r: float

    def contains(self, x: float, y: float) -> bool:
        if self.r <= 0:
            return False
        dx, dy = self.x1 - self.x0, self.y1 - self.y0
        seg2 = dx * dx + dy * dy
        u = 0.0 if seg2 == 0 else max(0.0, min(1.0, ((x - self.x0) * dx + (y - self.y0) * dy) / seg2))
        px, py = self.x0 + u * dx, self.y0 + u * dy
        return (x - px) ** 2 + (y - py) ** 2 <= self.r * self.r


Shape = Disk | Ellipse | Capsule


def _decay(t: int, start: int, end: int) -> float:
    """1 before `start`, linear to 0 at `end`, 0 afterwards."""
    if t <= start:
        return 1.0
    if t >= end:
        return 0.0
    return (end - t) / (end - start)


@dataclass(frozen=True)
class WoundField:
    """Abnormal region as a function of the round index.

    GUNSHOT: a disk that grows linearly to 1.5x its initial radius over
    `growth_rounds`, then shrinks linearly to nothing at `heal_rounds`.
    SCRATCH: three parallel capsules; the outer two heal at 60 % of
    `heal_rounds`, the middle one at `heal_rounds`.
    OVAL: an axis-aligned ellipse shrinking uniformly to nothing at `heal_rounds`.
    """

    scenario: str
    cx: float
    cy: float
    radius: float = 3.0
    semi_major: float = 6.0
    semi_minor: float = 4.0
    scratch_length: float = 7.0
    scratch_radius: float = 1.0
    scratch_gap: float = 4.5
    growth_rounds: int = 20
    heal_rounds: int = 90

    PEAK_GROWTH = 1.5

    @classmethod
    def from_config(cls, cfg: SimConfig) -> WoundField:
        cx = cfg.wound_center_x if cfg.wound_center_x >= 0 else cfg.patch_width / 2
        cy = cfg.wound_center_y if cfg.wound_center_y >= 0 else cfg.patch_height / 2
        return cls(
            scenario=cfg.wound_scenario,
            cx=cx,
            cy=cy,
            radius=cfg.wound_radius,
            semi_major=cfg.wound_semi_major,
            semi_minor=cfg.wound_semi_minor,
            scratch_length=cfg.wound_scratch_length,
            scratch_radius=cfg.wound_scratch_radius,
            scratch_gap=cfg.wound_scratch_gap,
            growth_rounds=cfg.wound_growth_rounds if cfg.wound_scenario == "gunshot" else 0,
            heal_rounds=cfg.wound_heal_rounds,
        )

    @property
    def healed_round(self) -> int:
        return self.heal_rounds

    def peak_round(self, t: int) -> int:
        """Round at or before `t` with the largest region (used to draw healed area)."""
        if self.scenario == "gunshot":
            return min(t, self.growth_rounds)
        return 0

    def gunshot_radius(self, t: int) -> float:
        g, h = self.growth_rounds, self.heal_rounds
        if t < g:
            return self.radius * (1.0 + (self.PEAK_GROWTH - 1.0) * t / g)
        return self.radius * self.PEAK_GROWTH * _decay(t, g, h)

    def shapes(self, t: int) -> list[Shape]:
        if t < 0:
            raise ValueError("round index must be non-negative")
        if self.scenario == "gunshot":
            r = self.gunshot_radius(t)
            return [Disk(self.cx, self.cy, r)] if r > 0 else []
        if self.scenario == "oval":
            f = _decay(t, 0, self.heal_rounds)
            return [Ellipse(self.cx, self.cy, self.semi_major * f, self.semi_minor * f)] if f > 0 else []
        if self.scenario == "scratch":
            half = self.scratch_length / 2
            outer_end = round(0.6 * self.heal_rounds)
            out = []
            for k, end in ((-1, outer_end), (0, self.heal_rounds), (1, outer_end)):
                r = self.scratch_radius * _decay(t, 0, end)
                if r <= 0:
                    continue
                # slanted strokes, offset perpendicular to the stroke direction
                ox = self.cx + k * self.scratch_gap
                out.append(Capsule(ox - 0.35 * half, self.cy - half, ox + 0.35 * half, self.cy + half, r))
            return out
        raise ValueError(f"unknown wound scenario: {self.scenario}")

    def is_abnormal(self, loc: Location, t: int) -> bool:
        return any(s.contains(loc.x, loc.y) for s in self.shapes(t))


def is_abnormal(field: WoundField, loc: Location, t: int) -> bool:
    return field.is_abnormal(loc, t)


def active_sensor_set(field: WoundField, sensors: Iterable[tuple[NodeId, Location]], t: int) -> set[NodeId]:
    shapes = field.shapes(t)
    return {nid for nid, loc in sensors if any(s.contains(loc.x, loc.y) for s in shapes)}

