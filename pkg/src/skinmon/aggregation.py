"""Root-side boundary collection: angular binning, change detection and relay sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .types import Location, LocationMsg, NodeId, RelayBatch, RelaySample

TWO_PI = 2.0 * math.pi


@dataclass
class BinEntry:
    loc: Location
    dist: float
    ref_dist: float  # distance of the round's first report; next round's baseline
    round: int
    steady: int = 0  # consecutive rounds the first report stayed within the band


@dataclass(frozen=True)
class ChangeReport:
    root_loc: Location
    boundary_loc: Location
    sign: str
    round: int
    bin: int = -1


@dataclass
class BoundaryLedger:
    """Angle-binned store of boundary locations around a root."""

    root_loc: Location
    max_dir: int = 20
    bins: list[BinEntry | None] = field(default_factory=list)
    primed: bool = False  # every bin has held a point in some earlier round

    def __post_init__(self) -> None:
        if not self.bins:
            self.bins = [None] * self.max_dir

    def filled(self) -> list[int]:
        return [i for i, b in enumerate(self.bins) if b is not None]


def quantize_angle(root_loc: Location, boundary_loc: Location, max_dir: int, dof: float = 2.0) -> tuple[int, float]:
    """Map a boundary point to its angular bin around the root and its distance.

    Raises ValueError when the two locations coincide (no defined direction).
    """
    dx = boundary_loc.x - root_loc.x
    dy = boundary_loc.y - root_loc.y
    if dx == 0 and dy == 0:
        raise ValueError("boundary location coincides with root location")
    full = math.pi * dof
    angle = math.atan2(dy, dx) % TWO_PI
    if angle >= full:
        angle = 0.0
    b = round(angle * max_dir / full)
    if b >= max_dir:
        b = 0
    return b, math.hypot(dx, dy)


def ingest_boundary(
    ledger: BoundaryLedger,
    boundary_loc: Location,
    threshold: float,
    t: int,
    *,
    dof: float = 2.0,
    mode: str = "band",
    settle: int = 0,
) -> ChangeReport | None:
    """Store one boundary report; return a change report if its bin moved past the threshold.

    A second report for a bin in the same round only overwrites the stored
    location. The first report of a round is compared with the previous
    round's first report for that bin. Nothing is reported until the ledger
    has been filled once: before that the tree around the root is still
    growing and distances move with it, not with the wound.

    With ``settle`` > 0 a bin must also have been reported in each of the
    previous rounds and stayed inside the band for ``settle`` of them, so a
    subtree that drops out for a round and comes back is not taken for a
    moving boundary.
    """
    if boundary_loc == ledger.root_loc:
        return None
    if not ledger.primed:
        ledger.primed = all(e is not None and e.round < t for e in ledger.bins)
    b, d_new = quantize_angle(ledger.root_loc, boundary_loc, ledger.max_dir, dof)
    entry = ledger.bins[b]
    if entry is not None and entry.round == t:
        entry.loc = boundary_loc
        entry.dist = d_new
        return None
    report = None
    grew = shrank = False
    if entry is not None:
        d_old = entry.ref_dist
        if mode == "band":
            grew = d_new > (1.0 + threshold) * d_old
            shrank = d_new < (1.0 - threshold) * d_old
        elif mode == "literal":
            grew = d_new > threshold * d_old
            shrank = d_new < threshold * d_old
        else:
            raise ValueError(f"unknown threshold mode: {mode}")
    continuous = entry is not None and entry.round == t - 1
    trusted = settle == 0 or (continuous and entry.steady >= settle)
    if ledger.primed and trusted:
        if grew:
            report = ChangeReport(ledger.root_loc, boundary_loc, "+", t, b)
        elif shrank:
            report = ChangeReport(ledger.root_loc, boundary_loc, "-", t, b)
    steady = entry.steady + 1 if continuous and not (grew or shrank) else 0
    ledger.bins[b] = BinEntry(boundary_loc, d_new, d_new, t, steady)
    return report


def root_self_announce(node) -> LocationMsg:
    """The root's per-round broadcast of its own id and location."""
    if node.parent != node.id:
        raise ValueError(f"node {node.id} is not a root")
    return LocationMsg(sender=node.id, loc=node.loc, parent=node.id)


def periodic_relay_report(
    ledger: BoundaryLedger, t: int, t_interval: int, sample_count: int, sender: NodeId = 0
) -> RelayBatch | None:
    """Every `t_interval` rounds, a uniform-in-angle subsample of the filled bins."""
    if t % t_interval != 0:
        return None
    filled = ledger.filled()
    if not filled:
        return None
    stride = math.ceil(len(filled) / sample_count)
    chosen = filled[::stride]
    samples = tuple(RelaySample(i, ledger.bins[i].loc, ledger.bins[i].dist) for i in chosen)
    return RelayBatch(sender=sender, samples=samples)
