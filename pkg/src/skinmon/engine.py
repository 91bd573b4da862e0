"""Synchronous-round simulator: topology, per-round orchestration, baselines and metrics.

Each round runs seven phases in a fixed order:

1. evaluate the wound at round t, wake/sleep nodes;
2. every active node builds its STATUS, roots add their self-announce;
3. broadcasts are delivered (ascending sender id) and STATUS is processed;
4. border check on every active node, boundary nodes originate LOCATION;
5. LOCATION convergecast up parent pointers, roots ingest boundary points;
6. roots send CHANGE reports and periodic relay batches;
7. metrics.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field

from . import aggregation, protocol
from .aggregation import ChangeReport
from .protocol import NodeState, ProtocolParams
from .radio import CM_PER_M, RadioParams, debit, rx_energy, tx_energy
from .types import (
    CHANGE_BITS,
    LOCATION_BITS,
    STATUS_BITS,
    EnergyBudget,
    Location,
    LocationMsg,
    NodeId,
    RelayBatch,
    Scheme,
    SimConfig,
    message_bits,
)
from .wound import WoundField


@dataclass
class Topology:
    sensors: list[tuple[NodeId, Location]]
    relays: list[Location]
    adjacency: dict[NodeId, tuple[NodeId, ...]]

    @property
    def n(self) -> int:
        return len(self.sensors)

    def loc(self, nid: NodeId) -> Location:
        return self.sensors[nid][1]


def build_topology(config: SimConfig, rng: random.Random) -> Topology:
    """Jittered lattice of sensors, row-major ids, unit-disk adjacency."""
    config.validate()
    s, j = config.grid_spacing, config.placement_jitter
    nx = max(1, int(round(config.patch_width / s)))
    ny = max(1, int(round(config.patch_height / s)))
    sensors = []
    for row in range(ny):
        for col in range(nx):
            x = (col + 0.5) * s + (rng.uniform(-j, j) if j > 0 else 0.0)
            y = (row + 0.5) * s + (rng.uniform(-j, j) if j > 0 else 0.0)
            x = min(max(x, 0.0), config.patch_width)
            y = min(max(y, 0.0), config.patch_height)
            sensors.append((row * nx + col, Location(x, y)))

    r = config.comm_range
    cells: dict[tuple[int, int], list[int]] = {}
    for nid, loc in sensors:
        cells.setdefault((int(loc.x // r), int(loc.y // r)), []).append(nid)
    adjacency: dict[NodeId, tuple[NodeId, ...]] = {}
    r2 = r * r
    for nid, loc in sensors:
        cx, cy = int(loc.x // r), int(loc.y // r)
        found = []
        for ddx in (-1, 0, 1):
            for ddy in (-1, 0, 1):
                for other in cells.get((cx + ddx, cy + ddy), ()):
                    if other == nid:
                        continue
                    o = sensors[other][1]
                    if (o.x - loc.x) ** 2 + (o.y - loc.y) ** 2 <= r2:
                        found.append(other)
        adjacency[nid] = tuple(sorted(found))

    g = config.relay_grid
    relays = [
        Location((i + 0.5) * config.patch_width / g, (k + 0.5) * config.patch_height / g)
        for k in range(g)
        for i in range(g)
    ]
    return Topology(sensors, relays, adjacency)


@dataclass
class RoundMetrics:
    round: int
    energy_nj: float = 0.0
    cum_energy_nj: float = 0.0
    dead_nodes: int = 0
    active_nodes: int = 0
    status_msgs: int = 0
    location_msgs: int = 0
    change_msgs: int = 0
    relay_msgs: int = 0
    root_ids: tuple[NodeId, ...] = ()
    change_reports: list[ChangeReport] = field(default_factory=list)
    boundary_samples: list[tuple[NodeId, RelayBatch]] = field(default_factory=list)
    location_origins: tuple[NodeId, ...] = ()
    location_hops: int = 0
    dropped_locations: int = 0
    assignments: dict[NodeId, NodeId] = field(default_factory=dict)


@dataclass
class MetricsSeries:
    rounds: list[RoundMetrics] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rounds)

    def __iter__(self):
        return iter(self.rounds)

    def __getitem__(self, i):
        return self.rounds[i]

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rounds]

    @property
    def final(self) -> RoundMetrics | None:
        return self.rounds[-1] if self.rounds else None


@dataclass(frozen=True)
class Transmission:
    """One priced emission, kept for the energy audit."""

    round: int
    kind: str
    sender: NodeId
    bits: int
    distance_m: float
    receivers: int


@dataclass
class SimState:
    config: SimConfig
    topology: Topology
    field: WoundField
    nodes: list[NodeState]
    params: ProtocolParams
    radio: RadioParams
    t: int = 0
    cum_energy: float = 0.0
    dead: int = 0
    in_flight: list[tuple[LocationMsg, int]] = field(default_factory=list)
    log: list[Transmission] = field(default_factory=list)
    series: MetricsSeries = field(default_factory=MetricsSeries)

    @property
    def scheme(self) -> Scheme:
        return self.config.scheme

    def active_nodes(self) -> list[NodeState]:
        return [n for n in self.nodes if n.active]


def init_state(config: SimConfig) -> SimState:
    config.validate()
    rng = random.Random(config.rng_seed)
    topo = build_topology(config, rng)
    e0 = config.initial_energy
    nodes = []
    for nid, loc in topo.sensors:
        charge = e0 * (1.0 - config.energy_spread * rng.random()) if config.energy_spread > 0 else e0
        nodes.append(NodeState(nid, loc, EnergyBudget(charge, charge), topo.adjacency[nid]))
    params = ProtocolParams(
        recharge=config.recharge,
        alive_cap=config.alive_cap,
        max_dir=config.max_dir,
        energy_aware=config.scheme is not Scheme.WOUND_ONLY_STATIC,
        rules=config.tree_rules,
        holddown=config.effective_holddown,
        reelect_drop=config.reelect_drop,
    )
    return SimState(
        config=config,
        topology=topo,
        field=WoundField.from_config(config),
        nodes=nodes,
        params=params,
        radio=RadioParams.from_config(config),
    )


def nearest_relay(state: SimState, loc: Location) -> tuple[Location, float]:
    best = min(state.topology.relays, key=lambda r: (loc.dist(r), r.x, r.y))
    return best, loc.dist(best)


class _Round:
    """Book-keeping for a single round's energy and message log."""

    def __init__(self, state: SimState, m: RoundMetrics):
        self.state = state
        self.m = m
        self.energy = 0.0
        self.broadcast_m = state.config.comm_range / CM_PER_M

    def charge(self, node: NodeState, cost: float) -> None:
        self.energy += cost
        node.budget, died = debit(node.budget, cost)
        if died:
            self.state.dead += 1

    def broadcast(self, sender: NodeState, kind: str, bits: int) -> list[NodeState]:
        """Transmit once and charge reception to every live, awake neighbour."""
        state = self.state
        self.charge(sender, tx_energy(state.radio, bits, self.broadcast_m))
        nodes = state.nodes
        rx = rx_energy(state.radio, bits)
        heard = []
        for j in sender.neighbor_ids:
            r = nodes[j]
            if r.active and r.budget.remaining > 0.0:
                self.charge(r, rx)
                heard.append(r)
        state.log.append(Transmission(state.t, kind, sender.id, bits, self.broadcast_m, len(heard)))
        return heard

    def unicast_to_relay(self, sender: NodeState, kind: str, bits: int) -> None:
        state = self.state
        _, d = nearest_relay(state, sender.loc)
        d_m = d / CM_PER_M
        self.charge(sender, tx_energy(state.radio, bits, d_m))
        state.log.append(Transmission(state.t, kind, sender.id, bits, d_m, 0))


def step_round(state: SimState, wound_round: int | None = None) -> RoundMetrics:
    """Advance the simulation by one round.

    `wound_round` evaluates the wound at a different round than the
    simulation clock, which lets callers hold the region fixed.
    """
    cfg, params, nodes = state.config, state.params, state.nodes
    t = state.t
    m = RoundMetrics(round=t)
    rnd = _Round(state, m)

    # 1. activity
    wt = t if wound_round is None else wound_round
    if cfg.scheme is Scheme.ALL_ACTIVE:
        should = [n.is_alive for n in nodes]
    else:
        shapes = state.field.shapes(wt)
        should = [
            n.is_alive and any(s.contains(n.loc.x, n.loc.y) for s in shapes) for n in nodes
        ]
    for n, want in zip(nodes, should):
        if want and not n.active:
            protocol.wake(n, params)
        elif not want and n.active:
            protocol.sleep(n)

    # 2. status and root announcements
    outgoing: list[tuple[NodeState, object]] = []
    for n in nodes:
        if not n.active:
            continue
        st = protocol.update_status(n, params)
        if st is not None:
            outgoing.append((n, st))
        if n.parent == n.id:
            outgoing.append((n, aggregation.root_self_announce(n)))

    # 3. delivery
    inbox: dict[NodeId, list] = {}
    for sender, msg in outgoing:
        if isinstance(msg, LocationMsg):
            rnd.broadcast(sender, "LOCATION", LOCATION_BITS)
            m.location_msgs += 1
        else:
            for r in rnd.broadcast(sender, "STATUS", STATUS_BITS):
                inbox.setdefault(r.id, []).append(msg)
            m.status_msgs += 1
    for n in nodes:
        msgs = inbox.get(n.id)
        if msgs and n.active and n.is_alive:
            for msg in msgs:
                protocol.on_status(n, msg, params)

    # 4. border check
    wave: list[tuple[LocationMsg, int]] = list(state.in_flight) if cfg.hop_per_round else []
    origins = []
    for n in nodes:
        if n.active and n.is_alive:
            loc_msg = protocol.border_check(n, params)
            if loc_msg is not None:
                wave.append((loc_msg, 0))
                origins.append(n.id)
    m.location_origins = tuple(origins)

    # 5. convergecast
    ingest: dict[NodeId, list[Location]] = {}
    ttl = max(1, sum(1 for n in nodes if n.active))
    while wave:
        wave.sort(key=lambda item: item[0].sender)
        nxt: list[tuple[LocationMsg, int]] = []
        for msg, hops in wave:
            sender = nodes[msg.sender]
            if not (sender.active and sender.is_alive):
                m.dropped_locations += 1
                continue
            heard = rnd.broadcast(sender, "LOCATION", LOCATION_BITS)
            m.location_msgs += 1
            m.location_hops += 1
            for r in heard:
                if r.id != msg.parent:
                    continue
                out = protocol.forward_to_parent(r, msg)
                if isinstance(out, LocationMsg):
                    if hops + 1 >= ttl:
                        m.dropped_locations += 1
                    else:
                        nxt.append((out, hops + 1))
                elif isinstance(out, Location):
                    ingest.setdefault(r.id, []).append(out)
        if cfg.hop_per_round:
            state.in_flight = nxt
            break
        wave = nxt

    # 6. root aggregation, change and relay reports
    for rid in sorted(ingest):
        root = nodes[rid]
        if root.ledger is None or not root.is_alive:
            continue
        points = ingest[rid]
        points.sort(key=lambda p: (-root.loc.dist(p), p.x, p.y))
        for p in points:
            rep = aggregation.ingest_boundary(
                root.ledger, p, cfg.threshold, t, dof=cfg.dof, mode=cfg.threshold_mode,
                settle=cfg.settle_rounds,
            )
            if rep is not None:
                m.change_reports.append(rep)
                rnd.unicast_to_relay(root, "CHANGE", CHANGE_BITS)
                m.change_msgs += 1
    for n in nodes:
        if n.active and n.is_alive and n.parent == n.id and n.ledger is not None:
            batch = aggregation.periodic_relay_report(n.ledger, t, cfg.t_interval, cfg.sample_count, n.id)
            if batch is not None:
                rnd.unicast_to_relay(n, "RELAY", message_bits(batch))
                m.relay_msgs += 1
                m.boundary_samples.append((n.id, batch))

    # 7. metrics
    state.cum_energy += rnd.energy
    m.energy_nj = rnd.energy
    m.cum_energy_nj = state.cum_energy
    m.dead_nodes = state.dead
    act = [n for n in nodes if n.active and n.is_alive]
    m.active_nodes = len(act)
    m.root_ids = tuple(n.id for n in act if n.parent == n.id)
    m.assignments = {n.id: n.root for n in act}
    state.series.rounds.append(m)
    state.t += 1
    return m


def snapshot_rounds(config: SimConfig, field_: WoundField) -> set[int]:
    out = set(range(0, config.rounds, config.snapshot_interval))
    h = field_.healed_round
    for f in (0.0, 1 / 3, 2 / 3, 1.0):
        r = int(round(f * h))
        if r < config.rounds:
            out.add(r)
    return out


def run(config: SimConfig, *, snapshots: bool = True) -> tuple[MetricsSeries, list[tuple[int, str]]]:
    """Run `config.rounds` rounds; return metrics and (round, svg) snapshots.

    The first snapshot (round -1) shows the deployment before any round.
    """
    from .render import snapshot_svg

    state = init_state(config)
    shots: list[tuple[int, str]] = []
    if snapshots:
        shots.append((-1, snapshot_svg(state)))
    wanted = snapshot_rounds(config, state.field) if snapshots else set()
    for _ in range(config.rounds):
        step_round(state)
        if state.t - 1 in wanted:
            shots.append((state.t - 1, snapshot_svg(state)))
    return state.series, shots


def run_state(config: SimConfig) -> SimState:
    state = init_state(config)
    for _ in range(config.rounds):
        step_round(state)
    return state


# ---------------------------------------------------------------------------
# audits and complexity


def audit_energy(state: SimState) -> float:
    """Recompute total energy from the transmission log alone."""
    radio = state.radio
    return math.fsum(
        tx_energy(radio, tr.bits, tr.distance_m) + tr.receivers * rx_energy(radio, tr.bits)
        for tr in state.log
    )


def components(adjacency: dict[NodeId, tuple[NodeId, ...]], members: set[NodeId]) -> list[list[NodeId]]:
    seen: set[NodeId] = set()
    out = []
    for s in sorted(members):
        if s in seen:
            continue
        comp = []
        queue = deque([s])
        seen.add(s)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in adjacency[u]:
                if v in members and v not in seen:
                    seen.add(v)
                    queue.append(v)
        out.append(sorted(comp))
    return out


def hop_eccentricities(adjacency, members: set[NodeId], source: NodeId) -> dict[NodeId, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v in members and v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def hop_diameter(adjacency, comp: list[NodeId]) -> int:
    members = set(comp)
    return max(max(hop_eccentricities(adjacency, members, s).values()) for s in comp)


def boundary_oracle(topology: Topology, active: set[NodeId]) -> set[NodeId]:
    """Active nodes with at least one inactive in-range neighbour."""
    return {n for n in active if any(v not in active for v in topology.adjacency[n])}


@dataclass
class ComplexityReport:
    components: list[dict]
    formation_round: int | None  # first round with one agreed root per component
    status_formation: int
    status_bound: int
    max_location_hops: int
    location_bound: int
    slack: float

    @property
    def status_ratio(self) -> float:
        return self.status_formation / self.status_bound

    @property
    def location_ratio(self) -> float:
        return self.max_location_hops / self.location_bound

    @property
    def ok(self) -> bool:
        return (
            self.formation_round is not None
            and self.status_ratio <= self.slack
            and self.location_ratio <= self.slack
        )


def formation_round(series: MetricsSeries, comps: list[list[NodeId]]) -> int | None:
    """First round after which every component has exactly one root that all its members name."""
    for r in series:
        roots = set(r.root_ids)
        if all(
            len(roots.intersection(comp)) == 1 and len({r.assignments.get(u) for u in comp}) == 1
            for comp in comps
        ):
            return r.round
    return None


def complexity_counters(
    series: MetricsSeries, topology: Topology, field_: WoundField, *, wound_round: int = 0, slack: float = 4.0
) -> ComplexityReport:
    """Compare empirical message counts with N*D and D*p for a run whose
    wound was held at `wound_round`.

    STATUS messages are totalled up to and including the formation round;
    LOCATION hops are the worst single round of the whole run.
    """
    active = active_ids(field_, topology, wound_round)
    comps = components(topology.adjacency, active)
    rows = []
    d_network = 0
    d_max = 0
    for comp in comps:
        d = hop_diameter(topology.adjacency, comp)
        d_network += d
        d_max = max(d_max, d)
        rows.append({"size": len(comp), "diameter": d})
    formed = formation_round(series, comps)
    upto = len(series) if formed is None else formed + 1
    status_formation = sum(r.status_msgs for r in series[:upto])
    p = len(boundary_oracle(topology, active))
    max_hops = max((r.location_hops for r in series), default=0)
    return ComplexityReport(
        components=rows,
        formation_round=formed,
        status_formation=status_formation,
        status_bound=len(active) * max(1, d_network),
        max_location_hops=max_hops,
        location_bound=max(1, d_max) * max(1, p),
        slack=slack,
    )


def active_ids(field_: WoundField, topology: Topology, t: int) -> set[NodeId]:
    shapes = field_.shapes(t)
    return {nid for nid, loc in topology.sensors if any(s.contains(loc.x, loc.y) for s in shapes)}
