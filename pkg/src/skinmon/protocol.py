"""Per-node protocol: status gossip, energy-efficient tree adoption and border reporting.

Two rule sets are available. ``literal`` follows the original pseudocode
step for step, including a root re-advertising its current energy every
round. Because stale copies of that falling value look better than fresh
ones, literal trees can form parent-pointer loops.

``stable`` (the default) keeps the same messages and makes the advertised
root energy an election key that only changes in discrete epochs:

* a root keeps advertising the energy it was elected with until its battery
  has fallen ``reelect_drop`` below it (energy-aware runs only), then
  advertises its current energy, which starts a new epoch;
* a node seeing its parent advertise a different key it does not prefer,
  whether a new root or a new epoch, drops its root and re-enters the
  election with its own energy, so draining roots hand over;
* a node that drops a root remembers the key it held and re-joins that root
  only through a strictly lower key, i.e. a later epoch. Copies held by its
  former subtree are never later, so it cannot loop back through them;
* an offer must beat both the node's current key and what it announced at
  the start of the round, and a node that has just reset adopts nothing for
  the rest of the round;
* a STATUS echoing a node's own id resets it only if it is already a root.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .aggregation import BoundaryLedger
from .types import EnergyBudget, Location, LocationMsg, NodeId, StatusMsg

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProtocolParams:
    recharge: int = 3
    alive_cap: int = 6
    max_dir: int = 20
    energy_aware: bool = True  # False: smallest id wins, energy ignored (static baseline)
    rules: str = "stable"
    holddown: int = 80
    reelect_drop: float = 0.3

    @property
    def literal(self) -> bool:
        return self.rules == "literal"


@dataclass(eq=False)
class NodeState:
    id: NodeId
    loc: Location
    budget: EnergyBudget
    neighbor_ids: tuple[NodeId, ...] = ()
    parent: NodeId = -1
    root: NodeId = -1
    root_energy: float = 0.0
    alive: dict[NodeId, int] = field(default_factory=dict)
    active: bool = False
    ledger: BoundaryLedger | None = None
    lost_roots: dict[NodeId, tuple[float, int]] = field(default_factory=dict)  # root -> (last value, ttl)
    quiet: bool = False  # reset this round; neighbours' copies may be our own stale ones
    advertised: tuple[float, NodeId] = (0.0, -1)  # (root energy, root id) in this round's STATUS

    @property
    def energy(self) -> float:
        return self.budget.remaining

    @property
    def is_alive(self) -> bool:
        return self.budget.remaining > 0.0

    @property
    def is_root(self) -> bool:
        return self.active and self.parent == self.id


def wake(node: NodeState, params: ProtocolParams) -> None:
    """Fresh start when the skin under a node turns abnormal."""
    node.active = True
    node.alive = dict.fromkeys(node.neighbor_ids, 0)
    node.lost_roots = {}
    _set_self(node, params)
    node.advertised = (node.root_energy, node.id)


def sleep(node: NodeState) -> None:
    node.active = False
    node.parent = node.root = -1
    node.root_energy = 0.0
    node.alive = {}
    node.ledger = None
    node.lost_roots = {}
    node.quiet = False


def _set_self(node: NodeState, params: ProtocolParams) -> None:
    node.parent = node.id
    node.root = node.id
    node.root_energy = node.energy
    if node.ledger is None:
        node.ledger = BoundaryLedger(node.loc, params.max_dir)


def _forget(node: NodeState, params: ProtocolParams) -> None:
    if not params.literal and node.root != node.id:
        node.lost_roots[node.root] = (node.root_energy, params.holddown)


def _adopt(node: NodeState, params: ProtocolParams, parent: NodeId, root: NodeId, root_energy: float) -> None:
    if node.root != root:
        _forget(node, params)
    node.lost_roots.pop(root, None)
    node.parent = parent
    node.root = root
    node.root_energy = root_energy
    node.ledger = None


def _lose_root(node: NodeState, params: ProtocolParams) -> None:
    if not params.literal and node.root != node.id:
        _forget(node, params)
        node.quiet = True
    _set_self(node, params)


def _better(params: ProtocolParams, energy: float, root: NodeId, than_energy: float, than_root: NodeId) -> bool:
    if not params.energy_aware:
        return root < than_root
    return energy > than_energy or (energy == than_energy and root < than_root)


def _reelect(node: NodeState, params: ProtocolParams) -> bool:
    if params.literal or not params.energy_aware:
        return True  # without energy priority the value is only a freshness stamp
    return params.reelect_drop > 0 and node.energy < node.root_energy * (1.0 - params.reelect_drop)


def update_status(node: NodeState, params: ProtocolParams | None = None) -> StatusMsg | None:
    """Per-round STATUS broadcast of (id, root id, root energy); sleeping nodes stay silent."""
    params = params or ProtocolParams()
    if not node.active or not node.is_alive:
        return None
    if node.parent == node.id and _reelect(node, params):
        node.root_energy = node.energy
    node.advertised = (node.root_energy, node.root)
    return StatusMsg(node.id, node.root, node.root_energy)


def on_status(node: NodeState, msg: StatusMsg, params: ProtocolParams | None = None) -> None:
    """Process one neighbour's STATUS: recharge its alive status, then maybe adopt its root."""
    params = params or ProtocolParams()
    i = msg.sender
    if i not in node.alive:
        log.warning("node %d: STATUS from unknown neighbour %d ignored", node.id, i)
        return
    node.alive[i] = min(params.alive_cap, node.alive[i] + params.recharge)

    if msg.root == node.id:
        if params.literal:
            _set_self(node, params)
        return
    if params.literal:
        if _better(params, msg.root_energy, msg.root, node.root_energy, node.root):
            _adopt(node, params, i, msg.root, msg.root_energy)
        return

    if msg.root == node.root:
        if msg.root_energy == node.root_energy or i != node.parent:
            return
        if not params.energy_aware and msg.root_energy < node.root_energy:
            node.root_energy = msg.root_energy  # newer stamp of the same root
            return
    lost = node.lost_roots.get(msg.root)
    acceptable = lost is None or msg.root_energy < lost[0]
    if (
        acceptable
        and not node.quiet
        and _better(params, msg.root_energy, msg.root, node.root_energy, node.root)
        # also beat what we announced this round, so two nodes never adopt each other's offer
        and _better(params, msg.root_energy, msg.root, *node.advertised)
    ):
        _adopt(node, params, i, msg.root, msg.root_energy)
    elif i == node.parent:
        # parent moved to a root we do not prefer: ours is no longer reachable through it
        _lose_root(node, params)


def border_check(node: NodeState, params: ProtocolParams | None = None) -> LocationMsg | None:
    """Once-per-round alive-status decay; boundary nodes report their location toward the parent."""
    params = params or ProtocolParams()
    node.quiet = False
    for r, (value, ttl) in list(node.lost_roots.items()):
        if ttl <= 1:
            del node.lost_roots[r]
        else:
            node.lost_roots[r] = (value, ttl - 1)
    flag = False
    for i in sorted(node.alive):
        if node.alive[i] == 0:
            flag = True
            continue
        node.alive[i] -= 1
        if node.parent == i and node.alive[i] == 0:
            _lose_root(node, params)
            return None
    if flag and node.parent != node.id:
        return LocationMsg(sender=node.id, loc=node.loc, parent=node.parent)
    return None


def forward_to_parent(node: NodeState, msg: LocationMsg) -> LocationMsg | Location | None:
    """Convergecast step for a LOCATION heard by `node`.

    Returns the re-addressed message to broadcast, the boundary location when
    `node` is the root (to be ingested), or None when the message was meant
    for someone else.
    """
    if msg.parent != node.id or not node.active:
        return None
    if node.parent == node.id:
        return msg.loc
    return LocationMsg(sender=node.id, loc=msg.loc, parent=node.parent)
