from skinmon.protocol import (
    NodeState,
    ProtocolParams,
    border_check,
    forward_to_parent,
    on_status,
    sleep,
    update_status,
    wake,
)
from skinmon.types import EnergyBudget, Location, LocationMsg, StatusMsg

STABLE = ProtocolParams()
LITERAL = ProtocolParams(rules="literal")


def node(nid, energy=1000.0, nbrs=(1, 2, 3, 4), params=STABLE):
    n = NodeState(nid, Location(float(nid), 0.0), EnergyBudget(energy, energy), tuple(nbrs))
    wake(n, params)
    return n


def test_wake_is_self_rooted_with_zero_alive_status():
    n = node(9, 3000.0)
    assert (n.parent, n.root, n.root_energy) == (9, 9, 3000.0)
    assert n.alive == {1: 0, 2: 0, 3: 0, 4: 0}
    assert n.is_root and n.ledger is not None


def test_status_message_fields():
    n = node(9)
    n.parent, n.root, n.root_energy = 4, 7, 5000.0
    assert update_status(n) == StatusMsg(9, 7, 5000.0)


def test_sleeping_node_silent():
    n = node(9)
    sleep(n)
    assert update_status(n) is None
    assert (n.parent, n.root, n.alive) == (-1, -1, {})


def test_literal_root_refreshes_every_round():
    n = node(9, 5000.0, params=LITERAL)
    n.budget = EnergyBudget(4200.0, 5000.0)
    assert update_status(n, LITERAL).root_energy == 4200.0


def test_stable_root_keeps_key_until_drop():
    p = ProtocolParams(reelect_drop=0.3)
    n = node(9, 5000.0, params=p)
    n.budget = EnergyBudget(3600.0, 5000.0)  # 28% drained
    assert update_status(n, p).root_energy == 5000.0
    n.budget = EnergyBudget(3400.0, 5000.0)  # 32% drained: new epoch
    assert update_status(n, p).root_energy == 3400.0


def test_adopts_higher_energy_root():
    for p in (STABLE, LITERAL):
        n = node(9, 3000.0, params=p)
        on_status(n, StatusMsg(4, 4, 5000.0), p)
        assert (n.parent, n.root, n.root_energy) == (4, 4, 5000.0)


def test_tie_broken_by_smaller_root_id():
    for p in (STABLE, LITERAL):
        n = node(7, 5000.0, params=p)
        on_status(n, StatusMsg(1, 2, 5000.0), p)
        assert (n.parent, n.root) == (1, 2)
        on_status(n, StatusMsg(3, 3, 5000.0), p)
        assert n.root == 2


def test_lower_offer_ignored():
    n = node(9, 3000.0)
    on_status(n, StatusMsg(4, 4, 2000.0))
    assert n.root == 9


def test_own_id_echo_keeps_node_self_rooted():
    for p in (STABLE, LITERAL):
        n = node(3, params=p)
        on_status(n, StatusMsg(1, 3, 10.0), p)
        assert n.is_root


def test_alive_status_recharge_is_capped():
    n = node(9)
    for _ in range(5):
        on_status(n, StatusMsg(1, 1, 1.0))
    assert n.alive[1] == STABLE.alive_cap


def test_alive_status_stays_in_bounds():
    n = node(9)
    for r in range(40):
        if r % 3 == 0:
            on_status(n, StatusMsg(2, 2, 1.0))
        border_check(n)
        assert all(0 <= v <= STABLE.alive_cap for v in n.alive.values())


def test_unknown_sender_ignored(caplog):
    n = node(9)
    on_status(n, StatusMsg(99, 99, 1e9))
    assert n.root == 9 and 99 not in n.alive
    assert "unknown neighbour" in caplog.text


def test_interior_node_decrements_silently():
    n = node(9, nbrs=(1, 2))
    n.alive = {1: 3, 2: 1}
    assert border_check(n) is None
    assert n.alive == {1: 2, 2: 0}


def test_boundary_node_reports_to_parent():
    n = node(9, nbrs=(1, 2))
    n.parent, n.root, n.root_energy = 2, 5, 10.0
    n.alive = {1: 0, 2: 4}
    msg = border_check(n)
    assert msg == LocationMsg(9, n.loc, 2)


def test_root_never_reports_itself():
    n = node(9, nbrs=(1, 2))
    n.alive = {1: 0, 2: 4}
    assert border_check(n) is None


def test_parent_timeout_reroots_without_report():
    n = node(9, nbrs=(1, 2))
    n.parent, n.root, n.root_energy = 2, 5, 10.0
    n.alive = {1: 0, 2: 1}  # 1 already silent, parent decays to 0 this scan
    assert border_check(n) is None
    assert n.is_root


def test_forwarding():
    n = node(9)
    n.parent, n.root = 4, 4
    out = forward_to_parent(n, LocationMsg(3, Location(1, 1), 9))
    assert out == LocationMsg(9, Location(1, 1), 4)
    assert forward_to_parent(n, LocationMsg(3, Location(1, 1), 8)) is None
    r = node(4)
    assert forward_to_parent(r, LocationMsg(9, Location(1, 1), 4)) == Location(1, 1)


def test_dropped_root_not_rejoined_through_stale_copy():
    # 9 follows root 5 via 2; 2 switches to a root 9 does not prefer, so 9 resets.
    n = node(9, 100.0, nbrs=(1, 2))
    on_status(n, StatusMsg(2, 5, 500.0))
    assert n.root == 5
    on_status(n, StatusMsg(2, 6, 50.0))
    assert n.is_root
    border_check(n)
    on_status(n, StatusMsg(1, 5, 500.0))  # same epoch, possibly our own former subtree
    assert n.is_root
    on_status(n, StatusMsg(1, 5, 400.0))  # later epoch of root 5: fine
    assert (n.root, n.parent) == (5, 1)


def test_static_scheme_ignores_energy():
    p = ProtocolParams(energy_aware=False)
    n = node(9, 10.0, params=p)
    on_status(n, StatusMsg(4, 4, 1.0), p)
    assert n.root == 4
    on_status(n, StatusMsg(1, 6, 1e9), p)
    assert n.root == 4
