from skinmon.engine import build_topology, components
from skinmon.types import Location, SimConfig
from skinmon.wound import Capsule, Disk, Ellipse, WoundField, active_sensor_set, is_abnormal
import random


def field(scenario, **kw):
    return WoundField.from_config(SimConfig(wound_scenario=scenario, **kw))


def grid(step=0.25, size=20.0):
    n = int(size / step)
    return [Location(i * step, j * step) for i in range(n + 1) for j in range(n + 1)]


def test_primitives():
    assert Disk(0, 0, 1).contains(1, 0)
    assert not Disk(0, 0, 1).contains(1, 0.01)
    assert not Disk(0, 0, 0).contains(0, 0)
    assert Ellipse(0, 0, 2, 1).contains(2, 0) and not Ellipse(0, 0, 2, 1).contains(0, 1.5)
    cap = Capsule(0, 0, 4, 0, 1)
    assert cap.contains(2, 1) and cap.contains(5, 0) and not cap.contains(5.1, 0)


def test_healed_everywhere():
    for sc in ("oval", "gunshot", "scratch"):
        f = field(sc)
        h = f.healed_round
        assert f.shapes(h) == []
        assert not any(is_abnormal(f, p, h) for p in grid(1.0))
        assert not any(f.is_abnormal(p, h + 50) for p in grid(1.0))


def test_gunshot_centre_active_at_start():
    f = field("gunshot")
    assert is_abnormal(f, Location(10.0, 10.0), 0)


def test_gunshot_grows_then_shrinks():
    f = field("gunshot")
    pts = grid()
    at0 = {p for p in pts if f.is_abnormal(p, 0)}
    peak = {p for p in pts if f.is_abnormal(p, f.growth_rounds)}
    assert at0 < peak
    later = {p for p in pts if f.is_abnormal(p, f.growth_rounds + 30)}
    assert later < peak


def test_oval_only_shrinks():
    f = field("oval")
    pts = grid(0.5)
    prev = {p for p in pts if f.is_abnormal(p, 0)}
    for t in range(5, f.healed_round + 1, 5):
        cur = {p for p in pts if f.is_abnormal(p, t)}
        assert cur <= prev
        prev = cur


def test_scratch_three_components_at_start():
    cfg = SimConfig(wound_scenario="scratch")
    topo = build_topology(cfg, random.Random(0))
    f = WoundField.from_config(cfg)
    act = active_sensor_set(f, topo.sensors, 0)
    assert len(components(topo.adjacency, act)) == 3


def test_active_set_is_predicate_scan():
    cfg = SimConfig(wound_scenario="oval")
    topo = build_topology(cfg, random.Random(3))
    f = WoundField.from_config(cfg)
    t = f.healed_round // 2
    expect = {nid for nid, loc in topo.sensors if f.is_abnormal(loc, t)}
    assert active_sensor_set(f, topo.sensors, t) == expect
    assert expect
