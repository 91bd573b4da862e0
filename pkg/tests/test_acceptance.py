"""Acceptance criteria 1-9. Each test records one PASS/FAIL line, printed in the
terminal summary, and then asserts the same outcome."""

import math
import os
import random
import statistics
import subprocess
import sys
from collections import deque
from functools import lru_cache
from pathlib import Path

import pytest

from conftest import record
from skinmon.aggregation import quantize_angle
from skinmon.engine import (
    active_ids,
    audit_energy,
    boundary_oracle,
    complexity_counters,
    components,
    formation_round,
    init_state,
    step_round,
)
from skinmon.protocol import NodeState, ProtocolParams, border_check, on_status, update_status, wake
from skinmon.radio import RadioParams, rx_energy, tx_energy
from skinmon.types import EnergyBudget, Location, Scheme, SimConfig

SEEDS = range(20)
SCENARIOS = ("oval", "gunshot", "scratch")


# --- 1: root election against a brute-force oracle -------------------------


def random_graph(rng):
    n = rng.randint(2, 100)
    side = rng.uniform(2.0, 10.0)
    r = rng.uniform(0.8, 2.5)
    pts = [(rng.uniform(0, side), rng.uniform(0, side)) for _ in range(n)]
    adj = {i: tuple(j for j in range(n) if j != i and math.dist(pts[i], pts[j]) <= r) for i in range(n)}
    # mix of coarse energies (many ties) and fine ones
    energy = [float(rng.choice([rng.randint(1, 5) * 1000, rng.randint(1, 10**6)])) for _ in range(n)]
    return pts, adj, energy


def bfs(adj, s):
    dist = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def test_criterion_1_root_election_oracle():
    failures = []
    for trial in range(200):
        rng = random.Random(trial)
        pts, adj, energy = random_graph(rng)
        params = ProtocolParams()
        nodes = [NodeState(i, Location(*pts[i]), EnergyBudget(energy[i], energy[i]), adj[i]) for i in adj]
        for n in nodes:
            wake(n, params)
        oracle, diameter = {}, 0
        done = set()
        for s in adj:
            if s in done:
                continue
            comp = list(bfs(adj, s))
            done.update(comp)
            diameter = max(diameter, max(max(bfs(adj, u).values()) for u in comp))
            best = min(comp, key=lambda i: (-energy[i], i))
            oracle.update(dict.fromkeys(comp, best))
        for _ in range(max(diameter, 1)):
            msgs = [update_status(n, params) for n in nodes]
            inbox = {i: [] for i in adj}
            for m in msgs:
                for j in adj[m.sender]:
                    inbox[j].append(m)
            for n in nodes:
                for m in inbox[n.id]:  # ascending sender order
                    on_status(n, m, params)
            for n in nodes:
                border_check(n, params)
        if any(nodes[i].root != oracle[i] for i in adj):
            failures.append(trial)
    ok = not failures
    record(1, ok, f"{200 - len(failures)}/200 random topologies elect the oracle root within D rounds")
    assert ok, failures


# --- 2: boundary reports against the geometric oracle ------------------------


def test_criterion_2_boundary_oracle():
    checked = mismatched = steady = 0
    for seed in range(5):
        st = init_state(SimConfig(wound_scenario="oval", rng_seed=seed))
        comps = components(st.topology.adjacency, active_ids(st.field, st.topology, 0))
        for _ in range(60):
            m = step_round(st, wound_round=0)
            if m.dead_nodes:
                break  # a dead neighbour is only noticed once its alive status runs out
            act = {n.id for n in st.nodes if n.active and n.is_alive}
            checked += 1
            mismatched += set(m.location_origins) != boundary_oracle(st.topology, act) - set(m.root_ids)
            steady += formation_round(st.series[-1:], comps) is not None
    ok = mismatched == 0 and steady > 0
    record(
        2, ok,
        f"{checked - mismatched}/{checked} rounds match (frozen oval, 5 seeds, up to first death; "
        f"{steady} of them with a single formed tree)",
    )
    assert ok


# --- 3: energy exactness -----------------------------------------------------


def test_criterion_3_energy_exactness():
    radio = RadioParams()
    single = abs(tx_energy(radio, 1, 0.0) - 16.7) <= 1e-12 and abs(rx_energy(radio, 1) - 36.1) <= 1e-12
    worst = 0.0
    for sc in SCENARIOS:
        st = init_state(SimConfig(wound_scenario=sc, rng_seed=1, rounds=60))
        for _ in range(60):
            step_round(st)
        audit = audit_energy(st)
        worst = max(worst, abs(st.cum_energy - audit) / audit)
    ok = single and worst <= 1e-9
    record(3, ok, f"unit costs exact to 1e-12: {single}; worst run-vs-audit relative gap {worst:.1e} (<= 1e-9)")
    assert ok


# --- 4: angle quantization ---------------------------------------------------


def test_criterion_4_angle_bins():
    wrong = []
    for k in range(21):
        a = math.radians(18 * k)
        b, _ = quantize_angle(Location(0, 0), Location(math.cos(a), math.sin(a)), 20)
        if b != k % 20:
            wrong.append((18 * k, b))
    ok = not wrong
    record(4, ok, f"k*18 deg -> bin k for k=0..19 and 360 deg -> 0; wrong: {wrong}")
    assert ok


# --- shared 20-seed runs -----------------------------------------------------


@lru_cache(maxsize=None)
def outcome(scenario: str, scheme: Scheme, seed: int):
    cfg = SimConfig(wound_scenario=scenario, scheme=scheme, rng_seed=seed)
    st = init_state(cfg)
    reports = []
    for _ in range(cfg.rounds):
        m = step_round(st)
        reports += [(r.round, r.sign) for r in m.change_reports]
    final = st.series[-1]
    return final.cum_energy_nj, final.dead_nodes, tuple(reports), cfg.wound_growth_rounds


# --- 5: change-report signs --------------------------------------------------


def test_criterion_5_change_signs():
    wrong = total = 0
    for seed in SEEDS:
        *_, reps, _ = outcome("oval", Scheme.PROPOSED, seed)
        total += len(reps)
        wrong += sum(sign != "-" for _, sign in reps)
        *_, reps, growth = outcome("gunshot", Scheme.PROPOSED, seed)
        grow = [sign for t, sign in reps if t < growth]
        total += len(grow)
        wrong += sum(sign != "+" for sign in grow)
    ok = wrong == 0
    record(5, ok, f"{wrong} wrong-sign reports out of {total} (oval all rounds, gunshot growth phase, 20 seeds)")
    assert ok


# --- 6: scheme ordering ------------------------------------------------------


def test_criterion_6_scheme_ordering():
    lines, ok = [], True
    for sc in SCENARIOS:
        means = {}
        for scheme in (Scheme.PROPOSED, Scheme.WOUND_ONLY_STATIC, Scheme.ALL_ACTIVE):
            runs = [outcome(sc, scheme, s) for s in SEEDS]
            means[scheme] = (statistics.fmean(r[0] for r in runs), statistics.fmean(r[1] for r in runs))
        p, s, a = (means[k] for k in (Scheme.PROPOSED, Scheme.WOUND_ONLY_STATIC, Scheme.ALL_ACTIVE))
        good = all(p[i] <= s[i] <= a[i] for i in (0, 1)) and p[0] < a[0]
        ok &= good
        lines.append(
            f"{sc}: E {p[0] / 1e6:.1f}/{s[0] / 1e6:.1f}/{a[0] / 1e6:.1f} mJ, "
            f"dead {p[1]:.2f}/{s[1]:.2f}/{a[1]:.2f} {'ok' if good else 'VIOLATED'}"
        )
    record(6, ok, "P/S/A means over 20 seeds; " + "; ".join(lines))
    assert ok


# --- 7: scratch forms three trees; healed wounds go silent ---------------------


def test_criterion_7_scratch_and_quiescence():
    st = init_state(SimConfig(wound_scenario="scratch", rng_seed=0))
    comps = components(st.topology.adjacency, active_ids(st.field, st.topology, 0))
    for _ in range(30):
        step_round(st, wound_round=0)
    formed = formation_round(st.series, comps)
    three = len(comps) == 3 and formed is not None and len(st.series[formed].root_ids) == 3
    silent = {}
    for sc in SCENARIOS:
        cfg = SimConfig(wound_scenario=sc, rng_seed=0)
        run_ = init_state(cfg)
        quiet = 0
        for _ in range(cfg.rounds):
            m = step_round(run_)
            quiet += m.energy_nj == 0 and m.status_msgs + m.location_msgs + m.change_msgs + m.relay_msgs == 0
        silent[sc] = quiet
    ok = three and all(silent.values())
    record(7, ok, f"scratch: 3 roots by round {formed}; silent rounds per scenario {silent}")
    assert ok


# --- 8: message complexity ---------------------------------------------------


def test_criterion_8_message_complexity():
    worst_s = worst_l = 0.0
    ok = True
    for radius in (1.0, 1.5, 2.0, 3.0, 4.0, 5.0):
        for seed in (0, 1):
            st = init_state(SimConfig(wound_scenario="gunshot", wound_radius=radius, rng_seed=seed))
            for _ in range(40):
                step_round(st, wound_round=0)
            rep = complexity_counters(st.series, st.topology, st.field, wound_round=0, slack=4.0)
            ok &= rep.ok
            worst_s = max(worst_s, rep.status_ratio)
            worst_l = max(worst_l, rep.location_ratio)
    record(8, ok, f"radii 1-5 cm: STATUS <= {worst_s:.2f}*N*D, LOCATION hops/round <= {worst_l:.2f}*D*p (c <= 4)")
    assert ok


# --- 9: byte-identical outputs -----------------------------------------------


def test_criterion_9_byte_identical(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[wound]\nwound_scenario = scratch\n[run]\nrounds = 40\nrng_seed = 7\n")
    dirs = []
    for i, hashseed in enumerate(("1", "2")):
        out = tmp_path / f"out{i}"
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        subprocess.run(
            [sys.executable, "-m", "skinmon.cli", "run", "--config", str(cfg), "--out", str(out)],
            check=True, env=env, capture_output=True,
        )
        dirs.append(out)
    files = sorted(p.relative_to(dirs[0]) for p in dirs[0].rglob("*") if p.is_file())
    differ = [str(f) for f in files if (dirs[0] / f).read_bytes() != (dirs[1] / f).read_bytes()]
    ok = not differ and any(f.suffix == ".svg" for f in files) and Path("metrics.csv") in files
    record(9, ok, f"{len(files)} files (CSV + SVG) from two processes, {len(differ)} differ")
    assert ok
