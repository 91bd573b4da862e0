import pytest

from skinmon.engine import init_state, step_round
from skinmon.types import SimConfig


def cycles(state):
    """Active nodes whose parent chain never reaches a self-rooted node."""
    nodes = state.nodes
    bad = []
    for n in nodes:
        if not (n.active and n.is_alive):
            continue
        cur, seen = n, set()
        while cur.parent != cur.id:
            if cur.id in seen:
                bad.append(n.id)
                break
            seen.add(cur.id)
            nxt = nodes[cur.parent]
            if not (nxt.active and nxt.is_alive):
                break  # dangling pointer to a node that just left; cleared by its alive status
            cur = nxt
    return bad


def stepped(config: SimConfig, rounds: int, *, wound_round=None):
    st = init_state(config)
    for _ in range(rounds):
        step_round(st, wound_round)
    return st


@pytest.fixture(scope="session")
def oval_run():
    return stepped(SimConfig(wound_scenario="oval", rng_seed=0), 120)


ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
