import pytest

from bimnet import build_network, parse_step
from bimnet.fixtures import TwoRoomParams, gen_two_room_floor


@pytest.fixture(scope="session")
def two_room():
    text, manifest = gen_two_room_floor()
    table = parse_step(text)
    return text, manifest, table, build_network(table)


@pytest.fixture(scope="session")
def two_room_pipe():
    text, manifest = gen_two_room_floor(TwoRoomParams(with_pipe=True))
    table = parse_step(text)
    return text, manifest, table, build_network(table)


def node_by_name(net, name):
    return next(n for n in net.nodes if n.semantics.name.endswith(f" {name}"))


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{status} criterion {n:>2}: {title}" + (f" ({detail})" if detail else ""))
