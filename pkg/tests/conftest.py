import numpy as np
import pytest

from edgequant import GainParams, LipschitzBounds, build_certificate, decompose
from edgequant.graph import Digraph, random_quasi_strongly_connected
from edgequant.reference import N_DIM, SIGMA, XI1, XI2, g5_graph

_CRITERIA: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str = "") -> None:
    """Remember an acceptance outcome for the end-of-session summary."""
    line = f"AC{number} {'PASS' if passed else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    _CRITERIA.append(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[0][2:])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def g5():
    return g5_graph()


@pytest.fixture(scope="session")
def g5_dec(g5):
    return decompose(g5)


@pytest.fixture(scope="session")
def g5_cert(g5_dec):
    return build_certificate(g5_dec, GainParams(SIGMA), LipschitzBounds(XI1, XI2), N_DIM)


@pytest.fixture
def two_node():
    return decompose(Digraph.from_edges([(1, 2, 1.0)]))


def random_graphs(count: int, seed: int, max_nodes: int = 8, max_edges: int = 16):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        N = int(rng.integers(2, max_nodes + 1))
        L = int(rng.integers(N - 1, min(N * (N - 1), max_edges) + 1))
        yield random_quasi_strongly_connected(N, L, rng)
