import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from instances import myciel_graph, queen_graph, triangle  # noqa: E402


@pytest.fixture(scope="session")
def queen55():
    return queen_graph(5, 5)


@pytest.fixture(scope="session")
def queen1111():
    return queen_graph(11, 11)


@pytest.fixture(scope="session")
def myciel5():
    return myciel_graph(5)


@pytest.fixture
def k3():
    return triangle()
