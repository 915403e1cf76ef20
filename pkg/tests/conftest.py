from pathlib import Path

import pytest

from abducer import parse_network, parse_recognition_kb

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fig2_path() -> Path:
    return FIXTURES / "fig2.cnet"


@pytest.fixture(scope="session")
def fruits_path() -> Path:
    return FIXTURES / "fruits.rkb"


@pytest.fixture(scope="session")
def fig2(fig2_path):
    return parse_network(fig2_path.read_text())


@pytest.fixture(scope="session")
def fruits(fruits_path):
    return parse_recognition_kb(fruits_path.read_text())
