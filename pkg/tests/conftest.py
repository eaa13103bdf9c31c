import sys
from pathlib import Path

import pytest

from vanilla.cintable import parse_cin

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def t1_path() -> Path:
    return FIXTURES / "T1.cin"


@pytest.fixture(scope="session")
def t1_source(t1_path) -> str:
    return t1_path.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def t1(t1_source):
    table, diags = parse_cin(t1_source)
    assert not diags
    return table
