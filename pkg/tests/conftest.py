import json
from importlib import resources

import pytest

from padic_psi.cli import psi_table


@pytest.fixture(scope="session")
def table():
    """Cached series tables: table(p, f, N)."""
    return psi_table


def load_fixture(name: str) -> dict:
    return json.loads(resources.files("padic_psi").joinpath("data", name).read_text())


@pytest.fixture(scope="session")
def fixtures():
    return load_fixture
