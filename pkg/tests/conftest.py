"""Pytest fixtures for testing qlab."""

import os
import sys

import pytest
import yaml

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from algebra import make_boolean, make_godel_chain, make_lukasiewicz_chain  # noqa: E402
from catalog import get_frame  # noqa: E402
from config import config  # noqa: E402
from forcing import KripkeModel  # noqa: E402
from frames import Conucleus, enumerate_p_star  # noqa: E402
from logic import Letter  # noqa: E402


@pytest.fixture(autouse=True)
def restore_config():
    """Undo CLI overrides of the global configuration after each test."""
    saved = dict(vars(config))
    yield
    config.__dict__.clear()
    config.__dict__.update(saved)


@pytest.fixture
def mock_env_vars():
    """Set up environment variables for Config tests."""
    os.environ["LOG_LEVEL"] = "DEBUG"
    os.environ["QLAB_SUBSET_BOUND"] = "4"
    os.environ["QLAB_BUDGET"] = "5_000"
    os.environ["QLAB_SEED"] = "7"
    os.environ["QLAB_EQUALITY"] = "Symmetric"

    yield

    for key in ["LOG_LEVEL", "QLAB_SUBSET_BOUND", "QLAB_BUDGET", "QLAB_SEED", "QLAB_EQUALITY"]:
        os.environ.pop(key, None)


@pytest.fixture
def boolean2():
    return make_boolean()


@pytest.fixture
def godel3():
    return make_godel_chain(3)


@pytest.fixture
def lukasiewicz3():
    return make_lukasiewicz_chain(3)


@pytest.fixture
def chain2():
    """Two-world frame {1 < inf}."""
    return get_frame("chain2")


@pytest.fixture
def dual_godel3():
    """Frame 1 < 1/2 < inf with product max."""
    return get_frame("dual-godel3")


@pytest.fixture
def dual_godel3_pstar(dual_godel3):
    return enumerate_p_star(dual_godel3)


@pytest.fixture
def letter_model(dual_godel3):
    """Identity δ, letter a forced from 1/2 up, letter b only at inf."""
    P = dual_godel3
    half, inf = P.index("1/2"), P.index("inf")

    return KripkeModel(
        P,
        Conucleus.identity(P),
        atomic={Letter("a"): [half, inf], Letter("b"): [inf]},
    )


@pytest.fixture
def write_document(tmp_path):
    """Write a mapping as a YAML file and return its path."""

    def write(data: dict, name: str = "doc.yaml") -> str:
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data, sort_keys=False), encoding="utf-8")
        return str(path)

    return write
