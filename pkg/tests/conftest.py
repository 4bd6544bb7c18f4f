"""
Shared test fixtures and configurations for pytest.
"""

import pytest
import numpy as np

from modular_arithmetic import ExtRational

# Sample rational points
HALF = ExtRational.of(1, 2)
TWO = ExtRational.of(2)
MINUS_TWO = ExtRational.of(-2)

# Pentagon support obtained by growing the base quadrilateral across (1, ∞)
PENTAGON = ("-1/1", "0/1", "1/1", "2/1", "1/0")

SAMPLE_STATE_JSON = {
    "support": ["-1/1", "0/1", "1/1", "1/0"],
    "diagonals": [["0/1", "1/0"]],
    "doe": ["0/1", "1/0"],
    "marks": [["0/1", "1/1"]],
}

SAMPLE_MAP_JSON = {
    "kind": "psl",
    "pieces": [{"from": "1/0", "mat": [[0, -1], [1, 0]]}],
}


def q(text: str) -> ExtRational:
    """Shorthand for parsing a rational point."""
    return ExtRational.parse(text)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for randomized checks."""
    return np.random.default_rng(0)


@pytest.fixture
def sample_state_json() -> dict:
    """Base quadrilateral with a mark on (0, 1)."""
    return {k: list(v) for k, v in SAMPLE_STATE_JSON.items()}


@pytest.fixture
def sample_map_json() -> dict:
    """The single-piece map S."""
    return {"kind": SAMPLE_MAP_JSON["kind"], "pieces": list(SAMPLE_MAP_JSON["pieces"])}


@pytest.fixture
def torus_graph():
    """Theta graph spine of the once-punctured torus."""
    from fatgraph_spin import SAMPLE_FATGRAPHS

    return SAMPLE_FATGRAPHS["F11"]


@pytest.fixture
def sphere_graph():
    """Theta graph spine of the thrice-punctured sphere."""
    from fatgraph_spin import SAMPLE_FATGRAPHS

    return SAMPLE_FATGRAPHS["F03"]
