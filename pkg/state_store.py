"""
JSON files for states, piecewise maps and fatgraphs.

Each document carries its own schema (see the to_json methods); this
module only reads, writes and dispatches on the document shape.
"""

import json
import logging
import os
from typing import Any, Union

from fatgraph_spin import fatgraph_from_json
from piecewise_maps import PiecewiseMap, map_from_json
from tessellation_state import MarkedTessellation, state_from_json

logger = logging.getLogger(__name__)


class StateFormatError(ValueError):
    """Raised when a JSON document is unreadable or has the wrong shape."""


def read_json(path: str) -> Any:
    """
    Read a JSON document.

    Args:
        path: Path to the JSON file

    Returns:
        The decoded document

    Raises:
        FileNotFoundError: If the file doesn't exist
        StateFormatError: If the file is not valid JSON
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"File not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise StateFormatError(f"Invalid JSON in {path}: {e}")
    logger.info(f"Loaded {path}")
    return data


def write_text(path: str, text: str):
    """
    Write a text document, creating parent directories.

    Args:
        path: Destination path
        text: File contents
    """
    parent = os.path.dirname(path)
    if parent and not os.path.exists(parent):
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info(f"Wrote {path}")


def write_json(path: str, data: Any):
    """Write a JSON document through write_text."""
    write_text(path, dumps(data) + "\n")


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False)


def load_state(path: str) -> MarkedTessellation:
    data = read_json(path)
    if not isinstance(data, dict):
        raise StateFormatError(f"{path} does not hold a state object")
    return state_from_json(data)


def save_state(path: str, state: MarkedTessellation):
    write_json(path, state.to_json())


def load_map(path: str) -> PiecewiseMap:
    data = read_json(path)
    if not isinstance(data, dict):
        raise StateFormatError(f"{path} does not hold a map object")
    return map_from_json(data)


def save_map(path: str, phi: PiecewiseMap):
    write_json(path, phi.to_json())


def load_fatgraph(path: str):
    data = read_json(path)
    if not isinstance(data, dict):
        raise StateFormatError(f"{path} does not hold a fatgraph object")
    return fatgraph_from_json(data)


def load_document(path: str) -> Union[MarkedTessellation, PiecewiseMap]:
    """Load a state or a map, deciding by the keys present."""
    data = read_json(path)
    if isinstance(data, dict) and "kind" in data:
        return map_from_json(data)
    if isinstance(data, dict) and "support" in data:
        return state_from_json(data)
    raise StateFormatError(f"{path} is neither a state nor a piecewise map")
