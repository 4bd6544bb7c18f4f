"""
Tests for state_store.py - JSON documents on disk.
"""

import json

import pytest

from fatgraph_spin import SAMPLE_FATGRAPHS
from piecewise_maps import PiecewiseProjMap
from state_store import (
    StateFormatError,
    dumps,
    load_document,
    load_fatgraph,
    load_map,
    load_state,
    read_json,
    save_map,
    save_state,
    write_json,
    write_text,
)
from tessellation_state import MarkedTessellation, base_state, state_from_json
from tests.conftest import SAMPLE_STATE_JSON


@pytest.mark.unit
class TestReadWrite:
    """Tests for read_json and write_json."""

    def test_missing_file(self):
        """Test error when the file doesn't exist."""
        with pytest.raises(FileNotFoundError) as exc_info:
            read_json("nonexistent_state.json")

        assert "File not found" in str(exc_info.value)

    def test_invalid_json(self, tmp_path):
        """Test error on malformed JSON."""
        path = tmp_path / "broken.json"
        path.write_text("{ not json")

        with pytest.raises(StateFormatError) as exc_info:
            read_json(str(path))

        assert "Invalid JSON" in str(exc_info.value)

    def test_write_creates_directories(self, tmp_path):
        """Test that parent directories are created."""
        path = tmp_path / "nested" / "dir" / "doc.json"
        write_json(str(path), {"x": "1/0"})
        assert json.loads(path.read_text()) == {"x": "1/0"}

    def test_write_text_creates_directories(self, tmp_path):
        """Test that text documents are written under new directories."""
        path = tmp_path / "out" / "drawing.svg"
        write_text(str(path), "<svg/>")
        assert path.read_text() == "<svg/>"

    def test_dumps_keeps_unicode(self):
        """Test that ∞ is written as is."""
        assert "∞" in dumps({"point": "∞"})


@pytest.mark.unit
class TestDocuments:
    """Tests for the typed loaders."""

    def test_state_file(self, tmp_path, sample_state_json):
        """Test saving and loading a marked state."""
        path = tmp_path / "state.json"
        save_state(str(path), state_from_json(sample_state_json))
        loaded = load_state(str(path))
        assert loaded.to_json() == SAMPLE_STATE_JSON

    def test_state_must_be_object(self, tmp_path):
        """Test error when a state file holds a list."""
        path = tmp_path / "state.json"
        path.write_text("[1, 2]")

        with pytest.raises(StateFormatError) as exc_info:
            load_state(str(path))

        assert "does not hold a state object" in str(exc_info.value)

    def test_map_file(self, tmp_path, sample_map_json):
        """Test saving and loading a piecewise map."""
        path = tmp_path / "map.json"
        save_map(str(path), PiecewiseProjMap.identity())
        assert load_map(str(path)).is_identity()

        path.write_text(json.dumps(sample_map_json))
        assert not load_map(str(path)).is_identity()

    def test_fatgraph_file(self, tmp_path, torus_graph):
        """Test loading a fatgraph with its orientation."""
        path = tmp_path / "graph.json"
        write_json(str(path), torus_graph.to_json(orient=(0, 1, 1)))
        graph, orient = load_fatgraph(str(path))
        assert graph == SAMPLE_FATGRAPHS["F11"]
        assert orient == (0, 1, 1)

    def test_load_document_dispatch(self, tmp_path, sample_state_json, sample_map_json):
        """Test that load_document tells states from maps."""
        state_path = tmp_path / "state.json"
        map_path = tmp_path / "map.json"
        state_path.write_text(json.dumps(sample_state_json))
        map_path.write_text(json.dumps(sample_map_json))

        assert isinstance(load_document(str(state_path)), MarkedTessellation)
        assert isinstance(load_document(str(map_path)), PiecewiseProjMap)

    def test_load_document_unknown_shape(self, tmp_path):
        """Test error on a document that is neither state nor map."""
        path = tmp_path / "other.json"
        path.write_text(json.dumps({"hello": "world"}))

        with pytest.raises(StateFormatError) as exc_info:
            load_document(str(path))

        assert "neither a state nor a piecewise map" in str(exc_info.value)

    def test_base_state_written_form(self, tmp_path):
        """Test the on-disk form of the base state."""
        path = tmp_path / "base.json"
        save_state(str(path), base_state())
        data = json.loads(path.read_text())
        assert data["doe"] == ["0/1", "1/0"]
        assert data["marks"] == []
