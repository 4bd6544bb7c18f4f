"""
Tests for main.py - the command-line surface and its exit codes.
"""

import json

import pytest

import config
from main import EXIT_ERROR, EXIT_FALSE, EXIT_TRUE, build_parser, main
from piecewise_maps import equal, map_from_json
from state_store import load_map, load_state, write_json
from tessellation_state import base_state


@pytest.fixture
def state_files(tmp_path, sample_state_json):
    """A marked state and the unmarked base state on disk."""
    marked = tmp_path / "marked.json"
    base = tmp_path / "base.json"
    write_json(str(marked), sample_state_json)
    write_json(str(base), base_state().to_json())
    return str(marked), str(base)


def stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


@pytest.mark.unit
class TestParser:
    """Tests for argument parsing."""

    def test_global_options(self):
        """Test that global options come before the subcommand."""
        args = build_parser().parse_args(["--json", "--seed", "7", "eval", "ab"])
        assert args.json
        assert args.seed == 7
        assert args.command == "eval"
        assert args.word == "ab"

    def test_unknown_suite(self):
        """Test that argparse rejects an unknown suite."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["suite", "nonsense"])

    def test_render_needs_output(self):
        """Test that render requires -o."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["render", "state.json"])


@pytest.mark.unit
class TestWordCommands:
    """Tests for eval and map."""

    def test_eval_t(self, capsys):
        """Test that t marks the edge (0, 1)."""
        assert main(["eval", "t"]) == EXIT_TRUE
        data = stdout_json(capsys)
        assert data["marks"] == [["0/1", "1/1"]]
        assert data["doe"] == ["0/1", "1/0"]

    def test_map_of_t_squared(self, capsys):
        """Test that t² maps to the identity."""
        assert main(["map", "t^2"]) == EXIT_TRUE
        assert stdout_json(capsys) == {
            "kind": "sl",
            "pieces": [{"from": "1/0", "mat": [[1, 0], [0, 1]]}],
        }

    def test_bad_word(self):
        """Test exit code 2 on a syntax error."""
        assert main(["map", "ax"]) == EXIT_ERROR

    def test_eval_saves_state(self, capsys, tmp_path):
        """Test that -o writes the state instead of printing it."""
        out = tmp_path / "states" / "t.json"
        assert main(["eval", "t", "-o", str(out)]) == EXIT_TRUE
        assert capsys.readouterr().out == ""
        assert load_state(str(out)).to_json()["marks"] == [["0/1", "1/1"]]

    def test_map_saves_map(self, tmp_path):
        """Test that -o writes the piecewise map."""
        out = tmp_path / "t2.json"
        assert main(["map", "t^2", "-o", str(out)]) == EXIT_TRUE
        assert load_map(str(out)).is_identity()


@pytest.mark.unit
class TestFileCommands:
    """Tests for commands reading state and map files."""

    def test_charmap_of_base(self, capsys, state_files):
        """Test that the base state has identity characteristic map."""
        _, base = state_files
        assert main(["charmap", base]) == EXIT_TRUE
        assert stdout_json(capsys)["pieces"] == [{"from": "1/0", "mat": [[1, 0], [0, 1]]}]

    def test_compose(self, capsys, tmp_path, sample_map_json):
        """Test S ∘ S = id."""
        path = tmp_path / "s.json"
        write_json(str(path), sample_map_json)
        assert main(["compose", str(path), str(path)]) == EXIT_TRUE
        assert stdout_json(capsys)["pieces"] == [{"from": "1/0", "mat": [[1, 0], [0, 1]]}]

    def test_compose_state_operands(self, capsys, state_files):
        """Test that a state file stands for its spin lift."""
        marked, _ = state_files
        assert main(["compose", marked, marked]) == EXIT_TRUE
        data = stdout_json(capsys)
        assert data["kind"] == "sl"
        assert data["pieces"] == [{"from": "1/0", "mat": [[1, 0], [0, 1]]}]

    def test_compose_mixed_kinds(self, capsys, tmp_path, state_files, sample_map_json):
        """Test that a signed operand is projectivized against a projective one."""
        marked, _ = state_files
        path = tmp_path / "s.json"
        write_json(str(path), sample_map_json)
        assert main(["compose", str(path), marked]) == EXIT_TRUE
        assert equal(map_from_json(stdout_json(capsys)), map_from_json(sample_map_json))

    def test_equiv_false(self, capsys, state_files):
        """Test exit code 1 for inequivalent markings."""
        marked, base = state_files
        assert main(["equiv", marked, base]) == EXIT_FALSE
        assert stdout_json(capsys) is False

    def test_equiv_true_json(self, capsys, state_files):
        """Test the JSON answer for equal states."""
        marked, _ = state_files
        assert main(["--json", "equiv", marked, marked]) == EXIT_TRUE
        assert stdout_json(capsys) == {"equal": True}

    def test_missing_file(self, tmp_path):
        """Test exit code 2 when a file is missing."""
        assert main(["charmap", str(tmp_path / "missing.json")]) == EXIT_ERROR

    def test_render(self, tmp_path, state_files, monkeypatch):
        """Test that render writes an SVG document."""
        monkeypatch.setattr(config, "RENDER_CONFIG_PATH", None)
        marked, _ = state_files
        out = tmp_path / "out.svg"
        assert main(["--depth", "2", "render", marked, "-o", str(out)]) == EXIT_TRUE
        assert out.read_text().startswith("<svg")

    def test_render_creates_directories(self, tmp_path, state_files, monkeypatch):
        """Test that render creates missing parent directories."""
        monkeypatch.setattr(config, "RENDER_CONFIG_PATH", None)
        marked, _ = state_files
        out = tmp_path / "drawings" / "state.svg"
        assert main(["--depth", "1", "render", marked, "-o", str(out)]) == EXIT_TRUE
        assert out.read_text().startswith("<svg")

    def test_render_with_config_file(self, tmp_path, state_files, monkeypatch):
        """Test that the render config file sets the canvas size."""
        cfg = tmp_path / "render.json"
        cfg.write_text(json.dumps({"size": 300, "stroke_width": 2.0, "depth": 1}))
        monkeypatch.setattr(config, "RENDER_CONFIG_PATH", str(cfg))
        _, base = state_files
        out = tmp_path / "out.svg"
        assert main(["render", base, "-o", str(out)]) == EXIT_TRUE
        assert 'width="300"' in out.read_text()


@pytest.mark.unit
class TestMiscCommands:
    """Tests for minkowski, fatgraph and suite."""

    def test_minkowski(self, capsys):
        """Test ?(2/5) = 3/8."""
        assert main(["minkowski", "2/5"]) == EXIT_TRUE
        assert stdout_json(capsys) == "3/8"

    def test_minkowski_json(self, capsys):
        """Test the JSON form."""
        assert main(["--json", "minkowski", "1/3"]) == EXIT_TRUE
        assert stdout_json(capsys) == {"x": "1/3", "q": "1/4"}

    def test_minkowski_infinity(self):
        """Test exit code 2 at ∞."""
        assert main(["minkowski", "inf"]) == EXIT_ERROR

    def test_fatgraph_classes(self, capsys):
        """Test the class listing of the torus sample."""
        assert main(["fatgraph", "classes", "F11"]) == EXIT_TRUE
        data = stdout_json(capsys)
        assert (data["V"], data["E"], data["s"], data["g"]) == (2, 3, 1, 1)
        assert data["count"] == 4
        assert len(data["classes"]) == 4

    def test_fatgraph_ramond(self, capsys):
        """Test one entry per puncture."""
        assert main(["fatgraph", "ramond", "F03"]) == EXIT_TRUE
        assert len(stdout_json(capsys)) == 3

    def test_fatgraph_flip(self, capsys):
        """Test that a flip returns a fatgraph with its orientation."""
        assert main(["fatgraph", "flip", "F04", "--edge", "1"]) == EXIT_TRUE
        data = stdout_json(capsys)
        assert len(data["orient"]) == 6
        assert len(data["vertex_cycles"]) == 4

    def test_fatgraph_flip_loop(self, tmp_path):
        """Test exit code 2 when flipping a loop."""
        path = tmp_path / "dumbbell.json"
        write_json(
            str(path),
            {"vertex_cycles": [[0, 1, 2], [3, 4, 5]], "edge_pairing": [[0, 1], [2, 3], [4, 5]]},
        )
        assert main(["fatgraph", "flip", str(path), "--edge", "0"]) == EXIT_ERROR

    def test_fatgraph_suite(self, capsys):
        """Test that the fatgraph suite passes."""
        assert main(["suite", "fatgraph"]) == EXIT_TRUE
        reports = stdout_json(capsys)
        assert reports[0]["suite"] == "fatgraph"
        assert reports[0]["passed"]

    @pytest.mark.slow
    def test_verify_relators(self, capsys):
        """Test that every relator fixes the characteristic map."""
        assert main(["verify-relators"]) == EXIT_TRUE
        reports = stdout_json(capsys)
        assert len(reports) == 5
        assert all(r["charmap_identity"] for r in reports)

    def test_keyboard_interrupt(self, mocker):
        """Test that an interrupt exits cleanly."""
        mocker.patch("main.run_suite", side_effect=KeyboardInterrupt)
        assert main(["suite", "all"]) == EXIT_TRUE

    def test_unexpected_error(self, mocker):
        """Test exit code 2 on an unexpected exception."""
        mocker.patch("main.evaluate_word", side_effect=RuntimeError("boom"))
        assert main(["eval", "a"]) == EXIT_ERROR
