"""Deterministic file output helpers and the SVG renderer."""

import numpy as np
import pytest

from metaplan import parse_maze
from metaplan.outputs import (atomic_write_text, config_hash, format_value,
                              read_csv, write_csv, write_json)
from metaplan.render import render_heatmap_svg


class TestFormatValue:
    def test_floats_roundtrip_exactly(self):
        rng = np.random.default_rng(0)
        for x in rng.normal(scale=1e3, size=50):
            assert float(format_value(float(x))) == float(x)
        for x in (0.1, 1e-300, 1e300, -0.0):
            assert float(format_value(x)) == x

    def test_ints_plain(self):
        assert format_value(7) == "7"
        assert format_value(np.int64(-3)) == "-3"

    def test_bools_as_ints(self):
        assert format_value(True) == "1"
        assert format_value(np.bool_(False)) == "0"

    def test_strings_unchanged(self):
        assert format_value("maze_0001") == "maze_0001"


class TestConfigHash:
    def test_stable_under_key_order(self):
        assert config_hash({"a": 1, "b": 2.5}) == config_hash({"b": 2.5,
                                                               "a": 1})

    def test_sensitive_to_values(self):
        assert config_hash({"a": 1}) != config_hash({"a": 2})

    def test_short_hex(self):
        h = config_hash({"seed": 0})
        assert len(h) == 12 and int(h, 16) >= 0


class TestAtomicWrite:
    def test_writes_and_replaces(self, tmp_path):
        p = tmp_path / "out.txt"
        atomic_write_text(p, "one\n")
        atomic_write_text(p, "two\n")
        assert p.read_text() == "two\n"
        assert list(tmp_path.iterdir()) == [p]  # no temp files left behind


class TestCsv:
    def test_metadata_and_header(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(p, ["a", "b"], [(1, 0.5), (2, 1.5)],
                  metadata={"seed": 3, "tag": "x"})
        text = p.read_text()
        assert text.startswith("# seed=3 tag=x\n")
        assert text.splitlines()[1] == "a,b"

    def test_byte_identical_rewrite(self, tmp_path):
        p = tmp_path / "t.csv"
        rows = [(i, np.sqrt(i)) for i in range(20)]
        write_csv(p, ["i", "root"], rows, metadata={"seed": 0})
        first = p.read_bytes()
        write_csv(p, ["i", "root"], rows, metadata={"seed": 0})
        assert p.read_bytes() == first

    def test_read_roundtrip(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(p, ["x", "y"], [(1.5, "a"), (2.5, "b")],
                  metadata={"seed": 1})
        header, rows = read_csv(p)
        assert header == ["x", "y"]
        assert rows == [["1.5", "a"], ["2.5", "b"]]

    def test_full_precision_floats(self, tmp_path):
        p = tmp_path / "t.csv"
        x = 0.1 + 0.2  # classic: needs all 17 digits
        write_csv(p, ["v"], [(x,)])
        _, rows = read_csv(p)
        assert float(rows[0][0]) == x

    def test_read_empty_raises(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("# only metadata\n")
        with pytest.raises(ValueError, match="empty"):
            read_csv(p)


class TestJson:
    def test_deterministic(self, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        write_json(p1, {"b": 2, "a": [1, 2]})
        write_json(p2, {"a": [1, 2], "b": 2})
        assert p1.read_bytes() == p2.read_bytes()


class TestRenderHeatmap:
    MAZE = "G..\n.#.\n..S\n"

    def test_svg_structure(self):
        maze = parse_maze(self.MAZE)
        values = np.linspace(0.0, 1.0, maze.n_open)
        svg = render_heatmap_svg(maze, values, threshold=0.2)
        assert svg.startswith("<svg ")
        assert svg.rstrip().endswith("</svg>")
        assert ">S</text>" in svg and ">G</text>" in svg
        assert svg.count("#3a3a3a") == 1  # the single wall cell

    def test_below_threshold_blank_above_shaded(self):
        maze = parse_maze(self.MAZE)
        values = np.zeros(maze.n_open)
        values[0] = 1.0
        svg = render_heatmap_svg(maze, values, threshold=0.5)
        # exactly one saturated cell, everything else white
        assert svg.count('fill="#d73027"') == 1
        assert 'fill="white"' in svg

    def test_value_count_checked(self):
        maze = parse_maze(self.MAZE)
        with pytest.raises(ValueError, match="one value per open cell"):
            render_heatmap_svg(maze, np.zeros(3))

    def test_tooltips_name_states(self):
        maze = parse_maze(self.MAZE)
        svg = render_heatmap_svg(maze, np.zeros(maze.n_open))
        assert "<title>state 0 (0,0):" in svg
