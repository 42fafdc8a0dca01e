"""Command-line behavior: exit codes, text output, JSON output, and
document generation."""

import json
from fractions import Fraction as F

import pytest

from flowscope.cli import main
from flowscope.document import document_from_parts, parse_document, save_document
from flowscope.monitoring import validate_placement
from flowscope.network import RoadNetwork
from flowscope.scenarios import (
    crossed_pairs_demo,
    crossed_pairs_placement,
    gateway_demo,
    gateway_observations,
    pentagon_demo,
    pentagon_observations,
)

from oracles import PENTAGON_BALANCING


@pytest.fixture
def gateway_file(tmp_path):
    doc = document_from_parts(gateway_demo(), placement=gateway_observations())
    path = tmp_path / "gateway.net"
    save_document(doc, path)
    return str(path)


@pytest.fixture
def pentagon_file(tmp_path):
    doc = document_from_parts(pentagon_demo(), placement=pentagon_observations())
    path = tmp_path / "pentagon.net"
    save_document(doc, path)
    return str(path)


@pytest.fixture
def crossed_file(tmp_path):
    doc = document_from_parts(
        crossed_pairs_demo(), monitored=crossed_pairs_placement().monitored
    )
    path = tmp_path / "crossed.net"
    save_document(doc, path)
    return str(path)


class TestVerify:
    def test_calculable_placement(self, pentagon_file, capsys):
        code = main(["verify", pentagon_file])
        out = capsys.readouterr().out
        assert code == 0
        assert "overall: calculable" in out
        assert "tree-shaped with one disjoint route" in out

    def test_bottleneck_exits_two(self, gateway_file, capsys):
        code = main(["verify", gateway_file])
        out = capsys.readouterr().out
        assert code == 2
        assert "overall: not_calculable" in out
        assert "smallest separator: {d} (size 1)" in out
        assert "route: e -> d" in out
        assert "blocked centroid: f" in out

    def test_undetermined_without_fallback_exits_three(self, crossed_file, capsys):
        code = main(["verify", crossed_file, "--no-rank-fallback"])
        out = capsys.readouterr().out
        assert code == 3
        assert "overall: undetermined" in out
        assert "contains cycles" in out

    def test_fallback_refutes_crossed_pairs(self, crossed_file, capsys):
        code = main(["verify", crossed_file])
        out = capsys.readouterr().out
        assert code == 2
        assert "block rank: 3 of 4 columns" in out

    def test_json_output(self, gateway_file, capsys):
        code = main(["verify", gateway_file, "--json"])
        data = json.loads(capsys.readouterr().out)
        assert code == 2
        assert data["overall"] == "not_calculable"
        assert data["components"][0]["blocked_centroids"] == ["f"]

    def test_monitor_override(self, gateway_file, capsys):
        code = main(["verify", gateway_file, "--monitored", "d"])
        out = capsys.readouterr().out
        assert code == 0
        assert "overall: calculable" in out

    def test_unknown_override_vertex(self, gateway_file, capsys):
        code = main(["verify", gateway_file, "--monitored", "zz"])
        err = capsys.readouterr().err
        assert code == 1
        assert "error: unknown vertices: zz" in err

    def test_missing_file(self, capsys):
        code = main(["verify", "/nonexistent/road.net"])
        err = capsys.readouterr().err
        assert code == 1
        assert "error: no such file" in err

    def test_broken_document(self, tmp_path, capsys):
        path = tmp_path / "broken.net"
        path.write_text("[vertices]\na\n[arcs]\na a\n", encoding="utf-8")
        code = main(["verify", str(path)])
        err = capsys.readouterr().err
        assert code == 1
        assert "line 4" in err

    def test_strict_mode_rejects_undeducible_border(self, tmp_path, capsys):
        net = RoadNetwork.from_edges(
            ["m", "w", "x"],
            [("m", "w"), ("w", "x")],
            ratios={
                ("m", "w"): F(1), ("w", "m"): F(0),
                ("w", "x"): F(1), ("x", "w"): F(1),
            },
        )
        path = tmp_path / "zero.net"
        save_document(document_from_parts(net, monitored=frozenset({"m"})), path)
        relaxed = main(["verify", str(path)])
        capsys.readouterr()
        strict = main(["verify", str(path), "--strict"])
        err = capsys.readouterr().err
        assert relaxed == 2
        assert strict == 1
        assert "no nonzero-ratio arc into the monitored set from: w" in err


class TestSolve:
    def test_json_solution(self, pentagon_file, capsys):
        code = main(["solve", pentagon_file, "--json"])
        data = json.loads(capsys.readouterr().out)
        assert code == 0
        assert data["balancing"] == {
            v: str(x) for v, x in PENTAGON_BALANCING.items()
        }
        flows = {(f["tail"], f["head"]): f["flow"] for f in data["flows"]}
        assert flows[("a", "b")] == "5"
        assert flows[("d", "e")] == "1"
        assert len(flows) == 14

    def test_plain_solution(self, pentagon_file, capsys):
        code = main(["solve", pentagon_file])
        out = capsys.readouterr().out
        assert code == 0
        assert "S[b] 10" in out
        assert "S[d] -6" in out
        lines = [line.split() for line in out.splitlines() if "->" in line]
        assert ["a->b", "5"] in lines

    def test_not_calculable_exits_two(self, gateway_file, capsys):
        code = main(["solve", gateway_file])
        err = capsys.readouterr().err
        assert code == 2
        assert "cannot solve: placement is not calculable" in err
        assert "cannot reach the border" in err

    def test_not_calculable_json(self, gateway_file, capsys):
        code = main(["solve", gateway_file, "--json"])
        data = json.loads(capsys.readouterr().out)
        assert code == 2
        assert data["error"] == "placement is not calculable"
        assert data["diagnosis"]["overall"] == "not_calculable"


class TestExplain:
    def test_obstruction_text(self, gateway_file, capsys):
        code = main(["explain", gateway_file])
        out = capsys.readouterr().out
        assert code == 2
        assert "rank obstruction:" in out
        assert "columns (4): f[e->d], f[f->d], S[e], S[f]" in out
        assert "zero rows (2): b, c" in out
        assert "rank bound 3 < 4 columns" in out

    def test_json_obstruction(self, gateway_file, capsys):
        code = main(["explain", gateway_file, "--json"])
        data = json.loads(capsys.readouterr().out)
        assert code == 2
        assert data["component"]["verdict"] == "not_calculable"
        assert data["obstruction"]["rank_bound"] == 3
        assert data["obstruction"]["zero_rows"] == ["b", "c"]

    def test_calculable_component_has_no_obstruction(self, pentagon_file, capsys):
        code = main(["explain", pentagon_file])
        out = capsys.readouterr().out
        assert code == 0
        assert "rank obstruction:" not in out

    def test_unknown_component(self, gateway_file, capsys):
        code = main(["explain", gateway_file, "--component", "7"])
        err = capsys.readouterr().err
        assert code == 1
        assert "no unmonitored component with index 7" in err


class TestGenerate:
    def test_grid_with_listed_rules(self, tmp_path, capsys):
        out_file = tmp_path / "grid.net"
        code = main([
            "generate", "grid", "--width", "4", "--height", "3",
            "--centroids", "list:n0x0,n2x3", "--monitors", "list:n1x1",
            "-o", str(out_file),
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert f"wrote {out_file}" in out
        doc = parse_document(out_file.read_text(encoding="utf-8"))
        assert len(doc.network.vertices) == 12
        assert doc.network.centroids == frozenset({"n0x0", "n2x3"})
        assert doc.monitored == frozenset({"n1x1"})
        assert doc.observed_flow is None

    def test_stdout_document_parses(self, capsys):
        code = main(["generate", "random_tree", "--size", "8", "--seed", "5",
                     "--centroids", "none", "--monitors", "none"])
        out = capsys.readouterr().out
        assert code == 0
        doc = parse_document(out)
        assert len(doc.network.vertices) == 8

    def test_observe_produces_valid_observations(self, capsys):
        code = main([
            "generate", "random_tree", "--size", "9", "--seed", "3",
            "--ratios", "random", "--observe",
        ])
        out = capsys.readouterr().out
        assert code == 0
        doc = parse_document(out)
        assert doc.placement.has_observations
        assert validate_placement(doc.network, doc.placement) == []
