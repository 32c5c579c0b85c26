"""End-to-end command line tests, driven through main(argv).

Exit codes under test: 0 success, 1 verification or validation failure,
2 usage or input errors, 3 resource caps.
"""

from __future__ import annotations

import json

import pytest

from thetaran.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_json(path, doc):
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


VALID_SPLIT = {
    "dimension": 1,
    "source": [["0"]],
    "target": [["-1"], ["1"]],
    "map": [0, 0],
}

SWAP_PATH = {
    "dimension": 1,
    "source": [["0"], ["1"]],
    "target": [["0"], ["1"]],
    "map": [1, 0],
}


class TestTree:
    def test_human_output(self, capsys):
        code, out, _ = run(capsys, "tree", "--tree", "[2]([1],[1])")
        assert code == 0
        assert "healthy: True" in out

    def test_json_prune(self, capsys):
        code, out, _ = run(
            capsys, "tree", "--tree", "[2]([0],[2])", "--prune", "--json"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["pruned"] == "[1]([2])"
        assert doc["unit"]["datum"]["base"] == "(0,0,1)"
        assert doc["healthy"] is False

    def test_layer_sizes(self, capsys):
        code, out, _ = run(
            capsys, "tree", "--tree", "[3]([1],[3],[0])", "--leaves", "--json"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["layer_sizes"] == [4, 3]

    def test_malformed_tree_is_usage_error(self, capsys):
        code, _, err = run(capsys, "tree", "--tree", "[2]([1])")
        assert code == 2
        assert "error:" in err


class TestHom:
    def test_count(self, capsys):
        code, out, _ = run(
            capsys,
            "hom",
            "--source",
            "[1]([2])",
            "--target",
            "[2]([1],[1])",
            "--filter",
            "w",
            "--json",
        )
        assert code == 0
        assert json.loads(out)["count"] == 2

    def test_enumerate_lists_morphisms(self, capsys):
        code, out, _ = run(
            capsys,
            "hom",
            "--source",
            "[2]",
            "--target",
            "[1]",
            "--enumerate",
            "--json",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["count"] == len(doc["morphisms"]) > 0

    def test_cap_exceeded(self, capsys):
        code, _, err = run(
            capsys,
            "hom",
            "--source",
            "[1]([2])",
            "--target",
            "[2]([1],[1])",
            "--filter",
            "w",
            "--cap",
            "1",
        )
        assert code == 3
        assert "resource cap" in err

    def test_height_mismatch(self, capsys):
        code, _, err = run(
            capsys, "hom", "--source", "[2]", "--target", "[1]([1])"
        )
        assert code == 2
        assert "error:" in err


class TestConfig:
    def test_points_to_tree(self, capsys, tmp_path):
        points = write_json(tmp_path / "pts.json", [["0", "0"], ["0", "1"]])
        code, out, _ = run(
            capsys, "config", "tree", "--points", points, "--json"
        )
        assert code == 0
        assert json.loads(out)["tree"] == "[1]([2])"

    def test_empty_points_need_dimension(self, capsys, tmp_path):
        points = write_json(tmp_path / "none.json", [])
        code, _, err = run(capsys, "config", "tree", "--points", points)
        assert code == 2
        code, out, _ = run(
            capsys,
            "config",
            "tree",
            "--points",
            points,
            "--dimension",
            "2",
            "--json",
        )
        assert code == 0
        assert json.loads(out)["tree"] == "[0]"

    def test_validate_valid_path(self, capsys, tmp_path):
        path = write_json(tmp_path / "split.json", VALID_SPLIT)
        code, out, _ = run(capsys, "config", "validate", "--path", path)
        assert code == 0
        assert "valid: True" in out

    def test_validate_collision(self, capsys, tmp_path):
        path = write_json(tmp_path / "swap.json", SWAP_PATH)
        code, out, _ = run(capsys, "config", "validate", "--path", path)
        assert code == 1
        assert "collide" in out and "1/2" in out

    def test_morphism_of_valid_path(self, capsys, tmp_path):
        path = write_json(tmp_path / "split.json", VALID_SPLIT)
        code, out, _ = run(
            capsys, "config", "morphism", "--path", path, "--json"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["source"] == "[1]" and doc["target"] == "[2]"

    def test_morphism_of_invalid_path_fails(self, capsys, tmp_path):
        path = write_json(tmp_path / "swap.json", SWAP_PATH)
        code, _, err = run(capsys, "config", "morphism", "--path", path)
        assert code == 1
        assert "invalid exit path" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "config", "validate", "--path", str(tmp_path / "no.json")
        )
        assert code == 2


class TestHomology:
    def test_plane_pair(self, capsys, tmp_path):
        out_file = tmp_path / "h.json"
        code, out, _ = run(
            capsys,
            "homology",
            "--category",
            "nord",
            "--n",
            "2",
            "--k",
            "2",
            "--json",
            "--out",
            str(out_file),
        )
        assert code == 0
        doc = json.loads(out)
        betti = [entry["betti"] for entry in doc["degrees"]]
        assert betti == [1, 1, 0, 0]
        assert all(entry["torsion"] == [] for entry in doc["degrees"])
        saved = json.loads(out_file.read_text(encoding="utf-8"))
        assert saved["degrees"] == doc["degrees"]

    def test_bad_parameters(self, capsys):
        code, _, err = run(
            capsys, "homology", "--category", "nord", "--n", "0", "--k", "2"
        )
        assert code == 2


class TestVerify:
    def test_small_suite_passes(self, capsys, tmp_path):
        out_file = tmp_path / "report.json"
        code, out, _ = run(
            capsys,
            "verify",
            "--suite",
            "delta-laws",
            "--param",
            "max_rank=2",
            "--param",
            "compose_rank=1",
            "--json",
            "--out",
            str(out_file),
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert doc["params"] == {"max_rank": 2, "compose_rank": 1}
        assert out_file.read_text(encoding="utf-8").strip() == out.strip()

    def test_human_summary(self, capsys):
        code, out, _ = run(
            capsys,
            "verify",
            "--suite",
            "functoriality",
            "--param",
            "pairs=2",
            "--seed",
            "5",
        )
        assert code == 0
        assert "suite functoriality: 2/2 passed" in out

    def test_bad_param_value(self, capsys):
        code, _, err = run(
            capsys,
            "verify",
            "--suite",
            "functoriality",
            "--param",
            "pairs=abc",
        )
        assert code == 2

    def test_malformed_param(self, capsys):
        code, _, err = run(
            capsys, "verify", "--suite", "functoriality", "--param", "pairs"
        )
        assert code == 2


class TestFixtures:
    def test_prints_tables(self, capsys):
        code, out, _ = run(capsys, "fixtures")
        assert code == 0
        assert "# Homology fixtures" in out

    def test_writes_file(self, capsys, tmp_path):
        out_file = tmp_path / "tables.txt"
        code, out, _ = run(capsys, "fixtures", "--out", str(out_file))
        assert code == 0
        assert out == ""
        assert "RP^2" in out_file.read_text(encoding="utf-8")
