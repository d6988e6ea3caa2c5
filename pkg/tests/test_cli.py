"""Command-line interface: subcommands, exit codes, determinism."""

import json
import pathlib

import pytest

from endscope.cli import run

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def run_capture(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_ok(capsys):
    code, out, _ = run_capture(capsys, ["analyze", str(FIXTURES / "coxeter_suite.ggt")])
    assert code == 0
    report = json.loads(out)
    assert report["schemaVersion"] == 1
    assert report["inputDigest"]
    types = [s["type"] for s in report["sections"]]
    assert "registry" in types and "coxeter" in types and "facts" in types


def test_analyze_is_byte_deterministic(capsys):
    outputs = []
    for _ in range(2):
        code, out, _ = run_capture(
            capsys, ["analyze", str(FIXTURES / "graph_products.ggt")]
        )
        assert code == 0
        outputs.append(out)
    assert outputs[0] == outputs[1]


def test_analyze_missing_file_is_input_error(capsys):
    code, _, err = run_capture(capsys, ["analyze", "/nonexistent/input.ggt"])
    assert code == 2
    assert "error" in err


def test_analyze_parse_error_is_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.ggt"
    bad.write_text("group W = wedge { }\n")
    code, _, err = run_capture(capsys, ["analyze", str(bad)])
    assert code == 2
    assert "wedge" in err


def test_contradiction_exits_3_with_both_certificates(capsys):
    code, out, err = run_capture(
        capsys, ["analyze", str(FIXTURES / "contradiction.ggt")]
    )
    assert code == 3
    payload = json.loads(out)
    conflict = payload["contradiction"]
    assert conflict["group"] == "L" and conflict["atom"] == "semistable"
    assert conflict["holds"] and conflict["fails"]


def test_budget_exhaustion_exits_4(capsys):
    code, _, err = run_capture(
        capsys,
        ["cayley", "--oracle", "free:2", "--radius", "8", "--element-cap", "10"],
    )
    assert code == 4


def test_coxeter_subcommand(capsys):
    code, out, _ = run_capture(
        capsys,
        ["coxeter", str(FIXTURES / "coxeter_suite.ggt"), "--group", "W2"],
    )
    assert code == 0
    section = json.loads(out)["sections"][0]
    assert section["type"] == "coxeter"
    assert section["finite_type"]["is_finite"] is True
    assert section["ends"] == "0"


def test_graph_product_subcommand(capsys):
    code, out, _ = run_capture(
        capsys,
        ["graph-product", str(FIXTURES / "graph_products.ggt"), "--group", "Hex"],
    )
    assert code == 0
    section = json.loads(out)["sections"][0]
    assert section["ends"] == "1"
    assert section["semistability"] == "semistable"


def test_cayley_subcommand_with_window_and_dot(tmp_path, capsys):
    dot_path = tmp_path / "ball.dot"
    code, out, _ = run_capture(
        capsys,
        ["cayley", "--oracle", "z:1", "--radius", "8",
         "--window", "2", "6", "--dot", str(dot_path)],
    )
    assert code == 0
    payload = json.loads(out)
    ball, estimate = payload["sections"]
    assert ball["elements"] == 17
    assert estimate["verdict"] == "stabilized" and estimate["ends"] == "2"
    assert any(w["kind"] == "heuristic_verdict" for w in payload["warnings"])
    text = dot_path.read_text()
    assert text.startswith("graph ball {") and "d=0" in text


def test_tower_subcommand_constant(capsys):
    code, out, _ = run_capture(capsys, ["tower", str(FIXTURES / "tower_x2.twr")])
    assert code == 0
    section = json.loads(out)["sections"][0]
    assert section["verdict"]["kind"] == "strictly_descending"
    assert section["lim1"]["lim1"] == "nontrivial"


def test_tower_subcommand_explicit_window(capsys):
    code, out, _ = run_capture(
        capsys, ["tower", str(FIXTURES / "tower_explicit.twr")]
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["sections"][0]["verdict"]["kind"] == "semistable"
    assert any(w["kind"] == "finite_window" for w in payload["warnings"])


def test_explain_subcommand(capsys):
    code, out, _ = run_capture(
        capsys,
        ["explain", str(FIXTURES / "inference.ggt"), "--group", "F",
         "--atom", "h2_free_abelian"],
    )
    assert code == 0
    assert "R-GM2" in out


def test_explain_unknown_atom_is_input_error(capsys):
    code, _, err = run_capture(
        capsys,
        ["explain", str(FIXTURES / "inference.ggt"), "--group", "F",
         "--atom", "sparkly"],
    )
    assert code == 2


def test_dot_subcommand_for_diagram(capsys):
    code, out, _ = run_capture(
        capsys, ["dot", str(FIXTURES / "coxeter_suite.ggt"), "--group", "W7"]
    )
    assert code == 0
    assert out.startswith("graph diagram {")
    assert out.count("--") == 3 and 'label="3"' in out


def test_dot_subcommand_needs_a_diagram(capsys):
    code, _, err = run_capture(
        capsys, ["dot", str(FIXTURES / "inference.ggt"), "--group", "X"]
    )
    assert code == 2
