import json
import os
import subprocess
import sys

import pytest

from dcalc import cli, gallery

DOCS = os.path.join(os.path.dirname(__file__), "..", "demos", "docs")
BOOLEAN = os.path.join(DOCS, "boolean.json")
F2X = os.path.join(DOCS, "f2x.json")
DUAL = os.path.join(DOCS, "dual.json")
QXY = os.path.join(DOCS, "qxy.json")
HYP = os.path.join(DOCS, "hyperbolic.json")


def run(*args):
    return cli.run(list(args))


def test_boolean_diff():
    code, rep = run("diff", BOOLEAN, "--order", "1")
    assert code == 0
    assert rep["results"]["dims"] == [2, 2]
    assert "Boolean triviality" in rep["status"]


def test_f2x_tangent():
    code, rep = run("tangent", F2X, "--point", "0")
    assert code == 0 and rep["results"]["basis"] == [{"x": "1"}]


def test_report_fields_and_conventions():
    _, rep = run("forms", DUAL)
    assert set(rep) == {"operation", "input", "configuration", "results", "status", "summary"}
    conv = rep["configuration"]["conventions"]
    for key in ("truncation_degree", "exterior_power", "operator_lift", "antisymmetrization"):
        assert key in conv
    assert rep["input"]["name"] == "dual numbers"


def test_schema_error_exit_1():
    code, rep = run("tangent", '{"field": {"Fp": "two"}, "kind": "polynomial", "vars": ["x"], "truncation": 3}')
    assert code == 1 and rep["error"]["path"] == "/field"


def test_corrupted_table_exit_1():
    doc = json.load(open(BOOLEAN))
    doc["table"][0][1] = [1, 0]
    code, rep = run("diff", json.dumps(doc))
    assert code == 1 and "structure constants" in rep["error"]["message"]


def test_missing_file_and_bad_json():
    assert run("spectrum", "/nonexistent.json")[0] == 1
    assert run("spectrum", "{not json")[0] == 1


def test_budget_exit_2(monkeypatch):
    doc = '{"field": {"Fp": 5}, "kind": "polynomial", "vars": ["x", "y", "z"], "truncation": 2}'
    code, rep = run("spectrum", doc, "--budget", "10")
    assert code == 2 and rep["error"]["parameter"] == "budget"
    monkeypatch.setenv("DCALC_BUDGET", "10")
    assert run("spectrum", doc)[0] == 2


def test_invariant_exit_3(monkeypatch):
    from dcalc.exactcore import InvariantError

    def boom(L, a):
        raise InvariantError("d o d != 0", [1, 2])
    monkeypatch.setitem(cli.ALGEBRA_COMMANDS, "derham", boom)
    code, rep = run("derham", DUAL)
    assert code == 3 and rep["error"]["witness"] == [1, 2]


def test_usage_error_exit_1():
    with pytest.raises(SystemExit) as e:
        run("nonsense")
    assert e.value.code == 1


def test_degenerate_tensor_reports_minor():
    code, rep = run("levicivita", '{"n": 2, "coords": ["x", "y"], "tau": [["x", "x"], ["x", "x"]]}')
    assert code == 1 and rep["error"]["minor"] == {"leading_principal_minor": 2}


def test_tensor_commands():
    assert run("curvature", HYP)[1]["results"]["ricci_over_metric"] == "1"
    code, rep = run("ricci-tau", HYP)
    assert code == 0 and rep["results"]["decomposition_identity"]


@pytest.mark.parametrize("args", [
    ("spectrum", BOOLEAN), ("ghosts", DUAL), ("flow", F2X, "--vector", "1"),
    ("localize", QXY, "--operator", "1,0:x;0,2:1", "--fraction", "1/(x*y)"),
    ("symbol", QXY, "--operator", "2,0:y"), ("poisson", QXY, "--operator", "2,0:y", "--operator2", "0,1:x"),
    ("dfunctor", DUAL, "--signature", "1", "--order", "2"), ("spencer", DUAL, "--order", "2"),
    ("jet", DUAL, "--order", "2"), ("derham", DUAL), ("jet-spencer", DUAL), ("berezinian", DUAL),
    ("graded-diff", DUAL), ("connection-check", DUAL), ("levicivita", HYP), ("thm-ham-check", "--trials", "2"),
])
def test_subcommands_succeed_deterministically(args):
    c1, r1 = run(*args)
    c2, r2 = run(*args)
    assert c1 == 0, r1
    assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)


def test_algebroid_and_diole():
    doc = json.load(open(DUAL))
    doc["algebroid"] = {"tautological": True}
    assert run("algebroid-check", json.dumps(doc))[0] == 0
    assert run("diole", json.dumps(doc))[0] == 0
    doc["algebroid"] = {"bracket": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]],
                        "anchor": [[[1, 0], [0, 1]], [[0, 0], [0, 0]]]}  # identity is not a derivation
    code, rep = run("algebroid-check", json.dumps(doc))
    assert code == 4 and rep["status"] == "check failed"


def test_gallery_only_and_failure(monkeypatch):
    code, rep = run("gallery", "--only", "01_boolean_triviality")
    assert code == 0 and list(rep["results"]["scenarios"]) == ["01_boolean_triviality"]
    assert run("gallery", "--only", "nope")[0] == 1
    monkeypatch.setitem(gallery.SCENARIOS, "01_boolean_triviality", lambda: {"passed": False})
    code, rep = run("gallery", "--only", "01_boolean_triviality")
    assert code == 4 and rep["results"]["failing"] == ["01_boolean_triviality"]


def test_text_format_renders_json():
    out = subprocess.run([sys.executable, "-m", "dcalc.cli", "tangent", F2X, "--point", "1", "--format", "text"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "status: ok" in out.stdout and 'results.basis = [{"x": "1"}]' in out.stdout
