import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from kqm.cli import run
from kqm.serialize import loads

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"
MANIFEST = json.loads((PROBLEMS / "manifest.json").read_text())


def call(argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    status = run(argv, stdin=io.StringIO(stdin), stdout=out, stderr=err)
    return status, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name", sorted(MANIFEST))
def test_corpus_round_trip(name):
    spec = MANIFEST[name]
    status, out, err = call([spec["command"], str(PROBLEMS / name), *spec["flags"]])
    assert status == spec["exit"], err
    doc = loads(out)                      # outputs are valid problem files
    if status == 0:
        vstatus, vout, verr = call(["verify", "-"], stdin=out)
        assert vstatus == 0, verr
        result = json.loads(vout)["result"]
        if doc["kind"] != "shift":
            assert result["verified"] and result["criterion"]["holds"]


def test_all_corpus_files_are_listed():
    files = {p.name for p in PROBLEMS.glob("*.json")} - {"manifest.json"}
    assert files == set(MANIFEST)


def test_determinism():
    path = str(PROBLEMS / "circuit_kappa5.json")
    assert call(["solve-circuit", path]) == call(["solve-circuit", path])


def test_free_shift_output():
    status, out, _ = call(["complete-shift", str(PROBLEMS / "shift_free_case.json"), "--t", "13/1"])
    result = json.loads(out)["result"]
    assert status == 0
    assert result["squared_weights"][3:5] == ["13/4", "28/13"]
    assert result["strict"] is True


def test_nonexistence_certificate():
    status, out, _ = call(["complete-shift", str(PROBLEMS / "shift_nonexistent.json")])
    assert status == 2
    assert json.loads(out)["result"]["certificate"] == {"alt_diff": {"n": 0, "value": "-35"}}


def test_check_shift_on_raw_data():
    status, out, _ = call(["check-shift", str(PROBLEMS / "shift_nonexistent.json")])
    assert status == 2
    assert json.loads(out)["result"]["alt_diffs"][0] == "-35"
    status, _, _ = call(["check-shift", str(PROBLEMS / "shift_pinned_case.json")])
    assert status == 0


def test_approx_is_presentation_only():
    status, out, _ = call(["complete-shift", str(PROBLEMS / "shift_free_case.json"), "--approx", "6"])
    doc = json.loads(out)
    assert doc["result"]["approx_weights"][3] == "1.802776"       # sqrt(13/4)
    assert doc["result"]["squared_weights"][3] == "13/4"


def test_t_flag_overrides_options():
    _, out, _ = call(["complete-shift", str(PROBLEMS / "shift_free_case.json"), "--t", "20"])
    assert json.loads(out)["result"]["t"] == "20"


@pytest.mark.parametrize("text,path", [
    ('{"kind": "shift", "payload": {"m": 3, "k": 2, "weights": [1], "extra": 1}}', "$.payload"),
    ('{"kind": "graph", "payload": {"kappa": 2, "etas": [1, "x"]}}', "$.payload.etas[1]"),
    ('{"kind": "shift", "payload": {"m": 3, "k": 2, "weights": [0.5]}}', "$.payload.weights[0]"),
    ('{"kind": "sheep", "payload": {}}', "$.kind"),
    ('{"kind": "shift"', "$"),
])
def test_schema_errors(text, path):
    status, out, err = call(["complete-shift"], stdin=text)
    assert status == 1 and out == ""
    assert err.startswith(f"error: {path}")


def test_usage_errors():
    assert call(["characterize", str(PROBLEMS / "characterize_kappa2.json")])[0] == 1
    assert call(["solve-circuit", str(PROBLEMS / "shift_free_case.json")])[0] == 1
    assert call(["verify", str(PROBLEMS / "circuit_kappa5.json")])[0] == 1     # no circuit masses
    assert call(["no-such-command"])[0] == 1
    assert call(["verify", "/nonexistent/file.json"])[0] == 1


def test_mismatched_kappa_is_usage_error():
    assert call(["characterize", str(PROBLEMS / "characterize_kappa2.json"), "--kappa", "3"])[0] == 1


def test_inadmissible_and_infeasible_exit_2():
    doc = json.loads((PROBLEMS / "circuit_kappa5.json").read_text())
    doc["payload"]["branches"][0]["tail"]["coeffs"] = ["1", "1", "1"]
    status, out, err = call(["solve-circuit"], stdin=json.dumps(doc))
    assert status == 2 and "not a polynomial" in err
    kappa4 = {"kind": "graph", "payload": {"kappa": 4, "etas": [1, 1, 1, 1], "branches": [
        {"r": r, "i": 1, "prefix": ["2" if r == 4 else "1"], "tail": {"coeffs": ["-1", "1"]}}
        for r in range(1, 5)]}}
    status, out, _ = call(["characterize", "--kappa", "4"], stdin=json.dumps(kappa4))
    assert status == 2 and json.loads(out)["result"]["status"] == "infeasible"


def test_verify_detects_tampering():
    _, out, _ = call(["solve-circuit", str(PROBLEMS / "circuit_kappa5.json")])
    doc = json.loads(out)
    doc["payload"]["circuit_masses"][0] = "100"
    status, vout, _ = call(["verify", "-"], stdin=json.dumps(doc))
    assert status == 2
    assert json.loads(vout)["result"]["defects"]["summary"]["all_zero"] is False


def test_export_graph(tmp_path):
    target = tmp_path / "g.dot"
    status, out, _ = call(["solve-circuit", str(PROBLEMS / "circuit_kappa5.json"),
                           "--export-graph", str(target), "--depth", "2"])
    assert status == 0 and target.read_text().startswith("digraph")
    status, dot, _ = call(["export-graph", str(PROBLEMS / "circuit_kappa5.json"), "--depth", "1"])
    assert status == 0 and '"x1" -> "x1_1,1"' in dot


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kqm", "complete-shift", str(PROBLEMS / "shift_nonexistent.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert '"value": "-35"' in proc.stdout
