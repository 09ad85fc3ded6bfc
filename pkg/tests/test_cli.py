import json
import subprocess
import sys

import pytest

from cartanflow.cli import main
from cartanflow.corpus import corpus
from cartanflow.formats import load_algebra


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def report(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_analyze_sl2(capsys):
    code, rep = report(capsys, "analyze", "--corpus", "sl2R")
    assert code == 0 and rep["exit_code"] == 0
    assert rep["algebra"]["killing_signature"] == [2, 1, 0]
    assert rep["center_dim"] == 0 and rep["derivation_dim"] == 3


def test_analyze_heisenberg_reports_ideal(capsys):
    code, rep = report(capsys, "analyze", "--corpus", "heisenberg")
    assert code == 0
    assert rep["algebra"]["simplicity"]["kind"] != "simple"
    assert rep["center_dim"] == 1


@pytest.mark.parametrize("name", ["su2", "sl2R", "sl3R"])
def test_minimize_converges(capsys, name):
    code, rep = report(capsys, "minimize", "--corpus", name)
    assert code == 0 and rep["flow"]["verdict"] == "minimum"


@pytest.mark.parametrize("name", ["heisenberg", "solvable2"])
def test_minimize_divergent_exit_two(capsys, name):
    code, rep = report(capsys, "minimize", "--corpus", name)
    assert code == 2
    assert rep["flow"]["verdict"] == "divergent"
    assert rep["destabilization"]["ideals"]


def test_decompose_sl2c_complex(capsys):
    code, rep = report(capsys, "decompose", "--corpus", "sl2C", "--complex")
    assert code == 0
    assert (rep["split"]["dim_k"], rep["split"]["dim_p"]) == (3, 3)
    assert rep["compact_form"]["passed"]
    assert rep["classification"]["kind"] == "noncompact"


def test_decompose_random_start(capsys):
    code, rep = report(capsys, "decompose", "--corpus", "sl3R", "--start", "random", "--seed", "3")
    assert code == 0 and (rep["split"]["dim_k"], rep["split"]["dim_p"]) == (3, 5)


def test_destabilize_simple_algebra_is_error(capsys):
    code, rep = report(capsys, "destabilize", "--corpus", "sl2R")
    assert code == 1 and "nothing to destabilize" in rep["error"]


def test_reports_are_deterministic(capsys):
    a = run(capsys, "decompose", "--corpus", "sl2R", "--start", "random", "--seed", "7")
    b = run(capsys, "decompose", "--corpus", "sl2R", "--start", "random", "--seed", "7")
    assert a == b
    assert "timing_seconds" not in a[1]
    _, rep = report(capsys, "analyze", "--corpus", "sl2R", "--timing")
    assert rep["timing_seconds"] >= 0


def test_trace_streams_json_lines(capsys, tmp_path):
    path = tmp_path / "trace.jsonl"
    code, rep = report(capsys, "minimize", "--corpus", "sl2R", "--trace", str(path))
    lines = [json.loads(l) for l in path.read_text().splitlines()]
    assert code == 0 and len(lines) == rep["flow"]["steps"] + 1
    assert lines[0]["t"] == 0.0
    assert all("F" in l for l in lines)


def test_out_file_and_input_roundtrip(capsys, tmp_path):
    alg_path = tmp_path / "h.json"
    assert run(capsys, "corpus", "export", "heisenberg", "--out", str(alg_path))[0] == 0
    assert load_algebra(alg_path).c.tobytes() == corpus("heisenberg").c.tobytes()
    out = tmp_path / "rep.json"
    code, text = run(capsys, "minimize", "--input", str(alg_path), "--out", str(out))
    assert code == 2 and text == ""
    assert json.loads(out.read_text())["exit_code"] == 2


def test_corpus_list_and_complex_export(capsys):
    code, out = run(capsys, "corpus", "list")
    assert code == 0 and "heisenberg" in out.split()
    code, out = run(capsys, "corpus", "export", "sl3C")
    assert code == 0 and json.loads(out)["field"] == "complex"


def test_verify_geometry(capsys):
    code, rep = report(capsys, "verify-geometry", "--n", "3", "--samples", "50")
    assert code == 0
    assert all(s["passed"] for s in rep["suites"])


def test_bad_input_file_exit_one(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2,\n "brackets": [}')
    assert main(["analyze", "--input", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err
    assert main(["analyze", "--input", str(tmp_path / "missing.json")]) == 1


def test_argparse_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as e:
        main(["minimize", "--corpus", "nope"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["minimize", "--corpus", "sl2R", "--input", "x.json"])
    assert e.value.code == 1


def test_invalid_config_exit_one(capsys):
    assert main(["minimize", "--corpus", "sl2R", "--tol", "-1"]) == 1


def test_console_script_module_entry():
    r = subprocess.run([sys.executable, "-m", "cartanflow.cli", "analyze", "--corpus", "su2"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["algebra"]["dim"] == 3
