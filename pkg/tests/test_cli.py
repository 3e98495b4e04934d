import json
import subprocess
import sys

import pytest

from trinion.cli import SCHEMA, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out


def test_surface_eval_singular_point(capsys):
    code, doc, _ = run(capsys, "surface", "eval", "--point", "3,3,3")
    assert code == 0
    assert doc["schema"] == SCHEMA and doc["status"] == "ok"
    assert doc["output"] == {"P": "0"}
    assert doc["certificates"][0] == {"name": "on_surface", "passed": True, "value": "0"}


def test_rep_uniformization(capsys):
    code, doc, _ = run(capsys, "rep", "uniformization")
    assert code == 0
    assert doc["output"]["character"] == ["35", "35", "323"]
    assert doc["output"]["a1"] == ["1", "2", "0", "0", "1", "16", "0", "0", "1"]
    assert all(c["passed"] for c in doc["certificates"])


def test_integral_c2_first_member(capsys):
    code, doc, _ = run(capsys, "integral", "c2", "--n", "1")
    assert code == 0
    assert doc["output"]["source"]["triple"] == [2, 5, 196]
    assert doc["output"]["character"][0] == "395"
    assert all("/" not in v for m in doc["output"]["rep"].values() for v in m)


def test_exact_values_serialize_as_fractions(capsys):
    code, doc, _ = run(capsys, "surface", "param", "--s", "7/5", "--t", "18/5")
    assert doc["output"]["point"] == ["93", "129", "327"]
    code, doc, _ = run(capsys, "rep", "invert", "--point", "35,99,643")
    assert code == 0 and doc["output"]["a2"][1] == "1/9"


@pytest.mark.parametrize("argv", [
    ("surface", "solve-z", "--x", "84", "--y", "84"),
    ("surface", "classify", "--point", "-46,-46,-46"),
    ("rep", "char", "--a1", "1,2,0,0,1,16,0,0,1", "--a2", "0", "1", "-7", "0", "-1", "8", "1", "0", "4"),
    ("rep", "normalize"),
    ("rep", "sym2", "--m", "1,0,-2,1"),
    ("integral", "c1", "--n", "-3"),
    ("integral", "c2", "--triple", "41,1683,40401"),
    ("integral", "scan", "--x", "-5..40", "--y", "0..40"),
    ("higgs", "family", "--type", "genI", "--alpha", "1", "--beta", "-1/2"),
    ("higgs", "family", "--type", "cyclicQ", "--q", "1+i"),
    ("higgs", "real-check", "--type", "genII", "--xi", "1"),
    ("tzitzeica", "solve", "--q-sq", "0.5", "--grid", "17"),
    ("cone", "potential", "--r", "0.5"),
    ("cone", "verify", "--n", "3", "--H", "-1", "--r-samples", "10"),
    ("cone", "semiflat", "--base", "2,1,1,3"),
])
def test_commands_succeed_with_certificates(capsys, argv):
    code, doc, _ = run(capsys, *argv)
    assert code == 0, doc
    assert doc["status"] == "ok"
    assert doc["certificates"]
    assert doc["command"] == list(argv)


def test_higgs_real_check_success(capsys):
    code, doc, _ = run(capsys, "higgs", "real-check", "--type", "genI", "--alpha", "2", "--beta", "-1/2")
    assert code == 0 and doc["output"]["real"] is True
    assert doc["output"]["g"] == ["0", "-1", "-1", "-1", "0", "1/2", "-1", "1/2", "0"]


@pytest.mark.parametrize("argv", [
    ("surface", "eval", "--point", "1,2"),
    ("surface", "classify", "--point", "3,3,4"),
    ("rep", "invert", "--point", "84,84,256"),
    ("integral", "c2", "--triple", "1,2,3"),
    ("integral", "c2", "--n", "40"),
    ("higgs", "family", "--type", "genI", "--alpha", "1", "--beta", "0"),
    ("tzitzeica", "solve", "--H", "-1"),
    ("tzitzeica", "solve", "--grid", "16"),
    ("cone", "potential", "--r", "1.0"),
])
def test_validation_errors_exit_1(capsys, argv):
    code, doc, _ = run(capsys, *argv)
    assert code == 1
    assert doc["status"] == "error"


@pytest.mark.parametrize("argv", [
    ("bogus",),
    ("surface",),
    ("surface", "eval"),
    ("integral", "c2"),
    ("integral", "scan", "--x", "1-5", "--y", "0..2"),
])
def test_usage_errors_exit_1(capsys, argv):
    code, doc, out = run(capsys, *argv)
    assert code == 1
    assert doc is None and out.err


def test_nonconvergence_exit_2(capsys):
    code, doc, _ = run(capsys, "tzitzeica", "solve", "--q-sq", "1", "--grid", "17", "--max-iters", "1")
    assert code == 2
    assert doc["status"] == "nonconvergence"
    assert doc["output"]["residual"] > 0


def test_scan_csv(tmp_path, capsys):
    path = tmp_path / "points.csv"
    code, doc, _ = run(capsys, "integral", "scan", "--x", "30..40", "--y", "95..100", "--csv", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "s,t,x,y,z,gamma1,gamma2"
    assert any(line.startswith("3,20,35,99,643,") for line in lines)


def test_tzitzeica_csv(tmp_path, capsys):
    path = tmp_path / "u.csv"
    code, _, _ = run(capsys, "tzitzeica", "solve", "--q-sq", "0.5", "--grid", "17", "--csv", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,u,blaschke" and len(lines) > 100


@pytest.mark.parametrize("argv", [
    ("higgs", "real-check", "--type", "genI", "--alpha", "3", "--beta", "-1/2"),
    ("tzitzeica", "solve", "--background", "hyperbolic", "--radius", "0.8", "--q-sq", "0.2", "--grid", "17"),
    ("integral", "scan", "--x", "-30..30", "--y", "-30..30"),
])
def test_output_is_deterministic(capsys, argv):
    main(list(argv))
    first = capsys.readouterr().out
    main(list(argv))
    assert capsys.readouterr().out == first


def test_verify_all(capsys):
    code, doc, out = run(capsys, "--seed", "3", "verify-all")
    assert code == 0
    assert [r["number"] for r in doc["output"]] == list(range(1, 11))
    assert "seconds" not in json.dumps(doc)
    assert out.err.count("[PASS]") == 10


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "trinion", "surface", "eval", "--point", "35,35,323"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["output"] == {"P": "0"}
