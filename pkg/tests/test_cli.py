import json
import os
import subprocess
import sys

import pytest

from frachardy.cli import main
from frachardy.report import CSV_COLUMNS


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_constant_json(capsys):
    code, out, _ = run(["constant", "--d", "2", "--k", "1", "--s", "0.6", "--p", "2", "--alpha", "0", "--beta", "0"],
                       capsys)
    assert code == 0
    d = json.loads(out)
    assert d["C"] == pytest.approx(0.15955475058742477, rel=1e-9)
    assert d["C1"] == pytest.approx(0.08454659984679398, rel=1e-9)  # C_1 with d = k = 1
    assert 0 < d["C_std_error"] < 1e-8 and 0 < d["C1_std_error"] < 1e-8
    assert d["config"]["spec"]["seed"] == 0 and d["config"]["params"]["k"] == 1


def test_constant_csv(capsys):
    code, out, _ = run(["constant", "--d", "3", "--s", "0.5", "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "quantity,value,std_error"
    assert any(line.startswith("C1,12.5663706143591") for line in lines)


def test_inadmissible_parameters_exit_2(capsys):
    code, out, err = run(["constant", "--d", "2", "--k", "1", "--s", "0.6", "--alpha", "1.3", "--beta", "-0.5"], capsys)
    assert code == 2 and out == ""
    assert err == "error: alpha must lie in (-k, sp)\n"
    code, _, err = run(["constant", "--d", "2", "--k", "1", "--s", "0.6", "--alpha", "0.7", "--beta", "0.6"], capsys)
    assert code == 2 and "alpha+beta must lie in (-k, sp)" in err


def test_bad_flags_exit_2(capsys):
    assert run(["constant", "--bogus"], capsys)[0] == 2
    assert run(["nonsense"], capsys)[0] == 2


def test_unwritable_output_exit_2(tmp_path, capsys):
    target = tmp_path / "missing" / "out.json"
    code, _, err = run(["constant", "--output", str(target)], capsys)
    assert code == 2 and "does not exist" in err
    code, _, err = run(["constant", "--output", str(tmp_path)], capsys)  # a directory
    assert code == 2


def test_verify_deterministic_exit_0(tmp_path, capsys):
    argv = ["verify", "--theorem", "hardy", "--d", "2", "--k", "1", "--s", "0.6", "--p", "2", "--seed", "42",
            "--suite-size", "3", "--samples", "20000"]
    a = tmp_path / "a.json"
    assert run(argv + ["--output", str(a)], capsys)[0] == 0
    first = a.read_bytes()
    assert run(argv + ["--output", str(a)], capsys)[0] == 0
    assert a.read_bytes() == first
    d = json.loads(first)
    assert d["pass"] is True and len(d["results"]) == 3
    assert d["config"]["spec"]["seed"] == 42 and all(r["seed"] == 42 for r in d["results"])
    assert os.listdir(tmp_path) == ["a.json"]  # no temp files left behind


def test_verify_csv_inferred_with_sidecar(tmp_path, capsys):
    out = tmp_path / "hardy.csv"
    code, _, _ = run(["verify", "--theorem", "hardy", "--d", "2", "--k", "1", "--s", "0.6", "--suite-size", "2",
                      "--samples", "20000", "--output", str(out)], capsys)
    assert code == 0
    assert out.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
    meta = json.loads((tmp_path / "hardy.csv.meta.json").read_text())
    assert meta["config"]["format"] == "csv" and meta["exit_status"] == 0


def test_failing_study_exit_1(capsys):
    # listing N in decreasing order makes the ratio increase along the run: the study fails
    code, out, _ = run(["sharpness", "--d", "2", "--k", "1", "--s", "0.4", "--N", "64,1", "--samples", "50000"],
                       capsys)
    assert code == 1 and json.loads(out)["pass"] is False


def test_counterexample_csv(capsys):
    code, out, _ = run(["counterexample", "--d", "2", "--s", "0.5", "--p", "2", "--eps", "0.2,0.1,0.05,0.025",
                        "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "eps,psi,slope" and len(lines) == 5
    slope = float(lines[1].split(",")[2])
    assert 0.85 * 0.5 <= slope <= 1.15 * 0.5


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep point\nd = 3\nk=1\ns=0.6\np=2\nseed=9\n")
    code, out, _ = run(["constant", "--config", str(cfg)], capsys)
    d = json.loads(out)
    assert code == 0 and d["params"]["d"] == 3 and d["config"]["spec"]["seed"] == 9
    code, out, _ = run(["constant", "--config", str(cfg), "--s", "0.4"], capsys)
    assert json.loads(out)["params"]["s"] == 0.4
    cfg.write_text("colour=blue\n")
    code, _, err = run(["constant", "--config", str(cfg)], capsys)
    assert code == 2 and "unknown config keys" in err


def test_seed_environment(monkeypatch, capsys):
    monkeypatch.setenv("FRACHARDY_SEED", "123")
    d = json.loads(run(["constant"], capsys)[1])
    assert d["config"]["spec"]["seed"] == 123
    d = json.loads(run(["constant", "--seed", "4"], capsys)[1])
    assert d["config"]["spec"]["seed"] == 4
    monkeypatch.setenv("FRACHARDY_SEED", "abc")
    assert run(["constant"], capsys)[0] == 2


def test_seminorm(capsys):
    code, out, _ = run(["seminorm", "--d", "2", "--k", "2", "--s", "0.5", "--radius", "0.7"], capsys)
    d = json.loads(out)
    assert code == 0 and d["gagliardo"]["value"] > 0 and d["hardy"]["value"] > 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "frachardy", "constant", "--d", "2", "--k", "1", "--s", "0.6",
                           "--alpha", "1", "--beta", "0.5"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert proc.stderr == "error: alpha+beta must lie in (-k, sp)\n"
