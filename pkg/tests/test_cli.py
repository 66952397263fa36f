import csv
import io
import json
import subprocess
import sys

import pytest

from splus.cli import main

KEYS = {"command", "inputs", "results", "tolerances", "version"}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    doc = json.loads(out)
    assert set(doc) == KEYS
    return code, doc


def test_check_f1(capsys):
    code, doc = run_json(capsys, "check", "--catalog", "f1")
    r = doc["results"]
    assert code == 0
    assert r["splus"] and r["splus_weight"] == "1"
    assert not r["starlike_half"] and r["starlike_half_sum"] == "3"


def test_check_remark_function_decimal(capsys):
    code, doc = run_json(capsys, "check", "--b", "0,0.3333333", "--require", "starlike_half")
    assert code == 0 and doc["results"]["starlike_half"]


def test_check_identity_all_yes(capsys):
    code, out, _ = run(capsys, "check", "--b", "0", "--require", "splus,ulambda,starlike_half,analytic")
    assert code == 0 and " no" not in out


def test_check_non_member_exits_1(capsys):
    assert run(capsys, "check", "--b", "0,0,0,0.4")[0] == 1
    assert run(capsys, "check", "--catalog", "f1", "--require", "starlike_half")[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ("check",),
        ("check", "--b", "0,-1"),
        ("check", "--b", "0,x"),
        ("check", "--b", "0", "--catalog", "f1"),
        ("check", "--catalog", "f6"),
        ("check", "--catalog", "nope"),
        ("check", "--b", "0", "--require", "bogus"),
        ("coeffs", "--b", "0", "-N", "4"),
        ("search", "--functional", "a5", "--step", "0.001", "--M", "5"),
        ("probe", "--b", "0.5", "--quantity", "f_over_z"),
        ("verify", "--only", "zzz"),
        ("frobnicate",),
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_coeffs_f_lambda(capsys):
    code, doc = run_json(capsys, "coeffs", "--catalog", "f_lambda", "--lambda", "1")
    a = doc["results"]["a"]
    assert code == 0 and (a["a2"], a["a3"], a["a4"]) == ("-2", "3", "-4")
    assert len(a) == 11  # a2..a12


def test_coeffs_f3_gamma3(capsys):
    _, doc = run_json(capsys, "coeffs", "--catalog", "f3")
    assert doc["results"]["gamma"]["gamma3"] == "1/3"


def test_coeffs_identity_zero(capsys):
    _, doc = run_json(capsys, "coeffs", "--b", "0")
    values = list(doc["results"]["a"].values()) + list(doc["results"]["gamma"].values())
    assert all(v == "0" for v in values)


def test_bounds(capsys):
    _, doc = run_json(capsys, "bounds", "--nu0")
    assert doc["results"]["nu0"] == pytest.approx(0.8391735, abs=1e-7)
    _, doc = run_json(capsys, "bounds", "--lambda", "1")
    iv = doc["results"]["uplus_intervals"]
    assert iv["a3"] == [-1, 3] and iv["a5"] == [-2.25, 5]
    _, doc = run_json(capsys, "bounds", "--fs-gamma", "0")
    row = doc["results"]["fekete_szego"][0]
    assert (row["lower"], row["upper"]) == (-1, 3)


def test_bounds_default_table(capsys):
    code, doc = run_json(capsys, "bounds")
    assert code == 0
    assert {"nu0", "fekete_szego", "log_coefficients", "uplus_intervals"} <= set(doc["results"])


def test_csv_rows(capsys):
    code, out, _ = run(capsys, "coeffs", "--catalog", "f3", "-N", "5", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["quantity", "value", "bound", "verdict"]
    assert ["gamma3", "1/3", "", ""] in rows


def test_out_file(capsys, tmp_path):
    p = tmp_path / "r.json"
    assert run(capsys, "bounds", "--nu0", "--format", "json", "--out", str(p))[1] == ""
    assert set(json.loads(p.read_text())) == KEYS


def test_search_grid(capsys):
    code, doc = run_json(capsys, "search", "--functional", "a4", "--step", "0.02", "--refine", "2")
    r = doc["results"]
    assert code == 0 and r["violations"] == 0
    assert r["best_value"] == pytest.approx(1.088662, abs=1e-3)


def test_search_sample_violation_exits_1(capsys):
    code, doc = run_json(capsys, "search", "--functional", "gamma3", "--mode", "sample",
                         "--direction", "lower", "--samples", "20000", "--M", "4")
    assert code == 1 and doc["results"]["violations"] > 0


def test_search_seed_reproducible(capsys):
    argv = ("search", "--functional", "fs:0.3", "--mode", "sample", "--samples", "3000", "--seed", "9")
    assert run_json(capsys, *argv)[1] == run_json(capsys, *argv)[1]


def test_probe_commands(capsys):
    code, doc = run_json(capsys, "probe", "--b", "0,1/3", "--alpha", "0.5")
    assert code == 0 and doc["results"]["min"] >= 0.49
    assert run(capsys, "probe", "--catalog", "f1", "--alpha", "0.5")[0] == 1
    _, doc = run_json(capsys, "probe", "--b", "0,1/3", "--quantity", "convexity", "--r", "0.99")
    assert doc["results"]["value"] < 0


def test_verify_subset(capsys):
    code, doc = run_json(capsys, "verify", "--only", "2,3")
    assert code == 0
    assert {c["criterion"] for c in doc["results"]["checks"]} == {2, 3}


def test_verify_tag_subset(capsys):
    code, doc = run_json(capsys, "verify", "--only", "fs-psi")
    assert code == 0 and {c["criterion"] for c in doc["results"]["checks"]} == {2}


def test_verify_injected_bad_bound(capsys):
    code, out, err = run(capsys, "verify", "--only", "6", "--samples", "2000", "--inject-bad-bound", "a4=1.0")
    assert code == 1
    assert "violations[a4 upper 1]" in err


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "splus", "bounds", "--nu0"], capture_output=True, text=True)
    assert p.returncode == 0 and "0.83917" in p.stdout
