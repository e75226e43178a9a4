import json
import subprocess
import sys

import pytest

from hyperarr import cli
from hyperarr.cli import RandomModel, main, run

from conftest import PAPER


def ex(name):
    return str(PAPER / f"{name}.json")


def run_json(*argv):
    code, out = run([*argv, "--format", "json"])
    return code, json.loads(out)


def test_classify_ex34():
    code, data = run_json("classify", ex("ex34"))
    assert code == 0
    assert data["kind"] == "PlusOneGenerated" and data["poexp"] == [1, 1, 2, 2] and data["level"] == 2
    code, text = run(["classify", ex("ex34")])
    assert "S/J: 0 -> S(-7) -> S(-5)+S(-6)^3 -> S(-4)^4 -> S" in text


def test_classify_boolean():
    code, data = run_json("classify", ex("boolean4"))
    assert data["kind"] == "Free" and data["exponents"] == [1, 1, 1, 1]


def test_assoc_primes_ex34():
    code, data = run_json("assoc-primes", ex("ex34"))
    ranks = [p["rank"] for p in data["primes"]]
    assert ranks.count(2) == 10 and ranks.count(3) == 1
    assert data["primes"][-1]["flat"] == [1, 2, 3, 4]


def test_other_commands(tmp_path):
    assert run(["betti", ex("ex36")])[1] == "0 -> S(-13) -> S(-8)+S(-11)^3 -> S(-7)^4 -> S"
    code, data = run_json("lattice", ex("ex34"))
    assert data["counts"][0] == 1 and data["rank"] == 4
    code, data = run_json("derivations", ex("ex34"))
    assert data["resolution"] == "0 -> S(-3) -> S(-1)^2+S(-2)^3 -> D(A)"
    code, out = run(["localize", ex("ex34"), "--flat", "1,2,3"])
    assert out.splitlines()[1:] == ["x - y", "x - t", "y - z", "z - t"]
    code, out = run(["restrict", ex("boolean4"), "--hyperplane", "0"])
    assert len(out.splitlines()) == 4
    code, out = run(["delete", ex("sec5"), "--hyperplane", "5"])
    assert "x + y + z" not in out
    aff = tmp_path / "aff.txt"
    aff.write_text("x\nx - 1\n")
    assert run(["cone", str(aff)])[1].splitlines() == ["vars: x, z", "x", "x - z", "z"]
    code, data = run_json("saito-verify", ex("braid3"))
    assert data["basis"] and sorted(data["pdegs"]) == [0, 1, 2]
    cands = tmp_path / "cands.txt"
    cands.write_text("1, 1, 1\nx, y, z\nx^2, y^2, z^2\n")
    code, data = run_json("saito-verify", ex("braid3"), "--candidates", str(cands))
    assert data["basis"]


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("x\n2*x\n")
    assert run(["classify", str(bad)])[0] == 2
    bad.write_text("x - y - 1\n")
    code, msg = run(["classify", str(bad)])
    assert code == 2 and "cone" in msg
    assert run(["classify", str(tmp_path / "missing.json")])[0] == 2
    assert run(["restrict", ex("ex34"), "--hyperplane", "9"])[0] == 3
    assert run(["localize", ex("ex34")])[0] == 3
    assert run(["saito-verify", ex("ex34")])[0] == 3


def test_timeout_flushes_partial_results():
    code, out = run(["search-deletion-pog", "--count", "100000", "--l", "4", "--n", "7",
                     "--timeout", "0.02", "--format", "json"])
    assert code == 4
    data = json.loads(out)
    assert data["status"].startswith("timeout")


def test_determinism():
    argv = ["search-deletion-pog", "--seed", "7", "--count", "15", "--l", "3", "--n", "6", "--format", "json"]
    assert run(argv) == run(argv)
    assert run(["classify", ex("ex35"), "--format", "json"]) == run(["classify", ex("ex35"), "--format", "json"])


def test_search_fixed_input():
    code, data = run_json("search-deletion-pog", ex("sec5"))
    prof = data["evidence"][0]
    assert prof["deletions"][5] == "Free"
    assert prof["deletions"][7] == "PlusOneGenerated"
    assert prof["deletions"][0] == "Other"
    assert data["witnesses"]


def test_search_count_zero():
    code, data = run_json("search-deletion-pog", "--count", "0")
    assert code == 0 and data["pog_instances"] == 0 and data["witnesses"] == []


def test_search_parallel_matches_serial():
    base = ["search-deletion-pog", "--seed", "3", "--count", "8", "--format", "json"]
    assert run(base) == run(base + ["--jobs", "2"])


def test_random_model():
    m = RandomModel(3, 6, 2, seed=5)
    A = m.sample(0)
    assert len(A) == 6 and A.nvars == 3
    assert all(abs(c) <= 2 for f in A.forms for c in f.coeffs)
    assert m.sample(0) == A and m.sample(1) != A
    with pytest.raises(ValueError):
        RandomModel(2, 20, 1)


def test_verify_theorems(tmp_path):
    code, out = run(["verify-theorems"])
    assert code == 0 and "0 violations" in out
    code, data = run_json("verify-theorems", ex("ex34"), ex("boolean4"))
    assert code == 0 and data["violations"] == 0
    assert "localization" in data["reports"][0]["checks"]


def test_verify_theorems_reports_violations(tmp_path, monkeypatch):
    real = cli.check_arrangement

    def broken(A):
        rep = real(A)
        rep["violations"].append({"check": "planted", "witness": cli.to_json(A)})
        return rep

    monkeypatch.setattr(cli, "check_arrangement", broken)
    code, out = run(["verify-theorems", ex("boolean4"), "--out", str(tmp_path)])
    assert code == 1
    assert (tmp_path / "violation-000.json").exists()


def test_entry_point(capsys):
    assert main(["betti", ex("boolean4")]) == 0
    assert capsys.readouterr().out.strip() == "0 -> S(-4)^3 -> S(-3)^4 -> S"
    proc = subprocess.run([sys.executable, "-m", "hyperarr.cli", "classify", ex("ex34")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "PlusOneGenerated" in proc.stdout
