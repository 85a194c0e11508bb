from __future__ import annotations

import io
import json
import shutil
import subprocess
import sys

import pytest

from mhsctl.cli import main
from mhsctl.scenario import builtin_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_default_scenario(capsys):
    code, out, _ = run(capsys, "check")
    assert code == 0
    assert out.splitlines() == [
        "[mhs] pass",
        "[orbit] pass",
        "[basis] pass: a = 1/2, <u2,u3> = 1, <u1,u4> = 1/2",
        "[h1-dims] pass: n = 1..5: dims (0, 1, 2, 3, 4), Hodge classes (0, 1, 2, 3, 4)",
    ]


def test_check_three_nilpotents(capsys):
    code, out, _ = run(capsys, "check", "--scenario", "three_nilpotents")
    assert code == 0 and "[h1] pass: n = 3: dim H^1 = 1" in out


def test_json_report_is_byte_stable(capsys):
    first = run(capsys, "check", "--json")[1]
    second = run(capsys, "check", "--json")[1]
    assert first == second
    report = json.loads(first)
    assert report["command"] == "check"
    assert [c["status"] for c in report["checks"]] == ["pass"] * 4


def test_cohomology_command(capsys):
    code, out, _ = run(capsys, "cohomology", "--n", "3")
    assert code == 0
    assert "image complex terms: 4 3 0 0" in out
    assert "cohomology dims: 3 2 0 0" in out
    assert "dim Hom(Q, H^1) = 2" in out


def test_certify_command(capsys):
    code, out, _ = run(capsys, "certify", "--n", "2", "--lambda", "1/100", "--c", "1,0")
    assert code == 0
    assert out.strip() == "infeasible; identity λ(c_1−c_2)=0; target dim 1"
    code, out, _ = run(capsys, "certify", "--n", "3", "--json")
    report = json.loads(out)
    assert code == 0 and len(report["identities"]) == 3


def test_surjectivity_check(capsys):
    code, out, _ = run(capsys, "deform", "--lambda", "0", "--check", "surjectivity")
    assert code == 0 and out.startswith("[surjectivity] pass")
    code, out, _ = run(capsys, "deform", "--check", "surjectivity", "--n", "2")
    assert code == 1
    assert "ξ_1 w_3 = t1·t2·λ·w_4 mod F^{-1}" in out


def test_deform_symbolic_checks(capsys):
    code, out, _ = run(
        capsys, "deform", "--n", "1",
        "--check", "transversality", "--check", "conjugate-frame",
        "--check", "orthogonality", "--check", "limit", "--check", "independence",
    )
    assert code == 0, out
    assert all(line.split("]")[1].startswith(" pass") for line in out.splitlines() if line.startswith("["))


def test_positivity_csv(capsys):
    code, out, _ = run(capsys, "deform", "--n", "1", "--lambda", "0", "--check", "positivity")
    assert code == 0
    lines = out.splitlines()
    header = lines.index("t,lambda,p=1,p=0,p=-1,p=-2,dim F0∩conjF-1,|det|")
    assert len(lines) - header - 1 == 8


def test_build_ext_and_class_round_trip(capsys, tmp_path, monkeypatch):
    code, out, _ = run(capsys, "build-ext", "--alpha", "0,1", "--json")
    assert code == 0
    ext = tmp_path / "ext.json"
    ext.write_text(out, encoding="utf-8")
    code, out, _ = run(capsys, "class", "--extension", str(ext))
    assert code == 0 and "0,1" in out
    monkeypatch.setattr(sys, "stdin", io.StringIO(ext.read_text(encoding="utf-8")))
    code, out, _ = run(capsys, "class", "--extension", "-")
    assert code == 0 and "0,1" in out


def test_errors_exit_with_two(capsys, tmp_path):
    code, _, err = run(capsys, "build-ext", "--alpha", "1")
    assert code == 2 and "error" in err
    data = json.loads(builtin_path("h1_orbit").read_text(encoding="utf-8"))
    data["W"]["-2"] = [["0", "1", "0", "0"]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data), encoding="utf-8")
    code, _, err = run(capsys, "check", "--scenario", str(bad))
    assert code == 2 and "W: not increasing at index -1" in err
    with pytest.raises(SystemExit) as exc:
        main(["check", "--check", "bogus"])
    assert exc.value.code == 2


def test_expectation_mismatch_fails(capsys, tmp_path):
    data = json.loads(builtin_path("three_nilpotents").read_text(encoding="utf-8"))
    data["expect"]["h1"] = 2
    p = tmp_path / "wrong.json"
    p.write_text(json.dumps(data), encoding="utf-8")
    code, out, _ = run(capsys, "check", "--scenario", str(p))
    assert code == 1 and "[h1] fail" in out


@pytest.mark.skipif(shutil.which("mhsctl") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["mhsctl", "check", "--check", "mhs"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "[mhs] pass"
