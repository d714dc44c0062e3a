import json
import subprocess
import sys

import mpmath
import pytest

from qident.cli import EXIT_CONFIG, EXIT_EXHAUSTED, EXIT_FAIL, EXIT_OK, main

WRONG = """\
id: X2
paper: (none)
symbols: a
lhs: qpoch_inf(a; q)
rhs: qpoch_inf(q*a; q)
"""

IMPOSSIBLE = """\
id: X1
paper: (none)
symbols: a
constraint: |a| < |a|
lhs: qpoch_inf(a; q)
rhs: qpoch_inf(a; q)
"""


@pytest.fixture
def catalog_dir(tmp_path, monkeypatch):
    def make(**files):
        for name, text in files.items():
            (tmp_path / f"{name}.qid").write_text(text, encoding="utf-8")
        monkeypatch.setenv("QIDENT_CATALOG", str(tmp_path))
        return tmp_path

    return make


def test_list(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "B1" in out and "(Rama1psi1)" in out and "C1" in out


def test_show(capsys):
    assert main(["show", "B1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "lhs: psi(a; b; q; z)" in out
    assert "implied constraints" in out


def test_show_by_alias(capsys):
    assert main(["show", "ZZ-uncorrected"]) == EXIT_OK
    assert "id: B10" in capsys.readouterr().out


def test_eval(capsys):
    code = main(["eval", "qpoch_inf(a; q)", "--set", "a=0.3+0.1i", "--set", "q=0.4", "--digits", "25"])
    assert code == EXIT_OK
    out = capsys.readouterr().out.strip()
    with mpmath.workdps(40):
        ref = mpmath.qp(mpmath.mpc("0.3", "0.1"), mpmath.mpf("0.4"))
        got = mpmath.mpmathify(out.replace(" ", ""))
        assert abs(got - ref) < mpmath.mpf(10) ** -22


@pytest.mark.parametrize(
    "args",
    [
        ["eval", "qpoch_inf(a; q)", "--set", "a0.3"],
        ["eval", "qpoch_inf(a; q)", "--set", "a=0.3", "--set", "q=2"],
        ["eval", "qpoch_inf(a; q", "--set", "q=0.4"],
        ["show", "nope"],
        ["verify", "nope"],
        ["verify", "B1", "--trials", "0"],
        ["verify", "B1", "--margin", "1.5"],
        ["report", "--in", "/nonexistent/report.json"],
    ],
)
def test_config_errors(args, capsys):
    assert main(args) == EXIT_CONFIG
    assert "qident:" in capsys.readouterr().err


def test_bad_seed_is_rejected():
    with pytest.raises(SystemExit):
        main(["verify", "B1", "--seed", "-3"])


def test_verify_pass(capsys):
    assert main(["verify", "B1", "--trials", "2", "--digits", "25"]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out


def test_verify_failure_exit(catalog_dir, capsys):
    catalog_dir(X2=WRONG)
    assert main(["verify-all", "--trials", "2"]) == EXIT_FAIL
    assert "FAIL" in capsys.readouterr().out


def test_verify_exhausted_exit(catalog_dir):
    catalog_dir(X1=IMPOSSIBLE)
    assert main(["verify", "X1", "--trials", "1"]) == EXIT_EXHAUSTED


def test_broken_catalog_exit(catalog_dir):
    catalog_dir(X1=IMPOSSIBLE.replace("lhs: qpoch_inf(a; q)", "lhs: qpoch_inf(a; q"))
    assert main(["list"]) == EXIT_CONFIG


def test_verify_all_subset_and_reports(tmp_path, capsys):
    js, md = tmp_path / "r.json", tmp_path / "r.md"
    code = main(["verify-all", "B1", "L9", "--trials", "2", "--seed", "5", "--json", str(js), "--markdown", str(md)])
    assert code == EXIT_OK
    data = json.loads(js.read_text())
    assert [d["id"] for d in data] == ["B1", "L9"] and data[0]["seed"] == 5
    assert md.read_text().count("| PASS |") == 2
    capsys.readouterr()
    assert main(["report", "--in", str(js), "--format", "markdown"]) == EXIT_OK
    assert capsys.readouterr().out == md.read_text()
    out = tmp_path / "again.json"
    assert main(["report", "--in", str(js), "--format", "json", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text()) == data


def test_console_script_runs():
    res = subprocess.run([sys.executable, "-m", "qident.cli", "list"], capture_output=True, text=True, timeout=120)
    assert res.returncode == 0 and "B20" in res.stdout
