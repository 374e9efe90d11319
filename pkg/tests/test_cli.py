import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from structcps.cli import main

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"
GCD = str(PROGRAMS / "gcd.ps")


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compile_normalized_text(capsys):
    code, out, err = cli(capsys, "compile", GCD, "--normalize")
    assert code == 0 and err == ""
    assert out.count("fix(") == 1
    assert "⟨exit:" not in out


def test_compile_json(capsys):
    code, out, _ = cli(capsys, "compile", GCD, "--format", "json")
    assert code == 0
    assert json.loads(out)["tag"] == "App"


def test_compile_is_deterministic(capsys):
    first = cli(capsys, "compile", GCD)
    assert cli(capsys, "compile", GCD) == first
    assert "%" not in first[1]


def test_run_gcd(capsys):
    assert cli(capsys, "run", GCD, "--args", "12,8") == (0, "4\n", "")


def test_run_prints_unit_and_booleans(capsys, tmp_path):
    f = tmp_path / "p.ps"
    f.write_text("val x = 1\nassert (x == 1)")
    assert cli(capsys, "run", str(f))[1] == "()\n"
    f.write_text("3 > 2")
    assert cli(capsys, "run", str(f))[1] == "true\n"


def test_run_both_orders_agree(capsys):
    assert cli(capsys, "run", GCD, "--args", "9,6", "--eval-order", "rtl")[1] == "3\n"


def test_check_ok(capsys):
    assert cli(capsys, "check", GCD) == (0, "ok\n", "")


def test_check_counter(capsys):
    code, out, err = cli(capsys, "check", str(PROGRAMS / "counter.ps"))
    assert code == 3 and out == ""
    assert err.strip().endswith(":6:19: i cannot be assigned here.")


def test_parse_error(capsys, tmp_path):
    f = tmp_path / "bad.ps"
    f.write_text("val x = ")
    code, out, err = cli(capsys, "compile", str(f))
    assert code == 2 and out == ""
    assert err.startswith(f"{f}:1:9: expected expression")


def test_unsupported_feature_is_exit_3(capsys, tmp_path):
    f = tmp_path / "list.ps"
    f.write_text("[1]")
    assert cli(capsys, "check", str(f))[0] == 3


def test_assertion_failure_is_exit_4(capsys, tmp_path):
    f = tmp_path / "a.ps"
    f.write_text("assert (1 == 2)\n0")
    code, out, err = cli(capsys, "run", str(f))
    assert code == 4 and out == "" and "AssertionFailed" in err


def test_budget_is_exit_5(capsys):
    code, out, _ = cli(capsys, "run", GCD, "--args", "1,1000", "--max-steps", "100")
    assert code == 5 and out == ""


def test_budget_success_is_stable(capsys):
    assert cli(capsys, "run", GCD, "--args", "1,1000", "--max-steps", "1000000")[1] == "1\n"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate", GCD],
        ["compile", GCD, "--args", "1"],
        ["check", GCD, "--format", "json"],
        ["run", GCD, "--args", "1,x"],
        ["run", GCD, "--max-steps", "0"],
        ["compile", GCD, "--eval-order", "up"],
    ],
)
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 1
    assert capsys.readouterr().out == ""


def test_missing_file(capsys, tmp_path):
    assert cli(capsys, "check", str(tmp_path / "nope.ps"))[0] == 1


def test_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("val x = 2\nx + x"))
    assert cli(capsys, "run", "-") == (0, "4\n", "")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "structcps", "run", GCD, "--args", "7,7"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "7\n"
