from __future__ import annotations

import json
import shutil
import subprocess
import sys

import pytest

from bwspin2.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def analyses(text: str) -> dict:
    return {a["name"]: a for a in json.loads(text)["analyses"]}


def test_basis_check(capsys):
    code, out, err = run(capsys, "basis-check", "--format", "json")
    assert code == EXIT_OK
    split = analyses(out)["symmetry-split"]["results"]
    assert split == {"symmetric": "10", "antisymmetric": "6", "gram_rank": "16", "independent": True}
    assert "finished in" in err


def test_alternative_r_recorded(capsys):
    code, out, _ = run(capsys, "basis-check", "--format", "json", "--r-variant", "alternative")
    assert code == EXIT_OK
    alt = json.loads(out)["convention_ledger"]["r_matrix"]
    default = json.loads(run(capsys, "basis-check", "--format", "json")[1])["convention_ledger"]["r_matrix"]
    assert alt == "R = 2 g^2 g^0" and default == "R = i g^2 g^0"


def test_symmetry_dim(capsys):
    code, out, _ = run(capsys, "symmetry-dim", "--format", "json")
    res = analyses(out)["total-symmetry"]["results"]
    assert code == EXIT_OK
    assert res["contraction_kernel_dimension"] == "35" and res["kernel_equals_symmetrizer_image"] is True


def test_constraints_expect(capsys):
    assert run(capsys, "constraints", "--expect", "35")[0] == EXIT_OK
    assert run(capsys, "constraints", "--expect", "34")[0] == EXIT_FAIL


def test_constraints_latex_and_text(capsys):
    code, out, _ = run(capsys, "constraints", "--show-equations", "--format", "latex")
    assert code == EXIT_OK and out.startswith(r"\documentclass")
    code, out, _ = run(capsys, "constraints")
    assert "dimension: 35" in out


def test_latex_rejected_for_analysis_commands(capsys):
    code, _, err = run(capsys, "solve", "--p", "5,3,0,0", "--mass", "4", "--format", "latex")
    assert code == EXIT_USAGE and "latex" in err


def test_off_shell_required_is_usage_error(capsys):
    code, _, err = run(capsys, "solve", "--p", "5,3,0,0", "--mass", "7", "--on-shell-required")
    assert code == EXIT_USAGE and "p^2 != m^2" in err


@pytest.mark.parametrize("argv", [
    ["solve", "--p", "1,2,3", "--mass", "1"],
    ["solve", "--p", "1,0,0,0", "--mass", "0"],
    ["solve", "--p", "1,0,0,0", "--mass", "x"],
    ["solve", "--p", "1,0,0,0"],
    ["bogus"],
    ["constraints", "--formalism", "other"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_USAGE


def test_solve_reports_oracle(capsys):
    code, out, _ = run(capsys, "solve", "--p", "5,3,0,0", "--mass", "4", "--format", "json", "--expect", "5")
    res = analyses(out)["solution-space"]["results"]
    assert code == EXIT_OK
    assert res["dimension"] == res["oracle_dimension"] == "5" and res["oracle_agrees"] is True


def test_solve_constraints_only(capsys):
    code, out, _ = run(capsys, "solve", "--p", "1,0,0,0", "--mass", "4", "--constraints-only", "--format", "json")
    assert code == EXIT_OK
    assert analyses(out)["solution-space"]["results"]["dimension"] == "35"


def test_bad_coefficient_file(capsys, tmp_path):
    bad = tmp_path / "c.txt"
    bad.write_text("alpha9 = 1\n")
    code, _, err = run(capsys, "constraints", "--formalism", "generalized", "--coeffs", str(bad))
    assert code == EXIT_USAGE and "alpha9" in err
    code, _, _ = run(capsys, "constraints", "--formalism", "generalized", "--coeffs", str(tmp_path / "missing"))
    assert code == EXIT_USAGE


def test_coefficients_echoed(capsys, tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("beta4 = 3/2\n")
    code, out, _ = run(capsys, "constraints", "--formalism", "generalized", "--coeffs", str(cfg), "--format", "json")
    assert code == EXIT_OK
    assert analyses(out)["constraint-nullspace"]["inputs"]["beta4"] == "3/2"


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("BWSPIN2_SEED", "17")
    _, out, _ = run(capsys, "constraints", "--formalism", "generalized", "--samples", "1", "--format", "json")
    assert analyses(out)["genericity-probe"]["inputs"]["seed"] == "17"
    _, out, _ = run(capsys, "constraints", "--formalism", "generalized", "--samples", "1", "--seed", "3",
                    "--format", "json")
    assert analyses(out)["genericity-probe"]["inputs"]["seed"] == "3"
    monkeypatch.setenv("BWSPIN2_SEED", "nope")
    assert run(capsys, "constraints", "--formalism", "generalized", "--samples", "1")[0] == EXIT_USAGE


def test_recovery(capsys, tmp_path):
    assert run(capsys, "recovery-check")[0] == EXIT_OK
    cfg = tmp_path / "ones.txt"
    cfg.write_text("")
    assert run(capsys, "recovery-check", "--coeffs", str(cfg))[0] == EXIT_FAIL


def test_second_order_missing_block(capsys, tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("alpha1 = 0\n")
    code, out, _ = run(capsys, "second-order", "--formalism", "generalized", "--coeffs", str(cfg), "--format", "json")
    assert code == EXIT_FAIL
    assert "error" in analyses(out)["second-order"]["results"]


def test_out_file(capsys, tmp_path):
    dest = tmp_path / "report.json"
    code, out, _ = run(capsys, "derive", "--level", "pair", "--format", "json", "--out", str(dest))
    assert code == EXIT_OK and out == ""
    assert json.loads(dest.read_text())["analyses"][0]["passed"] is True


def test_json_is_deterministic(capsys):
    a = run(capsys, "derive", "--level", "pair", "--format", "json")[1]
    b = run(capsys, "derive", "--level", "pair", "--format", "json")[1]
    assert a == b


def test_module_and_console_entry_points():
    proc = subprocess.run([sys.executable, "-m", "bwspin2", "basis-check"], capture_output=True, text=True)
    assert proc.returncode == 0 and "[PASS] symmetry-split" in proc.stdout
    exe = shutil.which("bwspin2")
    if exe is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run([exe, "symmetry-dim"], capture_output=True, text=True)
    assert proc.returncode == 0
    proc = subprocess.run([exe, "solve", "--p", "5,3,0,0", "--mass", "7", "--on-shell-required"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
