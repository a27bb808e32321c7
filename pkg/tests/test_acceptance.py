"""End-to-end acceptance criteria, driven only through the CLI.

Each test prints (and records for the terminal summary) one PASS/FAIL line.
Thresholds are the stated ones; a criterion that does not hold fails here.
"""

from __future__ import annotations

import json
import time

from bwspin2.cli import EXIT_FAIL, EXIT_OK, main
from conftest import ACCEPTANCE_LINES

SEED = "20240601"
ON_SHELL = ["--p", "5,3,0,0", "--mass", "4"]
OFF_SHELL = ["--p", "1,0,0,0", "--mass", "4"]


def cli(capsys, *argv):
    t0 = time.perf_counter()
    code = main([*argv, "--format", "json"])
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out
    doc = json.loads(out)
    return code, {a["name"]: a for a in doc["analyses"]}, elapsed


def record(number: int, name: str, ok: bool, elapsed: float, limit: float, detail: str) -> bool:
    within = elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    line = f"criterion {number} [{status}] {name}: {detail} ({elapsed:.2f}s, limit {limit:g}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok and within


def test_criterion_1_basis_certification(capsys):
    code, res, t = cli(capsys, "basis-check")
    split = res["symmetry-split"]["results"]
    inv = res["clifford-invariants"]
    ok = (code == EXIT_OK and split["symmetric"] == "10" and split["antisymmetric"] == "6"
          and split["gram_rank"] == "16" and inv["passed"] is True)
    detail = f"{split['symmetric']} symmetric, {split['antisymmetric']} antisymmetric, Gram rank {split['gram_rank']}"
    assert record(1, "basis certification", ok, t, 1, detail)


def test_criterion_2_total_symmetry(capsys):
    code, res, t = cli(capsys, "symmetry-dim")
    r = res["total-symmetry"]["results"]
    ok = (code == EXIT_OK and r["contraction_kernel_dimension"] == "35"
          and r["symmetrizer_image_dimension"] == "35" and r["kernel_equals_symmetrizer_image"] is True)
    detail = (f"kernel dim {r['contraction_kernel_dimension']}, symmetrizer image dim "
              f"{r['symmetrizer_image_dimension']}, equal={r['kernel_equals_symmetrizer_image']}")
    assert record(2, "total-symmetry characterization", ok, t, 5, detail)


def test_criterion_3_standard_collapse(capsys):
    code, res, t = cli(capsys, "constraints", "--formalism", "standard", "--expect", "0")
    r = res["constraint-nullspace"]["results"]
    ok = code == EXIT_OK and r["dimension"] == "0" and r["unknowns"] == "100"
    detail = f"nullspace dimension {r['dimension']} over {r['unknowns']} unknowns (expected 0)"
    assert record(3, "standard-formalism collapse", ok, t, 5, detail)


def test_criterion_4_generalized_survival(capsys):
    code, res, t = cli(capsys, "constraints", "--formalism", "generalized", "--expect", "35",
                       "--samples", "20", "--seed", SEED)
    r = res["constraint-nullspace"]["results"]
    probe = res["genericity-probe"]["results"]
    dims = set(probe["dimensions"])
    ok = (code == EXIT_OK and r["dimension"] == "35" and len(probe["dimensions"]) >= 20
          and probe["constant"] is True and dims == {"35"})
    detail = (f"dimension {r['dimension']} at unit coefficients (symbol nullity {r['symbol_nullity']}, "
              f"redundancy {r['redundancy']}); {len(probe['dimensions'])} samples give {sorted(dims)}")
    assert record(4, "generalized survival", ok, t, 60, detail)


def test_criterion_5_recovery(capsys):
    code, res, t = cli(capsys, "recovery-check")
    ok = code == EXIT_OK and res["recovery"]["results"]["span_equal_to_standard"] is True
    detail = f"span equal to standard system: {res['recovery']['results']['span_equal_to_standard']}"
    assert record(5, "recovery at the degenerate point", ok, t, 10, detail)


def test_criterion_6_on_shell_count(capsys):
    code_on, res_on, t_on = cli(capsys, "solve", "--formalism", "generalized", *ON_SHELL, "--expect", "5")
    code_off, res_off, t_off = cli(capsys, "solve", "--formalism", "generalized", *OFF_SHELL, "--expect", "0")
    on = res_on["solution-space"]["results"]
    off = res_off["solution-space"]["results"]
    ok = (code_on == EXIT_OK and on["dimension"] == "5" and on["oracle_dimension"] == "5"
          and on["oracle_agrees"] is True and code_off == EXIT_OK and off["dimension"] == "0")
    detail = (f"on-shell dimension {on['dimension']} (oracle {on['oracle_dimension']}, "
              f"agrees={on['oracle_agrees']}); off-shell dimension {off['dimension']}")
    assert record(6, "on-shell spin-2 count", ok, t_on + t_off, 30, detail)


def test_criterion_7_structural_match(capsys):
    code, res, t = cli(capsys, "derive", "--formalism", "standard")
    shape = res["shape-match"]["results"]
    cons = res["constraints-follow-from-dynamics"]["results"]
    ok = (code == EXIT_OK and res["shape-match"]["passed"] is True and shape["matched"] == shape["templated"]
          and res["constraints-follow-from-dynamics"]["passed"] is True)
    detail = (f"{shape['matched']}/{shape['templated']} equations match their shapes; "
              f"{cons['derivable']}/{cons['targets']} constraints in the dynamics span")
    assert record(7, "structural match of dynamics", ok, t, 10, detail)


def test_criterion_8_second_order(capsys):
    code, res, t = cli(capsys, "second-order")
    r = res["second-order"]["results"]
    ok = (code == EXIT_OK and r["equations"] == "16" and r["matched"] == "16" and r["trace_matches"] is True
          and r["vector_divergence_follows"] is True)
    detail = (f"{r['matched']}/{r['equations']} second-order equations match, trace matches={r['trace_matches']}, "
              f"vector divergence follows={r['vector_divergence_follows']}")
    assert record(8, "second-order reduction", ok, t, 5, detail)


def _dimensions(capsys, variant: str) -> tuple[dict, float]:
    dims, total = {}, 0.0
    code, res, t = cli(capsys, "constraints", "--formalism", "standard", "--r-variant", variant)
    dims["standard constraints"] = res["constraint-nullspace"]["results"]["dimension"]
    total += t
    code, res, t = cli(capsys, "constraints", "--formalism", "generalized", "--samples", "20", "--seed", SEED,
                       "--r-variant", variant)
    dims["generalized constraints"] = res["constraint-nullspace"]["results"]["dimension"]
    dims["generalized samples"] = tuple(res["genericity-probe"]["results"]["dimensions"])
    total += t
    for label, point in (("on-shell solve", ON_SHELL), ("off-shell solve", OFF_SHELL)):
        code, res, t = cli(capsys, "solve", "--formalism", "generalized", *point, "--r-variant", variant)
        assert code in (EXIT_OK, EXIT_FAIL)
        dims[label] = res["solution-space"]["results"]["dimension"]
        total += t
    return dims, total


def test_criterion_9_convention_robustness(capsys):
    default, t_default = _dimensions(capsys, "default")
    alternative, t_alt = _dimensions(capsys, "alternative")
    ok = default == alternative
    shown = {k: v for k, v in alternative.items() if k != "generalized samples"}
    detail = f"alternative R dimensions {shown} identical to default: {ok}"
    assert record(9, "convention robustness", ok, t_default + t_alt, 120, detail)
