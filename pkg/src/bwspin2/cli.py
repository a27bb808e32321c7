"""Command-line driver.

Exit codes: 0 success, 1 a requested verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import derive, oracle
from .clifford import (
    SplitViolation,
    alternative_basis,
    build_dirac_basis,
    check_symmetry_split,
    clifford_invariants,
    convention_ledger,
)
from .exact import ParseError, parse_rational
from .fields import CoefficientConfigError, CoefficientSet, parse_coefficient_config
from .linsys import RowSpace
from .multispinor import contraction_kernel, symmetrizer_image, symmetric_subspace_dim
from .report import Analysis, Report, emit_analysis, emit_equations, versions_for
from . import shapes

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _momentum(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError(f"--p needs four comma-separated rationals, got {text!r}")
    try:
        return tuple(parse_rational(x) for x in parts)
    except ParseError as exc:
        raise UsageError(str(exc)) from None


def _mass(text: str) -> Fraction:
    try:
        m = parse_rational(text)
    except ParseError as exc:
        raise UsageError(str(exc)) from None
    if m <= 0:
        raise UsageError("--mass must be positive")
    return m


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("BWSPIN2_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"BWSPIN2_SEED must be an integer, got {env!r}") from None


def _coeffs(args, default: CoefficientSet | None = None) -> CoefficientSet:
    path = getattr(args, "coeffs", None)
    if not path:
        return default or CoefficientSet.ones()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read coefficient file: {exc}") from None
    try:
        return parse_coefficient_config(text)
    except CoefficientConfigError as exc:
        raise UsageError(str(exc)) from None


def _basis(args):
    return alternative_basis() if args.r_variant == "alternative" else build_dirac_basis()


def _coeff_echo(formalism: str, coeffs: CoefficientSet | None) -> dict:
    if formalism != "generalized" or coeffs is None:
        return {}
    return dict(coeffs.as_dict())


def _new_report(basis, inputs: dict) -> Report:
    return Report(convention_ledger=convention_ledger(basis), versions=versions_for(inputs))


# --- subcommands --------------------------------------------------------------------

def cmd_basis_check(args, basis) -> Report:
    rep = _new_report(basis, {"cmd": "basis-check", "r": basis.r_label})
    checks = clifford_invariants(basis)
    try:
        split = check_symmetry_split(basis)
        split_res = {"symmetric": str(split.symmetric_count), "antisymmetric": str(split.antisymmetric_count),
                     "gram_rank": str(split.gram_rank), "independent": split.independent}
        split_ok = split.symmetric_count == 10 and split.antisymmetric_count == 6 and split.independent
    except SplitViolation as exc:
        split_res = {"violation": exc.label, "expected": exc.expected}
        split_ok = False
    rep.add(Analysis("symmetry-split", {"r": basis.r_label}, split_res, split_ok))
    rep.add(Analysis("clifford-invariants", {}, {c.name: c.passed for c in checks}, all(c.passed for c in checks)))
    return rep


def cmd_symmetry_dim(args, basis) -> Report:
    rep = _new_report(basis, {"cmd": "symmetry-dim", "r": basis.r_label})
    mats = [m.matrix for m in basis.contraction_matrices()]
    kernel = RowSpace(256)
    for v in contraction_kernel(mats):
        kernel.add(v)
    image = symmetrizer_image()
    equal = oracle.same_span(kernel, image)
    res = {
        "pair_symmetric_dimension": "100",
        "contraction_kernel_dimension": str(symmetric_subspace_dim(mats)),
        "symmetrizer_image_dimension": str(image.rank),
        "kernel_equals_symmetrizer_image": equal,
    }
    rep.add(Analysis("total-symmetry", {"r": basis.r_label}, res, equal and image.rank == 35))
    return rep


def _with_expect(res: dict, value: int, expect: int | None) -> bool | None:
    if expect is None:
        return None
    res["expected_dimension"] = str(expect)
    return value == expect


def cmd_constraints(args, basis) -> Report:
    coeffs = _coeffs(args) if args.formalism == "generalized" else None
    inputs = {"cmd": "constraints", "formalism": args.formalism, "r": basis.r_label,
              **_coeff_echo(args.formalism, coeffs)}
    rep = _new_report(basis, inputs)
    a = derive.analyze_constraints(args.formalism, coeffs, basis)
    res = {
        "dimension": str(a.field_dimension),
        "symbol_nullity": str(a.nullity),
        "redundancy": str(a.redundancy),
        "rank": str(a.rank),
        "unknowns": str(a.unknowns),
        "equations": str(a.equations),
    }
    passed = _with_expect(res, a.field_dimension, args.expect)
    rep.add(Analysis("constraint-nullspace", inputs, res, passed))
    if args.samples:
        seed = _seed(args)
        probe = derive.genericity_probe(seed, args.samples, basis)
        rep.add(Analysis(
            "genericity-probe",
            {"seed": str(seed), "samples": str(args.samples), "formalism": "generalized", "r": basis.r_label},
            {"dimensions": [str(d) for d in probe.field_dimensions],
             "symbol_nullities": [str(d) for d in probe.nullities],
             "constant": probe.constant},
            probe.constant and (args.expect is None or set(probe.field_dimensions) == {args.expect})))
    if args.show_equations:
        rep.equation_sets["constraints"] = derive.derive_symmetry_constraints(args.formalism, coeffs, basis).equations
    return rep


def cmd_derive(args, basis) -> Report:
    coeffs = _coeffs(args) if args.formalism == "generalized" else None
    ctx = derive.DerivationContext.symbolic(basis)
    inputs = {"cmd": "derive", "formalism": args.formalism, "level": args.level, "r": basis.r_label,
              **_coeff_echo(args.formalism, coeffs)}
    rep = _new_report(basis, inputs)
    if args.level == "pair":
        eqs = derive.derive_pair_dynamics(ctx, coeffs)
        kind = "pair" if coeffs is None else None
        targets = derive.pair_consequence_targets()
    else:
        eqs = derive.derive_tensor_dynamics(args.formalism, coeffs, ctx)
        kind = args.formalism
        targets = derive.tensor_consequence_targets()
    rep.equation_sets["dynamics"] = eqs
    if kind is not None:
        matches = derive.match_shapes(eqs, kind, coeffs)
        checked = [m for m in matches if m.matched is not None]
        rep.add(Analysis("shape-match", inputs, {
            "equations": str(len(eqs)),
            "templated": str(len(checked)),
            "matched": str(sum(m.matched for m in checked)),
            "unmatched": [m.label for m in checked if not m.matched],
        }, all(m.matched for m in checked)))
    if args.formalism == "standard" or args.level == "pair":
        res = derive.check_consequences(derive.dynamics_only(eqs), targets)
        rep.add(Analysis("constraints-follow-from-dynamics", inputs, {
            "targets": str(len(res)),
            "derivable": str(sum(r.derivable for r in res)),
            "not_derivable": [r.label for r in res if not r.derivable],
            "mass_powers": sorted({str(r.mass_power) for r in res if r.derivable}),
        }, all(r.derivable for r in res)))
    return rep


def cmd_solve(args, basis) -> Report:
    if args.p is None or args.mass is None:
        raise UsageError("solve needs --p and --mass")
    p = _momentum(args.p)
    m = _mass(args.mass)
    coeffs = _coeffs(args) if args.formalism == "generalized" else None
    include_bw = not args.constraints_only
    inputs = {"cmd": "solve", "formalism": args.formalism, "p": [str(x) for x in p], "m": str(m),
              "include": "constraints" if args.constraints_only else "constraints+bw", "r": basis.r_label,
              **_coeff_echo(args.formalism, coeffs)}
    rep = _new_report(basis, inputs)
    try:
        sol = derive.solution_space(args.formalism, coeffs, p, m, include_bw, basis, args.on_shell_required)
    except derive.OffShellRequested as exc:
        raise UsageError(str(exc)) from None
    res = {
        "dimension": str(sol.field_dimension),
        "symbol_nullity": str(sol.dimension),
        "redundancy": str(sol.redundancy),
        "on_shell": sol.on_shell,
        "field_basis": [{str(k): v for k, v in vec.items()} for vec in sol.field_basis],
    }
    checks = []
    if include_bw:
        expected = oracle.onshell_space(basis, p, m)
        got = RowSpace(256)
        for v in sol.field_basis:
            got.add(v)
        agree = oracle.same_span(got, expected)
        res["oracle_dimension"] = str(expected.rank)
        res["oracle_agrees"] = agree
        checks.append(agree)
    exp = _with_expect(res, sol.field_dimension, args.expect)
    if exp is not None:
        checks.append(exp)
    rep.add(Analysis("solution-space", inputs, res, all(checks) if checks else None))
    return rep


def cmd_recovery(args, basis) -> Report:
    coeffs = _coeffs(args, CoefficientSet.degenerate())
    inputs = {"cmd": "recovery-check", "r": basis.r_label, **coeffs.as_dict()}
    rep = _new_report(basis, inputs)
    ok = derive.recovery_check(coeffs, basis)
    rep.add(Analysis("recovery", inputs, {"span_equal_to_standard": ok}, ok))
    return rep


def cmd_second_order(args, basis) -> Report:
    coeffs = _coeffs(args) if args.formalism == "generalized" else None
    ctx = derive.DerivationContext.symbolic(basis)
    inputs = {"cmd": "second-order", "formalism": args.formalism, "r": basis.r_label,
              **_coeff_echo(args.formalism, coeffs)}
    rep = _new_report(basis, inputs)
    dyn = derive.dynamics_only(derive.derive_tensor_dynamics(args.formalism, coeffs, ctx))
    try:
        so = derive.second_order_reduction(dyn)
    except derive.MissingBlock as exc:
        rep.add(Analysis("second-order", inputs, {"error": str(exc)}, False))
        return rep
    shape_ok = [shapes.proportional(e.lhs, shapes.second_order_form(e.indices["kappa"], e.indices["mu"]))
                for e in so.second_order]
    trace_ok = shapes.proportional(so.trace.lhs, shapes.trace_form())
    rep.equation_sets["second_order"] = so.second_order + [so.trace]
    rep.equation_sets["vector_pair"] = so.vector_definition + [so.vector_divergence]
    rep.add(Analysis("second-order", inputs, {
        "equations": str(len(so.second_order)),
        "matched": str(sum(shape_ok)),
        "trace_matches": trace_ok,
        "vector_divergence_follows": so.divergence_follows,
    }, len(so.second_order) == 16 and all(shape_ok) and trace_ok and so.divergence_follows))
    return rep


COMMANDS = {
    "basis-check": cmd_basis_check,
    "symmetry-dim": cmd_symmetry_dim,
    "constraints": cmd_constraints,
    "derive": cmd_derive,
    "solve": cmd_solve,
    "recovery-check": cmd_recovery,
    "second-order": cmd_second_order,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "latex"), default="text")
    common.add_argument("--out", help="write the document here instead of stdout")
    common.add_argument("--seed", type=int, help="sampling seed (falls back to $BWSPIN2_SEED, then 0)")
    common.add_argument("--r-variant", choices=("default", "alternative"), default="default",
                        help="default R = i g^2 g^0 or the rescaled alternative 2 g^2 g^0")

    parser = _Parser(prog="bwspin2", description="Exact spin-2 Bargmann-Wigner derivations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("basis-check", parents=[common], help="certify the gamma basis and the R split")
    sub.add_parser("symmetry-dim", parents=[common], help="contraction kernel vs the full symmetrizer")

    def formalism(p, coeffs=True):
        p.add_argument("--formalism", choices=("standard", "generalized"), default="standard")
        if coeffs:
            p.add_argument("--coeffs", help="coefficient file (key = rational per line)")

    p = sub.add_parser("constraints", parents=[common], help="symmetry constraints and their nullspace")
    formalism(p)
    p.add_argument("--expect", type=int, help="fail (exit 1) unless the dimension equals this")
    p.add_argument("--samples", type=int, default=0, help="also probe this many random coefficient sets")
    p.add_argument("--show-equations", action="store_true")

    p = sub.add_parser("derive", parents=[common], help="first-order dynamics from the BW equation")
    formalism(p)
    p.add_argument("--level", choices=("tensor", "pair"), default="tensor")

    p = sub.add_parser("solve", parents=[common], help="joint kernel at a numeric momentum")
    formalism(p)
    p.add_argument("--p", help="momentum a,b,c,d (rationals)")
    p.add_argument("--mass", help="mass (positive rational)")
    p.add_argument("--on-shell-required", action="store_true")
    p.add_argument("--constraints-only", action="store_true")
    p.add_argument("--expect", type=int)

    p = sub.add_parser("recovery-check", parents=[common], help="degenerate generalized vs standard constraints")
    p.add_argument("--coeffs", help="coefficient file (default: the degenerate point)")

    p = sub.add_parser("second-order", parents=[common], help="eliminate T to get the second-order G equation")
    formalism(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.format == "latex" and args.command not in ("derive", "second-order", "constraints"):
            raise UsageError("--format latex is only available for equation-producing subcommands")
        basis = _basis(args)
        t0 = time.perf_counter()
        rep = COMMANDS[args.command](args, basis)
        elapsed = time.perf_counter() - t0
    except UsageError as exc:
        print(f"bwspin2: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "latex":
        eqs = [e for s in rep.equation_sets.values() for e in s]
        doc = emit_equations(eqs, "latex")
    else:
        doc = emit_analysis(rep, args.format)
    if args.out:
        Path(args.out).write_text(doc)
    else:
        sys.stdout.write(doc)
    print(f"bwspin2: {args.command} finished in {elapsed:.2f}s", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
