from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bwspin2 import shapes
from bwspin2.clifford import SpinorMatrix, similarity_basis
from bwspin2.derive import (
    ConstraintSystem,
    DerivationContext,
    MissingBlock,
    OffShellRequested,
    TensorEquation,
    analyze_constraints,
    apply_bw_operator,
    check_consequences,
    clear_mass,
    derive_pair_dynamics,
    derive_symmetry_constraints,
    derive_tensor_dynamics,
    dynamics_only,
    genericity_probe,
    match_shapes,
    normalize,
    pair_consequence_targets,
    recovery_check,
    second_order_reduction,
    solution_space,
    tensor_consequence_targets,
    verify_consequence,
)
from bwspin2.exact import CRational, MomentumPoly
from bwspin2.fields import CoefficientSet, LinearForm, coefficient_samples, field_function
from bwspin2.linsys import RowSpace, span_equal
from bwspin2.multispinor import SIZE, Multispinor4
from bwspin2.oracle import onshell_space, same_span

ON_SHELL = ((5, 3, 0, 0), 4)
OFF_SHELL = ((1, 0, 0, 0), 4)


@pytest.fixture(scope="module")
def standard_eqs(ctx):
    return derive_tensor_dynamics("standard", None, ctx)


@pytest.fixture(scope="module")
def standard_dynamics(standard_eqs):
    return dynamics_only(standard_eqs)


# --- operator -----------------------------------------------------------------------

def test_operator_square(ctx):
    op = ctx.operator()
    m = ctx.m()
    shifted = op + SpinorMatrix([[m * 2 if i == j else m * 0 for j in range(4)] for i in range(4)])
    prod = shifted @ op
    box = shapes.p_squared() - m * m
    for i in range(4):
        for j in range(4):
            assert prod[i, j] == (box if i == j else MomentumPoly.zero())


def test_operator_kills_zero(ctx):
    zero = Multispinor4.zeros(LinearForm())
    for slot in (1, 2, 3, 4):
        assert apply_bw_operator(zero, slot, ctx).is_zero()


def test_slot_operators_commute(basis):
    ctx = DerivationContext(basis, 2, (1, 1, 0, 1))
    psi = field_function(basis, "standard")
    a = apply_bw_operator(apply_bw_operator(psi, 1, ctx), 3, ctx)
    b = apply_bw_operator(apply_bw_operator(psi, 3, ctx), 1, ctx)
    assert a == b


def test_context_validation(basis):
    with pytest.raises(ValueError):
        DerivationContext(basis, 0, (1, 0, 0, 0))
    with pytest.raises(ValueError):
        DerivationContext(basis, 1, (1, 0, 0))
    assert DerivationContext(basis, 4, (5, 3, 0, 0)).is_on_shell() is True
    assert DerivationContext(basis, 4, (1, 0, 0, 0)).is_on_shell() is False
    assert DerivationContext.symbolic(basis).is_on_shell() is None


def test_normalization():
    m = MomentumPoly.var("m")
    lf = LinearForm.term("G", (0, 0), m * m.scale(3)) + LinearForm.term("G", (0, 1), m * MomentumPoly.var("p1"))
    cleared = clear_mass(lf)
    assert cleared == LinearForm.term("G", (0, 0), m.scale(3)) + LinearForm.term("G", (0, 1), MomentumPoly.var("p1"))
    n = normalize(lf)
    assert n.coefficient(n.symbols()[0]).sorted_terms()[0][1] == CRational(1)


def test_constraint_system_rejects_foreign_symbols():
    eq = TensorEquation(LinearForm.term("D", (0, 1, 0, 1)), (), "x")
    with pytest.raises(ValueError):
        ConstraintSystem([eq], [])


# --- pair level ---------------------------------------------------------------------

def test_pair_dynamics_shapes(ctx):
    eqs = derive_pair_dynamics(ctx)
    fams = [e.provenance for e in eqs]
    assert fams.count("bw-slot1:gamma") == 4 and fams.count("bw-slot1:sigma") == 6
    assert all(m.matched for m in match_shapes(eqs, "pair"))


def test_pair_constraints_follow(ctx):
    dyn = dynamics_only(derive_pair_dynamics(ctx))
    results = check_consequences(dyn, pair_consequence_targets())
    assert all(r.derivable for r in results)
    assert verify_consequence(dyn)


def test_pair_at_rest_momentum_is_algebraic(basis):
    eqs = derive_pair_dynamics(DerivationContext(basis, 1, (0, 0, 0, 0)))
    assert len(eqs) == 10
    assert all(len(e.lhs.terms) == 1 for e in eqs)


# --- standard tensor level ------------------------------------------------------------

def test_standard_shapes(standard_eqs):
    assert len(standard_eqs) == 150
    results = match_shapes(standard_eqs, "standard")
    assert all(r.matched is True for r in results)


def test_standard_constraints_follow(standard_dynamics):
    assert len(standard_dynamics) == 100
    results = check_consequences(standard_dynamics, tensor_consequence_targets())
    assert len(results) == 50
    assert all(r.derivable for r in results)


def test_mutilated_dynamics_lose_consequences(standard_dynamics):
    cut = [e for e in standard_dynamics if e.provenance != "bw-slot1:gamma|gamma"]
    assert not verify_consequence(cut, tensor_consequence_targets()[:4])


def test_empty_dynamics_prove_nothing():
    assert not verify_consequence([], tensor_consequence_targets()[:1])


def test_degenerate_generalized_dynamics_equal_standard(ctx, standard_eqs):
    deg = derive_tensor_dynamics("generalized", CoefficientSet.degenerate(), ctx)
    assert [str(e) for e in deg] == [str(e) for e in standard_eqs]


def test_generalized_needs_coefficients(ctx):
    with pytest.raises(ValueError):
        derive_tensor_dynamics("generalized", None, ctx)


@pytest.mark.parametrize("coeffs", [CoefficientSet.ones(), coefficient_samples(11, 1)[0]])
def test_generalized_shapes(ctx, coeffs):
    eqs = derive_tensor_dynamics("generalized", coeffs, ctx)
    results = match_shapes(eqs, "generalized", coeffs)
    checked = [r for r in results if r.matched is not None]
    assert len(checked) == 100
    assert all(r.matched for r in checked)


def test_undifferentiated_d_term_does_not_match(ctx):
    c = CoefficientSet.ones()
    eqs = [e for e in derive_tensor_dynamics("generalized", c, ctx) if e.provenance == "bw-slot1:gamma|sigma"]
    assert len(eqs) == 24
    literal = [shapes.mixed_tensor_divergence_form(c, e.indices["kappa"], e.indices["tau"], e.indices["nu"],
                                                   derivative_on_d=False) for e in eqs]
    assert not any(shapes.proportional(e.lhs, ref) for e, ref in zip(eqs, literal))


# --- symmetry constraints -------------------------------------------------------------

def test_standard_constraint_counts():
    a = analyze_constraints("standard")
    assert (a.unknowns, a.rank, a.redundancy) == (100, 65, 0)
    assert a.nullity == a.field_dimension == 35


def test_generalized_constraint_counts():
    a = analyze_constraints("generalized")
    assert (a.unknowns, a.rank, a.nullity, a.redundancy, a.field_dimension) == (256, 65, 191, 156, 35)


def test_constraint_provenance_labels(basis):
    system = derive_symmetry_constraints("standard", None, basis)
    assert all(e.provenance.startswith("contraction:") for e in system.equations)
    assert {k for e in system.equations for k, _ in e.free_indices} == {"alpha", "delta"}


def test_genericity_probe_constant():
    probe = genericity_probe(5, 3)
    assert probe.constant
    assert probe.field_dimensions == (35, 35, 35)


def test_recovery_at_degenerate_point():
    assert recovery_check()


def test_recovery_fails_away_from_degenerate_point():
    assert not recovery_check(CoefficientSet.ones())


# --- second-order reduction -------------------------------------------------------------

def test_second_order_reduction(standard_dynamics):
    res = second_order_reduction(standard_dynamics)
    assert len(res.second_order) == 16
    for e in res.second_order:
        assert shapes.proportional(e.lhs, shapes.second_order_form(e.indices["kappa"], e.indices["mu"]))
    assert shapes.proportional(res.trace.lhs, shapes.trace_form())
    assert len(res.vector_definition) == 4
    assert res.divergence_follows


def test_second_order_needs_g_block(ctx):
    eqs = derive_tensor_dynamics("generalized", CoefficientSet.ones().replace(alpha1=0), ctx)
    with pytest.raises(MissingBlock):
        second_order_reduction(dynamics_only(eqs))
    with pytest.raises(MissingBlock):
        second_order_reduction([])


# --- solution spaces ----------------------------------------------------------------------

def _span(vectors) -> RowSpace:
    rs = RowSpace(SIZE)
    for v in vectors:
        rs.add(v)
    return rs


@pytest.mark.parametrize("formalism", ["standard", "generalized"])
def test_on_shell_solution_matches_oracle(basis, formalism):
    p, m = ON_SHELL
    sol = solution_space(formalism, None, p, m, basis=basis, require_on_shell=True)
    assert sol.on_shell and sol.field_dimension == 5
    assert same_span(_span(sol.field_basis), onshell_space(basis, p, m))


def test_off_shell_solution_is_trivial(basis):
    p, m = OFF_SHELL
    sol = solution_space("generalized", None, p, m, basis=basis)
    assert not sol.on_shell and sol.field_dimension == 0


def test_off_shell_request_rejected(basis):
    with pytest.raises(OffShellRequested):
        solution_space("standard", None, (5, 3, 0, 0), 7, basis=basis, require_on_shell=True)


def test_constraints_only_solution(basis):
    sol = solution_space("standard", None, (5, 3, 0, 0), 7, include_bw=False, basis=basis, require_on_shell=True)
    assert sol.dimension == sol.field_dimension == 35


@settings(max_examples=4, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 5))
def test_on_shell_dimension_is_five(a, b, k):
    # (p0, p1, p2, 0) with p0 = sqrt(m^2 + p1^2 + p2^2) picked from a Pythagorean-style triple
    p1, p2 = Fraction(2 * a * k), Fraction(b)
    m = Fraction(a * a * k * k + 1) if a else Fraction(1)
    p0_sq = m * m + p1 * p1 + p2 * p2
    p0 = _exact_sqrt(p0_sq)
    if p0 is None:
        return
    sol = solution_space("standard", None, (p0, p1, p2, 0), m, require_on_shell=True)
    assert sol.field_dimension == 5


def _exact_sqrt(x: Fraction):
    from math import isqrt

    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    return Fraction(rn, rd) if rn * rn == n and rd * rd == d else None


# --- basis independence ----------------------------------------------------------------------

def test_alternative_r_gives_same_counts(alt_basis):
    for formalism in ("standard", "generalized"):
        a = analyze_constraints(formalism, None, alt_basis)
        b = analyze_constraints(formalism)
        assert (a.rank, a.nullity, a.field_dimension) == (b.rank, b.nullity, b.field_dimension)
    p, m = ON_SHELL
    assert solution_space("generalized", None, p, m, basis=alt_basis).field_dimension == 5


def test_similarity_basis_gives_same_counts(basis):
    s = SpinorMatrix([[CRational(x) for x in row] for row in ([1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 2, 0], [1, 0, 0, 1])])
    other = similarity_basis(basis, s)
    a = analyze_constraints("standard", None, other)
    assert (a.rank, a.nullity) == (65, 35)
    p, m = ON_SHELL
    sol = solution_space("standard", None, p, m, basis=other)
    assert sol.field_dimension == 5
    assert same_span(_span(sol.field_basis), onshell_space(other, p, m))


def test_alternative_constraints_span_equal(basis, alt_basis):
    a = derive_symmetry_constraints("standard", None, basis)
    b = derive_symmetry_constraints("standard", None, alt_basis)
    assert a.row_space().rank == b.row_space().rank
    assert span_equal(a.matrix(), a.matrix().stack(b.matrix()))


def test_recovery_fails_without_g_block():
    assert not recovery_check(CoefficientSet.degenerate().replace(alpha1=0))
