from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bwspin2.clifford import (
    LORENTZ,
    SingularGram,
    SpinorMatrix,
    SplitViolation,
    build_dirac_basis,
    check_symmetry_split,
    clifford_invariants,
    convention_ledger,
    gram_dual,
    levi_civita,
    nonzero_epsilon,
    similarity_basis,
    trace_pair,
)
from bwspin2.exact import CRational, I, ONE, ZERO


def test_invariants_pass(basis):
    checks = clifford_invariants(basis)
    assert checks and all(c.passed for c in checks)


def test_split_counts(basis):
    rep = check_symmetry_split(basis)
    assert (rep.symmetric_count, rep.antisymmetric_count, rep.gram_rank, rep.independent) == (10, 6, 16, True)


def test_member_symmetry(basis):
    assert all(m.matrix.is_symmetric() for m in basis.symmetric_members())
    assert all(m.matrix.is_antisymmetric() for m in basis.antisymmetric_members())
    assert all(m.matrix.is_antisymmetric() for m in basis.contraction_matrices())


def test_r_matrix_entries(basis):
    expected = SpinorMatrix.from_ints([[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]])
    assert basis.r_matrix == expected


def test_identity_r_breaks_split():
    with pytest.raises(SplitViolation) as exc:
        check_symmetry_split(build_dirac_basis(SpinorMatrix.identity()))
    assert exc.value.label == "gamma^1 R"


def test_alternative_r_passes(alt_basis, basis):
    assert alt_basis.r_matrix != basis.r_matrix
    assert check_symmetry_split(alt_basis).independent


def test_trace_orthogonality(basis):
    mem = {m.label: m.matrix for m in basis.members()}
    assert trace_pair(mem["gamma^0 R"], mem["gamma5 R"]) == ZERO
    assert trace_pair(SpinorMatrix.zero(), SpinorMatrix.identity()) == ZERO


def test_gram_dual_is_dual(basis):
    members = basis.members()
    duals = gram_dual(basis, members)
    for i, e in enumerate(duals):
        for j, b in enumerate(members):
            assert trace_pair(e, b.matrix) == (ONE if i == j else ZERO)


def test_gram_dual_singular(basis):
    members = basis.members()
    with pytest.raises(SingularGram):
        gram_dual(basis, members[:15] + [members[0]])


def test_levi_civita():
    assert levi_civita(0, 1, 2, 3) == 1 and levi_civita(0, 1, 2, 3, lowered=True) == -1
    assert levi_civita(1, 0, 2, 3) == -1 and levi_civita(0, 0, 2, 3) == 0
    assert len(nonzero_epsilon()) == 24


def test_gamma5_sigma_duality(basis):
    # gamma5 sigma^{mu nu} = (i/2) eps^{mu nu rho sigma} sigma_{rho sigma}
    g = basis.metric
    half_i = CRational(0, "1/2")
    for mu, nu in itertools.product(LORENTZ, repeat=2):
        rhs = SpinorMatrix.zero()
        for rho, sig in itertools.product(LORENTZ, repeat=2):
            e = levi_civita(mu, nu, rho, sig)
            if e:
                rhs = rhs + basis.sigma[rho, sig].scale(half_i * e * g[rho] * g[sig])
        assert basis.gamma5 @ basis.sigma[mu, nu] == rhs


def test_slash_squares_to_p2(basis):
    p = [CRational(5), CRational(3), CRational(1), CRational(-2)]
    s = basis.slash(p)
    p2 = 25 - 9 - 1 - 4
    assert s @ s == SpinorMatrix.identity().scale(p2)


def test_matrix_inverse(basis):
    r = basis.r_matrix
    assert r @ r.inverse() == SpinorMatrix.identity()
    with pytest.raises(ZeroDivisionError):
        SpinorMatrix.zero().inverse()


def test_convention_ledger(basis):
    led = convention_ledger(basis)
    assert led["metric"] == "diag(+1,-1,-1,-1)"
    assert "R" in led["r_matrix"]


small = st.integers(-2, 2)


@settings(max_examples=25, deadline=None)
@given(st.lists(small, min_size=16, max_size=16), st.lists(small, min_size=16, max_size=16))
def test_similarity_preserves_split(basis, re, im):
    s = SpinorMatrix([[CRational(re[4 * i + j], im[4 * i + j]) for j in range(4)] for i in range(4)])
    try:
        s.inverse()
    except ZeroDivisionError:
        return
    other = similarity_basis(basis, s)
    assert all(c.passed for c in clifford_invariants(other))
    assert check_symmetry_split(other).gram_rank == 16


@given(st.sampled_from([CRational(2), CRational(0, 3), CRational(-1, 1), I]))
def test_rescaled_r_passes(c):
    b = build_dirac_basis(build_dirac_basis().r_matrix.scale(c))
    assert check_symmetry_split(b).independent


def test_r_times_gamma5_fails_split(basis):
    with pytest.raises(SplitViolation):
        check_symmetry_split(build_dirac_basis(basis.r_matrix @ basis.gamma5))
