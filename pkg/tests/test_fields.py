from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bwspin2.exact import MomentumPoly
from bwspin2.fields import (
    BLOCKS,
    CoefficientConfigError,
    CoefficientSet,
    FieldSymbol,
    LinearForm,
    block_symbols,
    canonical,
    coefficient_samples,
    embedding_matrix,
    enumerate_symbols,
    field_function,
    format_coefficient_config,
    parse_coefficient_config,
    parse_symbol,
    symbols_in,
)
from bwspin2.linsys import RowSpace
from bwspin2.multispinor import SIZE, is_pair_symmetric, pair_symmetric_coordinates


@pytest.fixture(scope="module")
def standard_psi(basis):
    return field_function(basis, "standard")


@pytest.fixture(scope="module")
def generalized_psi(basis):
    return field_function(basis, "generalized")


def test_symbol_counts():
    assert len(enumerate_symbols("standard")) == 100
    assert len(enumerate_symbols("generalized")) == 256
    counts = {b: len(block_symbols(b)) for b in ("G", "F", "T", "R", "D")}
    assert counts == {"G": 16, "F": 24, "T": 24, "R": 36, "D": 36}


def test_unknown_formalism():
    with pytest.raises(ValueError):
        enumerate_symbols("other")


def test_canonical_signs():
    assert canonical("F", (2, 1, 0)) == (-1, FieldSymbol("F", (1, 2, 0)))
    assert canonical("R", (1, 0, 3, 2)) == (1, FieldSymbol("R", (0, 1, 2, 3)))
    assert canonical("R", (1, 1, 2, 3)) == (0, None)
    assert LinearForm.term("T", (0, 2, 1), 3) == LinearForm.term("T", (0, 1, 2), -3)


def test_noncanonical_symbol_rejected():
    with pytest.raises(ValueError):
        FieldSymbol("F", (2, 1, 0))
    with pytest.raises(ValueError):
        FieldSymbol("G", (0,))
    with pytest.raises(ValueError):
        FieldSymbol("Q", (0,))


@given(st.sampled_from(enumerate_symbols("generalized")))
def test_symbol_text_round_trip(sym):
    assert parse_symbol(str(sym)) == sym


def test_parse_symbol_errors():
    for bad in ("G01", "G^0x", "^01"):
        with pytest.raises(ValueError):
            parse_symbol(bad)


def test_linear_form_text():
    lf = LinearForm.term("Psi", (0,), MomentumPoly.var("m")) - LinearForm.term("PsiT", (0, 1), MomentumPoly.var("p1", 2))
    assert str(lf) == "m*Psi^0 - 2*p1*PsiT^01"
    assert str(LinearForm.term("G", (0, 1))) == "G^01"
    assert str(LinearForm()) == "0"


def test_coefficient_config_parsing():
    c = parse_coefficient_config("alpha1 = 2  # comment\nbeta9 = -3/4\n\n")
    assert c.a(1) == 2 and c.b(9) == Fraction(-3, 4) and c.a(2) == 1
    assert parse_coefficient_config(format_coefficient_config(c)) == c


@pytest.mark.parametrize("text", ["alpha1 2", "gamma1 = 1", "alpha1 = 1\nalpha1 = 2", "beta2 = x"])
def test_coefficient_config_errors(text):
    with pytest.raises(CoefficientConfigError):
        parse_coefficient_config(text)


def test_coefficient_samples_deterministic():
    a = coefficient_samples(7, 5)
    assert a == coefficient_samples(7, 5)
    assert all(c.all_nonzero() for c in a)
    assert a != coefficient_samples(8, 5)


def test_degenerate_equals_standard(basis, standard_psi):
    degenerate = field_function(basis, "generalized", CoefficientSet.degenerate())
    assert degenerate == standard_psi
    assert {s.block for s in symbols_in(degenerate)} == {"G", "F", "T", "R"}


def test_field_functions_pair_symmetric(standard_psi, generalized_psi):
    assert is_pair_symmetric(standard_psi)
    assert is_pair_symmetric(generalized_psi)


def test_all_symbols_appear(standard_psi, generalized_psi):
    assert symbols_in(standard_psi) == set(enumerate_symbols("standard"))
    assert symbols_in(generalized_psi) == set(enumerate_symbols("generalized"))


@pytest.mark.parametrize("formalism", ["standard", "generalized"])
def test_embedding_image_is_pair_symmetric_space(formalism, standard_psi, generalized_psi):
    psi = standard_psi if formalism == "standard" else generalized_psi
    emb = embedding_matrix(psi, enumerate_symbols(formalism))
    image = RowSpace(SIZE)
    for col in emb.transpose().sparse_rows():
        image.add(col)
    target = RowSpace(SIZE)
    for v in pair_symmetric_coordinates():
        target.add(v)
    assert image.rank == target.rank == 100
    assert all(target.contains(r) for r in image.reduced_rows())


def test_block_table_consistent():
    for name, spec in BLOCKS.items():
        assert spec.name == name
        assert all(0 <= i < j < spec.rank for i, j in spec.antisym)
