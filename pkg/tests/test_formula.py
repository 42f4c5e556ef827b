import pytest
from hypothesis import given

from clbench.formula import (
    ATOM,
    FormulaSyntaxError,
    atom,
    conj,
    corec,
    disj,
    modal_depth,
    natom,
    negate,
    parse_formula,
    parse_path,
    politerals,
    rec,
    render,
    subformula_at,
    walk,
)

from helpers import formulas

PQQ = conj(atom("P"), disj(natom("Q"), natom("Q")))


@pytest.mark.parametrize("text, expected", [
    ("P & (~Q | ~Q)", PQQ),
    ("~(P & Q)", disj(natom("P"), natom("Q"))),
    ("?~P | !P", disj(corec(natom("P")), rec(atom("P")))),
    ("~!P", corec(natom("P"))),
    ("~?(P | Q)", rec(conj(natom("P"), natom("Q")))),
    ("¬P ∨ ⫰P", disj(natom("P"), rec(atom("P")))),
    ("P | Q | R", disj(disj(atom("P"), atom("Q")), atom("R"))),
    ("P | Q & R", disj(atom("P"), conj(atom("Q"), atom("R")))),
])
def test_parse(text, expected):
    assert parse_formula(text) == expected


@pytest.mark.parametrize("f, text", [
    (PQQ, "P & (~Q | ~Q)"),
    (atom("P"), "P"),
    (disj(corec(natom("P")), rec(atom("P"))), "?~P | !P"),
    (disj(atom("P"), disj(atom("Q"), atom("R"))), "P | (Q | R)"),
    (rec(disj(atom("P"), natom("P"))), "!(P | ~P)"),
])
def test_render(f, text):
    assert render(f) == text


@pytest.mark.parametrize("text, col", [
    ("", 0), ("P &", 3), ("(P | Q", 6), ("p", 0), ("P Q", 2), ("P $ Q", 2),
])
def test_syntax_errors_carry_a_column(text, col):
    with pytest.raises(FormulaSyntaxError) as e:
        parse_formula(text)
    assert e.value.pos == col


@given(formulas(("P", "Q", "R"), max_leaves=8))
def test_parse_render_round_trip(f):
    assert parse_formula(render(f)) == f


@given(formulas())
def test_negation_is_an_involution(f):
    assert negate(negate(f)) == f
    assert parse_formula("~(" + render(f) + ")") == negate(f)


def test_subformula_at():
    assert subformula_at(PQQ, ()) == PQQ
    assert subformula_at(PQQ, (1, 0)) == natom("Q")
    assert subformula_at(parse_formula("?~P | !P"), (1, 0)) == atom("P")
    with pytest.raises(IndexError):
        subformula_at(PQQ, (0, 0))


def test_politerals_and_depth():
    assert politerals(PQQ) == [(0,), (1, 0), (1, 1)]
    assert politerals(atom("P")) == [()]
    f = parse_formula("?~P | !P")
    assert politerals(f) == [(0, 0), (1, 0)]
    assert modal_depth(PQQ, (1, 0)) == 0
    assert modal_depth(f, (1, 0)) == 1
    assert modal_depth(parse_formula("!?P"), (0, 0)) == 2
    with pytest.raises(IndexError):
        modal_depth(f, (2,))


@given(formulas(("P", "Q"), max_leaves=8))
def test_politerals_are_literals_and_root_depth_zero(f):
    for p in politerals(f):
        assert subformula_at(f, p).is_literal
    assert modal_depth(f, ()) == 0
    assert len(list(walk(f))) >= len(politerals(f))


def test_paths():
    assert parse_path("e") == ()
    assert parse_path("101") == (1, 0, 1)
    with pytest.raises(ValueError):
        parse_path("12")
