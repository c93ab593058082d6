import pytest
from hypothesis import assume, given, strategies as st

from fatcheck.fou import stlc_infer
from fatcheck.reduction import (
    FALSE, TRUE, Fuel, FuelExhausted, NotANumeral, beta_normalize, betaeta_equal,
    betaeta_normal_form, church_bool, church_numeral, eta_reduce, read_bool, read_numeral,
)
from fatcheck.syntax import alpha_eq, apps, free_vars, parse_term

from test_syntax import terms

P = parse_term


def test_beta_examples():
    assert alpha_eq(beta_normalize(P(r"(\x. x) (\y. y)")), P(r"\y. y"))
    assert alpha_eq(beta_normalize(P(r"(\x y. x) a b")), P("a"))
    # no capture: (\x y. x) y  ->  \y'. y
    assert alpha_eq(beta_normalize(P(r"(\x y. x) y")), P(r"\z. y"))


def test_type_redexes():
    t = P(r"(/\X. \x. x [X]) [Y]", "church")
    assert alpha_eq(beta_normalize(t), P(r"\x. x [Y]", "church"))


def test_eta():
    assert eta_reduce(P(r"\x. f x")) == P("f")
    assert eta_reduce(P(r"\x. x x")) == P(r"\x. x x")
    assert betaeta_equal(P(r"\x y. f x y"), P("f"))


def test_fuel():
    omega = P(r"(\x. x x) (\x. x x)")
    with pytest.raises(FuelExhausted):
        beta_normalize(omega, 50)
    with pytest.raises(FuelExhausted):
        beta_normalize(omega, Fuel(10), "rightmost-innermost")


def test_fuel_from_environment(monkeypatch):
    monkeypatch.setenv("FATCHECK_FUEL", "7")
    assert Fuel().max_steps == 7


@given(st.integers(0, 200))
def test_numeral_roundtrip(n):
    assert read_numeral(church_numeral(n)) == n


def test_numeral_errors():
    with pytest.raises(NotANumeral):
        read_numeral(P(r"\f x. x f"))
    assert read_numeral(P(r"\f. f")) == 1


def test_booleans():
    assert read_bool(church_bool(True)) and not read_bool(FALSE)
    assert read_bool(TRUE)
    with pytest.raises(ValueError):
        read_bool(P(r"\x. x"))


def test_arithmetic():
    mult = P(r"\x y f z. x (y f) z")
    assert read_numeral(beta_normalize(apps(mult, church_numeral(3), church_numeral(4)))) == 12


@given(terms())
def test_strategies_agree_on_typable_terms(t):
    assume(not free_vars(t) and stlc_infer({}, t) is not None)
    a = beta_normalize(t, 10_000)
    b = beta_normalize(t, 10_000, "rightmost-innermost")
    assert alpha_eq(a, b)


@given(terms())
def test_normal_forms_are_stable(t):
    assume(not free_vars(t) and stlc_infer({}, t) is not None)
    nf = betaeta_normal_form(t)
    assert alpha_eq(betaeta_normal_form(nf), nf)
