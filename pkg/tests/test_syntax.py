import pytest
from hypothesis import given, strategies as st

from fatcheck.syntax import (
    CLUB, STAR, Abs, App, Arrow, Forall, ParseError, TVar, TyAbs, TyApp, Var, all_type_names,
    alpha_eq, barendregt_rename, erase_term, erase_types, free_vars, fresh_name, ftv,
    parse_context, parse_term, parse_type, show_term, show_type, subst_term, substitute,
    term_size,
)

names = st.sampled_from(["X", "Y", "Z", "A"])


def types(depth=3):
    base = st.one_of(names.map(TVar), st.just(CLUB))
    return st.recursive(
        base,
        lambda inner: st.one_of(
            st.tuples(inner, inner).map(lambda p: Arrow(*p)),
            st.tuples(names, inner).map(lambda p: Forall(*p)),
        ),
        max_leaves=8,
    )


vnames = st.sampled_from(["x", "y", "z", "f"])


def terms(church=False):
    base = st.one_of(vnames.map(Var), st.just(STAR))
    def ext(inner):
        opts = [
            st.tuples(vnames, inner).map(lambda p: Abs(*p)),
            st.tuples(inner, inner).map(lambda p: App(*p)),
        ]
        if church:
            opts.append(st.tuples(names, inner).map(lambda p: TyAbs(*p)))
            opts.append(st.tuples(inner, types()).map(lambda p: TyApp(*p)))
        return st.one_of(*opts)
    return st.recursive(base, ext, max_leaves=8)


def test_parse_examples():
    A = parse_type("forall X. X -> X")
    assert A == Forall("X", Arrow(TVar("X"), TVar("X")))
    assert parse_type("∀X Y. X ⇒ Y") == Forall("X", Forall("Y", Arrow(TVar("X"), TVar("Y"))))
    assert parse_type("A -> B -> C") == Arrow(TVar("A"), Arrow(TVar("B"), TVar("C")))
    assert parse_type("#") == CLUB
    t = parse_term(r"\x y. x y y")
    assert t == Abs("x", Abs("y", App(App(Var("x"), Var("y")), Var("y"))))
    assert parse_term(r"/\X. \x. x [X]", "church") == TyAbs("X", Abs("x", TyApp(Var("x"), TVar("X"))))


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_type("X ->")
    with pytest.raises(ParseError):
        parse_term(r"/\X. x")          # type abstraction needs Church style
    with pytest.raises(ParseError):
        parse_term(r"\x. x [X]")


@given(types())
def test_type_roundtrip(A):
    assert alpha_eq(parse_type(show_type(A)), A)


@given(terms())
def test_curry_roundtrip(t):
    assert alpha_eq(parse_term(show_term(t)), t)


@given(terms(church=True))
def test_church_roundtrip(t):
    assert alpha_eq(parse_term(show_term(t), "church"), t)


@given(types(), types(), types())
def test_alpha_eq_is_an_equivalence(a, b, c):
    assert alpha_eq(a, a)
    assert alpha_eq(a, b) == alpha_eq(b, a)
    if alpha_eq(a, b) and alpha_eq(b, c):
        assert alpha_eq(a, c)


@given(types())
def test_bound_renaming_preserves_alpha_class(A):
    B = barendregt_rename(A, {"X", "Y"})
    assert alpha_eq(A, B)
    assert ftv(A) == ftv(B)


def test_alpha_eq_distinguishes_binding():
    assert alpha_eq(parse_type("forall X. X -> X"), parse_type("forall Y. Y -> Y"))
    assert not alpha_eq(parse_type("forall X. X -> Y"), parse_type("forall Y. Y -> Y"))
    assert alpha_eq(parse_term(r"\x. x"), parse_term(r"\y. y"))


def test_capture_avoiding_substitution():
    A = parse_type("forall Y. X -> Y")
    B = substitute(A, "X", TVar("Y"))
    assert alpha_eq(B, parse_type("forall Z. Y -> Z"))
    t = parse_term(r"\y. x y")
    u = subst_term(t, "x", Var("y"))
    assert alpha_eq(u, parse_term(r"\z. y z"))


def test_free_names():
    assert ftv(parse_type("forall X. X -> Y")) == {"Y"}
    assert free_vars(parse_term(r"\x. x y")) == {"y"}
    assert all_type_names(parse_type("forall X. X -> Y")) == {"X", "Y"}


def test_fresh_name_avoids():
    n = fresh_name("x", {"x", "x'"})
    assert n not in {"x", "x'"}


def test_erasure():
    t = parse_term(r"/\X. \x. x [X] [Y]", "church")
    assert erase_term(t) == parse_term(r"\x. x")
    assert str(erase_types(parse_type("forall X. X -> (forall Y. Y)")))


def test_context_parsing():
    ctx = parse_context('{"x": "forall X. X -> X"}')
    assert ctx["x"] == parse_type("forall X. X -> X")


def test_term_size():
    assert term_size(parse_term(r"\x. x x")) == 4
