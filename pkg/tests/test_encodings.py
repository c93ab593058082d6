import pytest

from fatcheck.encodings import (
    case_impredicative, case_predicative, inj, io_plus_context, io_times_context,
    is_witness_atomic, pair, prod_type, proj, split_predicative, sum_type, type_applications,
)
from fatcheck.reduction import betaeta_equal
from fatcheck.syntax import (
    App, TVar, Var, alpha_eq, apps, erase_term, parse_term, parse_type, show_type,
)
from fatcheck.typecheck import Accepted, check

from corpus import TARGETS

A, B = TVar("A"), TVar("B")
f, g, h, a, b = (Var(n) for n in "fghab")


def test_encoded_types():
    assert alpha_eq(sum_type(A, B), parse_type("forall X. (A -> X) -> (B -> X) -> X"))
    assert alpha_eq(prod_type(A, B), parse_type("forall X. (A -> B -> X) -> X"))
    # the bound variable never captures a component
    assert alpha_eq(sum_type(TVar("X"), B), parse_type("forall Y. (X -> Y) -> (B -> Y) -> Y"))


def test_impredicative_laws():
    C = parse_type("X -> X")
    lhs = case_impredicative(inj(1, a, A, B), "x", App(f, Var("x")), "y", App(g, Var("y")), C)
    assert betaeta_equal(lhs, App(f, a))
    assert not is_witness_atomic(lhs)
    assert betaeta_equal(proj(2, pair(a, b, A, B), A, B), b)


def test_injection_index_checked():
    with pytest.raises(ValueError):
        inj(3, a, A, B)


def test_club_target_rejected():
    with pytest.raises(ValueError):
        io_plus_context(A, B, parse_type("#")).fill(Var("s"))


@pytest.mark.parametrize("target", TARGETS)
def test_predicative_sum(target):
    C = parse_type(target)
    for i, (side, fun) in enumerate([(a, f), (b, g)], start=1):
        lhs = case_predicative(inj(i, side, A, B), "x", App(f, Var("x")), "y", App(g, Var("y")), A, B, C)
        assert is_witness_atomic(lhs)
        assert betaeta_equal(lhs, App(fun, side))
    tm = case_predicative(Var("s"), "x", App(f, Var("x")), "y", App(g, Var("y")), A, B, C)
    assert all(isinstance(w, TVar) for w in type_applications(tm))


@pytest.mark.parametrize("target", TARGETS)
def test_predicative_product(target):
    C = parse_type(target)
    lhs = split_predicative(pair(a, b, A, B), "x", "y", apps(h, Var("x"), Var("y")), A, B, C)
    assert is_witness_atomic(lhs)
    assert betaeta_equal(lhs, apps(h, a, b))


@pytest.mark.parametrize("target", TARGETS[:8])
def test_contexts_are_typable(target):
    C = parse_type(target)
    plus = io_plus_context(A, B, C).fill(Var("s"))
    r = check({"s": sum_type(A, B)}, erase_term(plus),
              parse_type(f"(A -> {show_type(C)}) -> (B -> {show_type(C)}) -> {show_type(C)}"))
    assert isinstance(r, Accepted)
    times = io_times_context(A, B, C).fill(Var("p"))
    r = check({"p": prod_type(A, B)}, erase_term(times),
              parse_type(f"(A -> B -> {show_type(C)}) -> {show_type(C)}"))
    assert isinstance(r, Accepted)


def test_context_fill_avoids_capture():
    K = io_plus_context(A, B, parse_type("X -> Y"))
    lhs = App(App(K.fill(inj(1, Var("y"), A, B)), Var("k1")), Var("k2"))
    assert betaeta_equal(lhs, parse_term(r"\w. k1 y w"))
    assert "[ ]" in K.show()
