import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from fatcheck.fou import stlc_infer, stlc_typecheck
from fatcheck.reduction import beta_normalize
from fatcheck.syntax import (
    CLUB, STAR, Arrow, TVar, alpha_eq, erase_context, erase_term, erase_types,
    free_vars, parse_context, parse_term, parse_type,
)
from fatcheck.typecheck import (
    Accepted, Rejected, SyntheticDerivation, check, check_derivation, derivation_errors,
    derivation_to_json, elaborate, gen_problem, typable,
)

from corpus import ID, Gen, accepted_judgments, closed_terms
from oracle import Unsupported, oracle_check

DATA = Path(__file__).parent / "data" / "oracle_verdicts.json"


def judge(ctx, t, A):
    return check(parse_context(ctx), parse_term(t), parse_type(A))


def test_worked_positive_instance():
    r = judge({"x": ID, "y": "forall Y. Y"}, "x y", "forall Z. Z")
    assert isinstance(r, Accepted)
    assert check_derivation(r.derivation)
    assert alpha_eq(r.derivation.type, parse_type("forall Z. Z"))


def test_worked_negative_instance():
    r = judge({"x": ID, "y": "Y"}, "x y", "forall Z. Z")
    assert isinstance(r, Rejected) and r.reason != "Cycle"


def test_self_application_is_a_cycle():
    r = judge({}, r"\x. x x", ID)
    assert r.reason in ("Cycle", "StlcFail")
    r = typable({}, parse_term(r"\x. x x"))
    assert isinstance(r, Rejected) and r.reason == "Cycle"


def test_simple_failure_is_reported():
    r = judge({}, r"\x y. x", "forall X. X -> X")
    assert r.reason == "StlcFail"
    r = judge({}, "z", "X")
    assert r.reason == "StlcFail"


def test_non_atomic_instance_rejected():
    # needs x instantiated at X -> X, which atomic instantiation forbids
    r = judge({}, r"\x y. x y", "(forall X. X -> Y) -> (X -> X) -> Y")
    assert isinstance(r, Rejected)


def test_club_mode():
    assert isinstance(check({}, STAR, CLUB), Accepted)
    assert isinstance(check({}, parse_term(r"\z. z"), parse_type("# -> #")), Accepted)
    assert isinstance(check({}, STAR, TVar("X")), Rejected)


def test_derivation_json_and_elaboration():
    r = judge({}, r"\f x. f (f x)", "forall X. (X -> X) -> X -> X")
    d = r.derivation
    js = derivation_to_json(d)
    assert js["rule"] == "Abs"
    church = elaborate(d)
    assert erase_term(church) == parse_term(r"\f x. f (f x)")


def test_tampered_derivation_is_rejected():
    d = judge({"x": ID, "y": "forall Y. Y"}, "x y", "forall Z. Z").derivation
    bad = SyntheticDerivation(d.rule, d.ctx, d.term, parse_type("forall Z. Z -> Z"),
                              d.gen, d.inst, d.premises)
    assert derivation_errors(bad)
    assert not check_derivation(bad)


def test_gen_problem_shape():
    p = gen_problem(parse_context({"x": ID}), parse_term("x"), parse_type(ID))
    assert p.equations and p.meta_vars


def test_frozen_oracle_verdicts():
    cases = json.loads(DATA.read_text())
    assert len(cases) == 50
    for c in cases:
        r = judge(c["ctx"], c["term"], c["type"])
        assert isinstance(r, Accepted) == c["oracle"], c
        if isinstance(r, Accepted):
            assert check_derivation(r.derivation)


@given(st.integers(0, 10_000))
def test_erasure_soundness(seed):
    for ctx, t, A, r in accepted_judgments(3, seed):
        assert stlc_typecheck(erase_context(ctx), t, erase_types(A))
        assert check_derivation(r.derivation)


@given(st.integers(0, 10_000))
def test_agrees_with_oracle_on_random_judgments(seed):
    g = Gen(seed)
    ctx = g.context(0, 2)
    t = g.term(3, [], list(ctx))
    if free_vars(t) - set(ctx):
        return
    A = g.top()
    try:
        expected = oracle_check(ctx, t, A)
    except Unsupported:
        return
    assert isinstance(check(ctx, t, A), Accepted) == expected


def _fat(fo):
    from fatcheck.fou import FoArrow
    if isinstance(fo, FoArrow):
        return Arrow(_fat(fo.left), _fat(fo.right))
    return TVar(fo.name.upper())


@given(st.integers(0, 10_000))
def test_simple_types_are_accepted_and_stable_under_beta(seed):
    t = closed_terms(1, seed)[0]
    S = stlc_infer({}, t)
    if S is None:
        assert isinstance(typable({}, t), Rejected)
        return
    A = _fat(S)
    assert isinstance(check({}, t, A), Accepted)
    nf = beta_normalize(t)
    assert isinstance(check({}, nf, A), Accepted)


def test_typable_reports_a_type():
    r = typable({}, parse_term(r"\x y. x"))
    assert isinstance(r, Accepted)
    inner = r.derivation.premises[1]
    assert isinstance(check({}, parse_term(r"\x y. x"), inner.type), Accepted)


def test_rejects_church_terms():
    with pytest.raises(ValueError):
        check({}, parse_term(r"/\X. \x. x", "church"), parse_type(ID))
