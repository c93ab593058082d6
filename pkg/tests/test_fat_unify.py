import dataclasses

from hypothesis import given, strategies as st

from fatcheck import fat_unify as fu
from fatcheck.fat_unify import (
    ArityLink, ArrowE, LengthPin, LitSeq, MetaApp, NoSolution, Pi, ProjApp, QType, Scheme,
    SeqVar, TVarE, Unifier, declare, eliminate_arrows, fat_unify, normalize_problem,
    outcome_to_json, phase1_cycle_check, problem_from_json, problem_to_json, show_problem,
    verify_unifier,
)
from fatcheck.syntax import TVar
from fatcheck.typecheck import _prepare, generate

from corpus import accepted_judgments

z = SeqVar("z")
e = [SeqVar(f"e{i}") for i in range(6)]


def arr(a, b, i):
    return ArrowE(QType(e[i], a), QType(e[i + 1], b))


def worked_problem(g_arg=("Y",)):
    eqs = [
        (MetaApp("F", (LitSeq(("X",)),)), arr(TVarE("X"), TVarE("X"), 0)),
        (MetaApp("G", (LitSeq(g_arg),)), TVarE("Y")),
        (MetaApp("F", (ProjApp("al", (z,)),)),
         arr(MetaApp("G", (ProjApp("be", (z,)),)), MetaApp("H", (z,)), 2)),
        (MetaApp("H", (z,)), Pi(1, z)),
    ]
    cons = [LengthPin("z", 1)] + [LengthPin(f"e{i}", 0) for i in range(4)] + \
        [ArityLink("al", "z"), ArityLink("be", "z")]
    return declare(eqs, cons)


def test_worked_problem_unifies():
    p = worked_problem()
    out = fat_unify(p)
    assert isinstance(out, Unifier)
    assert verify_unifier(p, out.substitution)
    assert "F" in show_problem(p)


def test_constant_argument_makes_it_unsolvable():
    # G applied to no variables must produce the constant Y, which the
    # projection-built occurrence cannot match
    out = fat_unify(worked_problem(g_arg=()))
    assert isinstance(out, NoSolution)


def test_cycle_detected():
    a = SeqVar("a")
    p = declare([(MetaApp("F", (a,)), ArrowE(QType(SeqVar("c"), MetaApp("F", (a,))),
                                             QType(SeqVar("d"), TVarE("X"))))])
    bad = phase1_cycle_check(normalize_problem(p))
    assert bad is not None and bad.reason == "Cycle"
    assert fat_unify(p).reason == "Cycle"


def test_arrow_clash():
    p = declare([(TVarE("X"), ArrowE(QType(SeqVar("c"), TVarE("A")), QType(SeqVar("d"), TVarE("B"))))])
    assert fat_unify(p).reason == "ArrowClash"


def test_arrow_elimination_removes_arrows():
    p = worked_problem()
    simple = eliminate_arrows(normalize_problem(p))
    assert not isinstance(simple, NoSolution)
    assert not fu._has_arrow(simple)
    assert simple.expansions


def test_json_roundtrip():
    p = worked_problem()
    q = problem_from_json(problem_to_json(p))
    assert q.equations == p.equations
    assert set(q.constraints) == set(p.constraints)
    assert outcome_to_json(fat_unify(q))["result"] == "yes"


def _solved(seed):
    ctx, t, A, _ = accepted_judgments(1, seed)[0]
    ctx, t, A = _prepare(ctx, t, A)
    p, alloc = generate(ctx, t, A)
    out = fat_unify(p)
    return p, alloc, out


@given(st.integers(0, 10_000))
def test_emitted_unifiers_verify(seed):
    p, _, out = _solved(seed)
    assert isinstance(out, Unifier)
    assert verify_unifier(p, out.substitution)


@given(st.integers(0, 10_000))
def test_tampered_unifiers_fail(seed):
    p, alloc, out = _solved(seed)
    S = out.substitution
    root = alloc.nodes[0].G
    meta = dict(S.meta)
    meta[root] = Scheme(meta[root].arity, TVar("Qtampered"))
    assert not verify_unifier(p, dataclasses.replace(S, meta=meta))


def test_wrong_lengths_fail():
    p = worked_problem()
    S = fat_unify(p).substitution
    seq_len = dict(S.seq_len)
    seq_len["z"] = 2
    assert not verify_unifier(p, dataclasses.replace(S, seq_len=seq_len))
