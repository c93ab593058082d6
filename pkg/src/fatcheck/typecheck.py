"""Type checking for Curry-style terms with atomic polymorphism.

``check`` first tries the simply typed erasure (a cheap necessary
condition), then reduces the judgment to a unification problem over type
schemes.  A unifier is turned into a derivation in the syntax-directed
rule system (Var / Abs / App, with generalization at every node and
instantiation by variables only), which ``check_derivation`` re-validates
independently of the solver before a judgment is accepted.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from . import fat_unify as fu
from .fat_unify import (
    ArityLink, ArrowE, LengthPin, MetaApp, Pi, ProjApp, QType, SearchConfig,
    SeqVar, TVarE, UnifProblem, Unifier, extend_equations,
)
from .fou import stlc_typecheck
from .syntax import (
    Abs, App, Arrow, Club, Forall, Star, Term, TVar, Type, TyAbs, TyApp, Var,
    alpha_eq, all_type_names, barendregt_rename, erase_context, erase_types,
    foralls, free_vars, fresh_name, ftv, ftv_context, is_curry, lams, show_term,
    show_type, split_prefix, subst_types,
)


# ---------------------------------------------------------------- results

@dataclass(frozen=True)
class SyntheticDerivation:
    rule: str                       # "Var" | "Abs" | "App" | "Const"
    ctx: Dict[str, Type]
    term: Term
    type: Type
    gen: Tuple[str, ...] = ()       # generalized variables
    inst: Tuple[Type, ...] = ()     # witnesses of the instantiation (Var, App)
    premises: Tuple["SyntheticDerivation", ...] = ()


@dataclass(frozen=True)
class Accepted:
    derivation: SyntheticDerivation


@dataclass(frozen=True)
class Rejected:
    reason: str                     # StlcFail | Cycle | ArrowClash | Exhausted
    detail: str = ""


CheckResult = Union[Accepted, Rejected]


# ---------------------------------------------------------------- generation

@dataclass(frozen=True)
class Node:
    """One subterm occurrence and the unification variables attached to it."""
    id: int
    kind: str                       # var | abs | app | const
    term: Term
    outer: Tuple[str, ...]          # b-variables of strict ancestors, innermost first
    var: Optional[str] = None       # x for var / abs nodes
    children: Tuple[int, ...] = ()

    @property
    def b(self) -> str:
        return f"b{self.id}"

    @property
    def G(self) -> str:
        return f"G{self.id}"

    @property
    def alpha(self) -> str:
        return f"al{self.id}"

    @property
    def a(self) -> str:
        return f"a{self.id}"

    @property
    def F(self) -> str:
        return f"F{self.id}"


@dataclass
class VarAllocation:
    nodes: List[Node] = field(default_factory=list)
    binder_node: Dict[str, int] = field(default_factory=dict)   # x -> id of its lambda

    def a_of(self, x: str) -> str:
        return f"a_{x}"

    def F_of(self, x: str) -> str:
        return f"F_{x}"


def _sv(names) -> Tuple[SeqVar, ...]:
    return tuple(SeqVar(n) for n in names)


def gen_equations(t: Term):
    """Equations for a Curry term under the Barendregt convention.

    Returns (equations, constraints, allocation).  Each subterm's equations
    are extended by the b-variable of every enclosing node, except that the
    scheme metavariable F_x of a variable is only extended from its binder
    outwards (it is constant inside the scope of x).
    """
    alloc = VarAllocation()
    counter = itertools.count()
    cons: List = []

    def go(t, outer):
        i = next(counter)
        if isinstance(t, Var):
            node = Node(i, "var", t, outer, var=t.name)
            alloc.nodes.append(node)
            b = SeqVar(node.b)
            eqs = [(MetaApp(alloc.F_of(t.name), (ProjApp(node.alpha, (b,)),)),
                    MetaApp(node.G, (b,)))]
            cons.append(ArityLink(node.alpha, alloc.a_of(t.name)))
            return node, eqs
        if isinstance(t, Star):
            node = Node(i, "const", t, outer)
            alloc.nodes.append(node)
            return node, [(MetaApp(node.G, (SeqVar(node.b),)), TVarE(fu.CLUB_NAME))]
        if isinstance(t, Abs):
            b = f"b{i}"
            alloc.binder_node[t.var] = i
            body, sub = go(t.body, (b,) + outer)
            frozen = {alloc.F_of(y) for y in free_vars(t)}
            sub = extend_equations(sub, b, frozen)
            node = Node(i, "abs", t, outer, var=t.var, children=(body.id,))
            alloc.nodes.append(node)
            a_x = alloc.a_of(t.var)
            eq = (MetaApp(node.G, (SeqVar(b),)),
                  ArrowE(QType(SeqVar(a_x), MetaApp(alloc.F_of(t.var), (SeqVar(a_x), SeqVar(b)))),
                         QType(SeqVar(body.b), MetaApp(body.G, (SeqVar(body.b), SeqVar(b))))))
            return node, sub + [eq]
        if isinstance(t, App):
            b = f"b{i}"
            fun, s1 = go(t.fun, (b,) + outer)
            arg, s2 = go(t.arg, (b,) + outer)
            frozen = {alloc.F_of(y) for y in free_vars(t)}
            sub = extend_equations(s1 + s2, b, frozen)
            node = Node(i, "app", t, outer, children=(fun.id, arg.id))
            alloc.nodes.append(node)
            B = SeqVar(b)
            eqs = [
                (MetaApp(fun.G, (SeqVar(fun.b), B)),
                 ArrowE(QType(SeqVar(arg.b), MetaApp(arg.G, (SeqVar(arg.b), B))),
                        QType(SeqVar(node.a), MetaApp(node.F, (SeqVar(node.a), B))))),
                (MetaApp(node.F, (ProjApp(node.alpha, (B,)), B)), MetaApp(node.G, (B,))),
            ]
            cons.append(LengthPin(fun.b, 0))
            cons.append(ArityLink(node.alpha, node.a))
            return node, sub + eqs
        raise ValueError(f"not a Curry term: {show_term(t)}")

    root, eqs = go(t, ())
    alloc.nodes.sort(key=lambda n: n.id)
    return eqs, cons, alloc


class _Embedder:
    """Lowers concrete types into star expressions; bound variables become
    projections of fresh pinned sequence variables."""

    def __init__(self):
        self.cons: List = []
        self.seqs: List[str] = []

    def fresh_seq(self, length: int) -> str:
        name = f"s{len(self.seqs)}"
        self.seqs.append(name)
        self.cons.append(LengthPin(name, length))
        return name

    def star(self, A: Type, env: dict):
        if isinstance(A, TVar):
            return env.get(A.name, TVarE(A.name))
        if isinstance(A, Club):
            return TVarE(fu.CLUB_NAME)
        if isinstance(A, Arrow):
            return ArrowE(self.quant(A.dom, env), self.quant(A.cod, env))
        raise ValueError("quantifier in head position")

    def quant(self, A: Type, env: dict) -> QType:
        prefix, body = split_prefix(A)
        s = self.fresh_seq(len(prefix))
        inner = dict(env)
        for i, Y in enumerate(prefix, start=1):
            inner[Y] = Pi(i, SeqVar(s))
        return QType(SeqVar(s), self.star(body, inner))


def _prepare(ctx: dict, t: Term, A: Type):
    """Rename every type binder apart from all names, and term binders apart."""
    used = set()
    for T in list(ctx.values()) + [A]:
        used |= all_type_names(T)
    new_ctx = {}
    for x, T in ctx.items():
        new_ctx[x] = barendregt_rename(T, used)
        used |= all_type_names(new_ctx[x])
    A2 = barendregt_rename(A, used)
    t2 = barendregt_rename(t, set(ctx))
    return new_ctx, t2, A2


def generate(ctx: dict, t: Term, A: Type):
    """Problem plus allocation for ctx |- t : A (inputs already renamed apart)."""
    eqs, cons, alloc = gen_equations(t)
    root = alloc.nodes[0]
    emb = _Embedder()
    for x in sorted(free_vars(t)):
        if x not in ctx:
            raise KeyError(x)
        prefix, body = split_prefix(ctx[x])
        a_x = alloc.a_of(x)
        env = {Y: Pi(i, SeqVar(a_x)) for i, Y in enumerate(prefix, start=1)}
        eqs.append((MetaApp(alloc.F_of(x), (SeqVar(a_x),)), emb.star(body, env)))
        cons.append(LengthPin(a_x, len(prefix)))
    prefix, body = split_prefix(A)
    env = {Y: Pi(i, SeqVar(root.b)) for i, Y in enumerate(prefix, start=1)}
    eqs.append((MetaApp(root.G, (SeqVar(root.b),)), emb.star(body, env)))
    cons.append(LengthPin(root.b, len(prefix)))
    p = fu.declare(eqs, cons + emb.cons)
    return p, alloc


def gen_problem(ctx: dict, t: Term, A: Type) -> UnifProblem:
    ctx, t, A = _prepare(ctx, t, A)
    return generate(ctx, t, A)[0]


# ---------------------------------------------------------------- certificates

def instantiate(A: Type, witnesses) -> Optional[Type]:
    """A = forall X1..Xn. A' instantiated at the n witnesses, or None."""
    names = []
    body = A
    for _ in witnesses:
        if not isinstance(body, Forall):
            return None
        names.append(body.var)
        body = body.body
    return subst_types(body, dict(zip(names, witnesses)))


def derivation_errors(d: SyntheticDerivation) -> List[str]:
    """Every violated rule condition in the derivation tree (empty when valid)."""
    errs: List[str] = []

    def gen_ok(node, body_type):
        if len(set(node.gen)) != len(node.gen):
            errs.append(f"repeated generalized variable at {show_term(node.term)}")
        bad = set(node.gen) & ftv_context(node.ctx)
        if bad:
            errs.append(f"generalizes {sorted(bad)} free in the context at {show_term(node.term)}")
        if not alpha_eq(node.type, foralls(node.gen, body_type)):
            errs.append(f"type of {show_term(node.term)} is not the generalization of its body")

    def same_ctx(a, b):
        return set(a) == set(b) and all(alpha_eq(a[k], b[k]) for k in a)

    def go(n: SyntheticDerivation):
        for w in n.inst:
            if not isinstance(w, TVar):
                errs.append(f"non-variable witness {show_type(w)} at {show_term(n.term)}")
                return
        if n.rule == "Var":
            if not isinstance(n.term, Var) or n.term.name not in n.ctx:
                errs.append(f"Var rule on {show_term(n.term)}")
                return
            B = instantiate(n.ctx[n.term.name], n.inst)
            if B is None:
                errs.append(f"too many witnesses for {n.term.name}")
                return
            gen_ok(n, B)
        elif n.rule == "Const":
            if not isinstance(n.term, Star):
                errs.append(f"Const rule on {show_term(n.term)}")
                return
            gen_ok(n, Club())
        elif n.rule == "Abs":
            if not isinstance(n.term, Abs) or len(n.premises) != 1:
                errs.append(f"Abs rule on {show_term(n.term)}")
                return
            p = n.premises[0]
            x = n.term.var
            if x not in p.ctx or not same_ctx({k: v for k, v in p.ctx.items() if k != x},
                                             {k: v for k, v in n.ctx.items() if k != x}):
                errs.append(f"premise context mismatch at {show_term(n.term)}")
                return
            if not alpha_eq(p.term, n.term.body):
                errs.append(f"premise term mismatch at {show_term(n.term)}")
                return
            gen_ok(n, Arrow(p.ctx[x], p.type))
            go(p)
        elif n.rule == "App":
            if not isinstance(n.term, App) or len(n.premises) != 2:
                errs.append(f"App rule on {show_term(n.term)}")
                return
            pf, pa = n.premises
            if not (same_ctx(pf.ctx, n.ctx) and same_ctx(pa.ctx, n.ctx)):
                errs.append(f"premise context mismatch at {show_term(n.term)}")
                return
            if not (alpha_eq(pf.term, n.term.fun) and alpha_eq(pa.term, n.term.arg)):
                errs.append(f"premise term mismatch at {show_term(n.term)}")
                return
            if not isinstance(pf.type, Arrow):
                errs.append(f"function type is not an arrow at {show_term(n.term)}")
                return
            if not alpha_eq(pf.type.dom, pa.type):
                errs.append(f"argument type mismatch at {show_term(n.term)}")
                return
            C = instantiate(pf.type.cod, n.inst)
            if C is None:
                errs.append(f"too many witnesses at {show_term(n.term)}")
                return
            gen_ok(n, C)
            go(pf)
            go(pa)
        else:
            errs.append(f"unknown rule {n.rule}")

    go(d)
    return errs


def check_derivation(d: SyntheticDerivation) -> bool:
    return not derivation_errors(d)


def _reconstruct(ctx: dict, alloc: VarAllocation, S) -> SyntheticDerivation:
    by_id = {n.id: n for n in alloc.nodes}

    def seqs(names):
        return _sv(names)

    def star(e) -> Type:
        return fu.apply_star(S, e)

    def names(b) -> Tuple[str, ...]:
        return S.seq_names[b]

    def build(node: Node, env: dict) -> SyntheticDerivation:
        g_names = (node.b,) + node.outer
        g_args = seqs(g_names)
        body = star(MetaApp(node.G, g_args))
        gen = names(node.b)
        T = foralls(gen, body)
        if node.kind == "var":
            inst = fu._seq_value(S, ProjApp(node.alpha, g_args))
            return SyntheticDerivation("Var", env, node.term, T, gen,
                                       tuple(fu._tv(n) for n in inst))
        if node.kind == "const":
            return SyntheticDerivation("Const", env, node.term, T, gen)
        if node.kind == "abs":
            x = node.var
            a_x = f"a_{x}"
            xt = foralls(names(a_x), star(MetaApp(f"F_{x}", seqs((a_x,) + g_names))))
            prem = build(by_id[node.children[0]], {**env, x: xt})
            return SyntheticDerivation("Abs", env, node.term, T, gen, (), (prem,))
        pf = build(by_id[node.children[0]], env)
        pa = build(by_id[node.children[1]], env)
        inst = fu._seq_value(S, ProjApp(node.alpha, g_args))
        return SyntheticDerivation("App", env, node.term, T, gen,
                                   tuple(fu._tv(n) for n in inst), (pf, pa))

    return build(alloc.nodes[0], dict(ctx))


# ---------------------------------------------------------------- decision

def _stlc_ok(ctx: dict, t: Term, A: Type) -> bool:
    if not free_vars(t) <= set(ctx):
        return False
    return stlc_typecheck(erase_context({x: ctx[x] for x in free_vars(t)}), t, erase_types(A))


def check(ctx: dict, t: Term, A: Type, config: SearchConfig = SearchConfig()) -> CheckResult:
    """Decide ctx |- t : A; accepted judgments carry a validated derivation."""
    if not is_curry(t):
        raise ValueError("check expects a Curry-style term")
    ctx, t, A = _prepare(ctx, t, A)
    if not _stlc_ok(ctx, t, A):
        if free_vars(t) <= set(ctx):
            p, _ = generate(ctx, t, A)
            bad = fu.phase1_cycle_check(fu.normalize_problem(p))
            if bad is not None and bad.reason == "Cycle":
                return Rejected("Cycle", bad.detail)
            return Rejected("StlcFail", "the erased judgment has no simple typing")
        return Rejected("StlcFail", "free variable outside the context")
    p, alloc = generate(ctx, t, A)
    avoid = set(ftv_context(ctx)) | ftv(A)
    out = fu.fat_unify(p, config, avoid=avoid)
    if not isinstance(out, Unifier):
        return Rejected(out.reason, out.detail)
    d = _reconstruct(ctx, alloc, out.substitution)
    errs = derivation_errors(d)
    assert not errs, f"reconstructed derivation invalid: {errs}"
    assert alpha_eq(d.type, A), "reconstructed derivation proves another type"
    return Accepted(d)


def typable(ctx: dict, t: Term, config: SearchConfig = SearchConfig()) -> CheckResult:
    """Is there some type for t?  Reduced to checking (\\x y. y) t : forall X. X -> X."""
    avoid = set(ctx) | free_vars(t)
    x = fresh_name("x", avoid) if "x" in avoid else "x"
    y = fresh_name("y", avoid | {x}) if "y" in avoid else "y"
    names = set(ftv_context(ctx))
    X = fresh_name("X", names) if "X" in names else "X"
    wrapped = App(lams([x, y], Var(y)), t)
    return check(ctx, wrapped, Forall(X, Arrow(TVar(X), TVar(X))), config)


# ---------------------------------------------------------------- serialization

def derivation_to_json(d: SyntheticDerivation) -> dict:
    out = {
        "rule": d.rule,
        "term": show_term(d.term),
        "type": show_type(d.type),
    }
    if d.gen:
        out["gen"] = list(d.gen)
    if d.rule in ("Var", "App"):
        out["inst"] = [show_type(w) for w in d.inst]
    if d.rule == "Abs":
        x = d.term.var
        out["binder"] = {x: show_type(d.premises[0].ctx[x])}
    if d.premises:
        out["premises"] = [derivation_to_json(p) for p in d.premises]
    return out


def derivation_size(d: SyntheticDerivation) -> int:
    return 1 + sum(derivation_size(p) for p in d.premises)


def elaborate(d: SyntheticDerivation) -> Term:
    """Church-style term read off a derivation: type abstractions for the
    generalized variables and type applications for the witnesses."""
    if d.rule == "Var":
        core = Var(d.term.name)
        for w in d.inst:
            core = TyApp(core, w)
    elif d.rule == "Const":
        core = d.term
    elif d.rule == "Abs":
        core = Abs(d.term.var, elaborate(d.premises[0]))
    else:
        core = App(elaborate(d.premises[0]), elaborate(d.premises[1]))
        for w in d.inst:
            core = TyApp(core, w)
    for X in reversed(d.gen):
        core = TyAbs(X, core)
    return core
