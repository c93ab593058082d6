"""First-order unification with an eager occurs check.

Used in two places: deciding simple typability of erased judgments, and
detecting variable cycles in the first-order skeleton of a unification
problem over type schemes.
"""
from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .syntax import (
    Abs, Base, SArrow, SimpleType, Star, Term, Var, erase_term,
)


@dataclass(frozen=True)
class FoVar:
    name: str


@dataclass(frozen=True)
class FoConst:
    name: str


@dataclass(frozen=True)
class FoArrow:
    left: "FoTerm"
    right: "FoTerm"


FoTerm = Union[FoVar, FoConst, FoArrow]


@dataclass(frozen=True)
class FoProblem:
    equations: Tuple[Tuple[FoTerm, FoTerm], ...] = ()

    @staticmethod
    def of(pairs) -> "FoProblem":
        return FoProblem(tuple((l, r) for l, r in pairs))


@dataclass(frozen=True)
class FoSubstitution:
    mapping: Dict[str, FoTerm] = field(default_factory=dict)

    def apply(self, t: FoTerm) -> FoTerm:
        if isinstance(t, FoVar):
            return self.mapping.get(t.name, t)
        if isinstance(t, FoArrow):
            return FoArrow(self.apply(t.left), self.apply(t.right))
        return t


@dataclass(frozen=True)
class CycleFailure:
    var: str
    term: FoTerm


@dataclass(frozen=True)
class ClashFailure:
    left: FoTerm
    right: FoTerm


def fo_vars(t: FoTerm) -> set:
    if isinstance(t, FoVar):
        return {t.name}
    if isinstance(t, FoArrow):
        return fo_vars(t.left) | fo_vars(t.right)
    return set()


class _Cycle(Exception):
    pass


class _Clash(Exception):
    pass


class _UnionFind:
    def __init__(self):
        self.parent: Dict[str, str] = {}
        self.binding: Dict[str, FoTerm] = {}

    def root(self, v: str) -> str:
        path = []
        while self.parent.get(v, v) != v:
            path.append(v)
            v = self.parent[v]
        for p in path:
            self.parent[p] = v
        return v

    def resolve(self, t: FoTerm) -> FoTerm:
        # a class representative: either an unbound root variable or its binding
        if isinstance(t, FoVar):
            r = self.root(t.name)
            return self.binding.get(r, FoVar(r))
        return t

    def occurs(self, v: str, t: FoTerm) -> bool:
        stack = [t]
        seen = set()
        while stack:
            cur = self.resolve(stack.pop())
            if isinstance(cur, FoVar):
                if cur.name == v:
                    return True
            elif isinstance(cur, FoArrow):
                key = id(cur)
                if key in seen:
                    continue
                seen.add(key)
                stack.append(cur.left)
                stack.append(cur.right)
        return False

    def unify(self, s: FoTerm, t: FoTerm):
        work = [(s, t)]
        while work:
            a, b = work.pop()
            a, b = self.resolve(a), self.resolve(b)
            if a == b:
                continue
            if isinstance(a, FoVar) and isinstance(b, FoVar):
                self.parent[a.name] = b.name
            elif isinstance(a, FoVar) or isinstance(b, FoVar):
                v, other = (a, b) if isinstance(a, FoVar) else (b, a)
                if self.occurs(v.name, other):
                    raise _Cycle(v.name, other)
                self.binding[v.name] = other
            elif isinstance(a, FoArrow) and isinstance(b, FoArrow):
                work.append((a.right, b.right))
                work.append((a.left, b.left))
            else:
                raise _Clash(a, b)

    def full(self, t: FoTerm) -> FoTerm:
        t = self.resolve(t)
        if isinstance(t, FoArrow):
            return FoArrow(self.full(t.left), self.full(t.right))
        return t


def fo_unify(p: FoProblem):
    """Most general unifier, or CycleFailure / ClashFailure."""
    uf = _UnionFind()
    names = set()
    for l, r in p.equations:
        names |= fo_vars(l) | fo_vars(r)
    try:
        for l, r in p.equations:
            uf.unify(l, r)
    except _Cycle as e:
        v, term = e.args
        return CycleFailure(v, term)
    except _Clash as e:
        return ClashFailure(*e.args)
    mapping = {}
    for n in sorted(names):
        img = uf.full(FoVar(n))
        if img != FoVar(n):
            mapping[n] = img
    sub = FoSubstitution(mapping)
    for l, r in p.equations:
        assert sub.apply(l) == sub.apply(r), "unifier check failed"
    return sub


# ---------------------------------------------------------------- simple types

def simple_to_fo(s: SimpleType) -> FoTerm:
    if isinstance(s, Base):
        return FoConst("o")
    return FoArrow(simple_to_fo(s.dom), simple_to_fo(s.cod))


def fo_to_simple(t: FoTerm) -> SimpleType:
    """Ground a first-order type; leftover variables become the base type."""
    if isinstance(t, FoArrow):
        return SArrow(fo_to_simple(t.left), fo_to_simple(t.right))
    return Base()


def stlc_constraints(ctx: dict, t: Term):
    """Equations for a Curry term, one fresh variable per subterm occurrence.

    Returns (equations, root variable, binder variables) or None when t has
    a free variable outside the context.
    """
    t = erase_term(t)
    counter = itertools.count()
    eqs: List[Tuple[FoTerm, FoTerm]] = []
    binder_vars: Dict[str, FoVar] = {}

    def fresh():
        return FoVar(f"_t{next(counter)}")

    def go(t, env):
        v = fresh()
        if isinstance(t, Var):
            if t.name in env:
                eqs.append((v, env[t.name]))
            elif t.name in ctx:
                eqs.append((v, simple_to_fo(ctx[t.name])))
            else:
                raise KeyError(t.name)
        elif isinstance(t, Star):
            eqs.append((v, FoConst("o")))
        elif isinstance(t, Abs):
            xv = fresh()
            binder_vars[t.var] = xv
            body = go(t.body, {**env, t.var: xv})
            eqs.append((v, FoArrow(xv, body)))
        else:
            f = go(t.fun, env)
            a = go(t.arg, env)
            eqs.append((f, FoArrow(a, v)))
        return v

    try:
        root = go(t, {})
    except KeyError:
        return None
    return eqs, root, binder_vars


def stlc_typecheck(ctx: dict, t: Term, A: SimpleType) -> bool:
    """Decide ctx |- t : A in the simply typed lambda calculus."""
    gen = stlc_constraints(ctx, t)
    if gen is None:
        return False
    eqs, root, _ = gen
    eqs = eqs + [(root, simple_to_fo(A))]
    return isinstance(fo_unify(FoProblem.of(eqs)), FoSubstitution)


def stlc_infer(ctx: dict, t: Term) -> Optional[FoTerm]:
    """Principal simple type with variables renamed a, b, c, ...; None on failure."""
    gen = stlc_constraints(ctx, t)
    if gen is None:
        return None
    eqs, root, _ = gen
    sub = fo_unify(FoProblem.of(eqs))
    if not isinstance(sub, FoSubstitution):
        return None
    return canonical_vars(sub.apply(root))


def canonical_vars(t: FoTerm) -> FoTerm:
    order: List[str] = []

    def collect(t):
        if isinstance(t, FoVar):
            if t.name not in order:
                order.append(t.name)
        elif isinstance(t, FoArrow):
            collect(t.left)
            collect(t.right)

    collect(t)
    letters = list(string.ascii_lowercase)
    names = {n: (letters[i] if i < 26 else f"a{i}") for i, n in enumerate(order)}

    def rename(t):
        if isinstance(t, FoVar):
            return FoVar(names[t.name])
        if isinstance(t, FoArrow):
            return FoArrow(rename(t.left), rename(t.right))
        return t

    return rename(t)


def show_fo(t: FoTerm) -> str:
    if isinstance(t, (FoVar, FoConst)):
        return t.name
    left = show_fo(t.left)
    if isinstance(t.left, FoArrow):
        left = f"({left})"
    return f"{left} -> {show_fo(t.right)}"
