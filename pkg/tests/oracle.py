"""Brute-force typing oracle for small Curry judgments with atomic polymorphism.

Independent of the unification machinery: it searches Church-style
decorations directly.  Instantiation witnesses range over the free type
variables in scope plus two spare names, and the types reachable from a
synthesized type by repeatedly instantiating its outer quantifiers with
variables and generalizing variables not free in the context are
recognized by first-order matching (variables map to variables only).

Lambdas are handled in checking position, and as the head of a redex by
trying the types the argument can take.  ``Unsupported`` is raised for
shapes outside that fragment; curated instances avoid them.
"""
from __future__ import annotations

import itertools

from fatcheck.syntax import (
    Abs, App, Arrow, Club, Forall, Star, TVar, Var, foralls, free_vars,
    ftv, split_prefix, type_key,
)

SPARE = ("P1", "P2")


class Unsupported(Exception):
    pass


def _match(B, C, theta, matchable, benv, cenv):
    """Extend theta so that B with theta applied equals C; inner binders are
    paired through benv/cenv (de Bruijn style)."""
    if isinstance(B, Club):
        return theta if isinstance(C, Club) else None
    if isinstance(B, TVar):
        if not isinstance(C, TVar):
            return None
        if B.name in benv:
            return theta if cenv.get(C.name) == benv[B.name] else None
        if C.name in cenv:
            return None
        if B.name in matchable:
            prev = theta.get(B.name)
            if prev is None:
                return {**theta, B.name: C.name}
            return theta if prev == C.name else None
        return theta if B.name == C.name else None
    if isinstance(B, Arrow):
        if not isinstance(C, Arrow):
            return None
        th = _match(B.dom, C.dom, theta, matchable, benv, cenv)
        if th is None:
            return None
        return _match(B.cod, C.cod, th, matchable, benv, cenv)
    if isinstance(B, Forall):
        if not isinstance(C, Forall):
            return None
        depth = len(benv)
        return _match(B.body, C.body, theta, matchable,
                      {**benv, B.var: depth}, {**cenv, C.var: depth})
    raise TypeError(B)


def reach(b, T, gamma_fv) -> bool:
    """Can a term of type b also be given type T (same context)?"""
    ys, C = split_prefix(T)
    if set(ys) & set(gamma_fv):
        # rename offending binders out of the way
        avoid = set(gamma_fv) | _names(T) | _names(b)
        ren = {}
        for y in ys:
            if y in gamma_fv:
                k = 0
                while f"R{k}" in avoid:
                    k += 1
                ren[y] = f"R{k}"
                avoid.add(ren[y])
        C = _rename_free(C, ren)
    xs, B = split_prefix(b)
    matchable = set(xs) | (_free(B, set(xs)) - set(gamma_fv))
    return _match(B, C, {}, matchable, {}, {}) is not None


def _names(A) -> set:
    if isinstance(A, TVar):
        return {A.name}
    if isinstance(A, Arrow):
        return _names(A.dom) | _names(A.cod)
    if isinstance(A, Forall):
        return {A.var} | _names(A.body)
    return set()


def _free(A, bound=frozenset()) -> set:
    if isinstance(A, TVar):
        return set() if A.name in bound else {A.name}
    if isinstance(A, Arrow):
        return _free(A.dom, bound) | _free(A.cod, bound)
    if isinstance(A, Forall):
        return _free(A.body, set(bound) | {A.var})
    return set()


def _rename_free(A, ren):
    # ren targets are fresh, so no capture can happen
    if isinstance(A, TVar):
        return TVar(ren.get(A.name, A.name))
    if isinstance(A, Arrow):
        return Arrow(_rename_free(A.dom, ren), _rename_free(A.cod, ren))
    if isinstance(A, Forall):
        inner = {k: v for k, v in ren.items() if k != A.var}
        return Forall(A.var, _rename_free(A.body, inner))
    return A


class Oracle:
    def __init__(self, ctx: dict, target):
        self.ctx0 = dict(ctx)
        self.extra = tuple(sorted(ftv(target)))
        self.counter = itertools.count()

    # contexts are tuples of (name, type) pairs so they can be cached
    def _fv(self, ctx) -> set:
        out = set()
        for _, T in ctx:
            out |= ftv(T)
        return out

    def pool(self, ctx):
        return tuple(sorted(self._fv(ctx) | set(self.extra))) + SPARE

    def renamings(self, b, ctx):
        """All bodies obtainable from b by mapping its matchable variables
        into the pool."""
        xs, B = split_prefix(b)
        gfv = self._fv(ctx)
        m = sorted(set(xs) | (_free(B, set(xs)) - gfv))
        pool = self.pool(ctx)
        for choice in itertools.product(pool, repeat=len(m)):
            yield _rename_free(B, dict(zip(m, choice)))

    def closures(self, b, ctx):
        """Finite stand-in for every type a term of type b can be given."""
        gfv = self._fv(ctx)
        seen = {}
        for B in self.renamings(b, ctx):
            gen = sorted(_free(B) - gfv)
            for r in range(len(gen) + 1):
                for sub in itertools.combinations(gen, r):
                    T = foralls(sub, B)
                    seen.setdefault(type_key(T), T)
        return list(seen.values())

    def bases(self, ctx, t):
        key = (ctx, t)
        cache = self.__dict__.setdefault("_bases", {})
        if key in cache:
            return cache[key]
        out = []
        d = dict(ctx)
        if isinstance(t, Var):
            if t.name in d:
                out = [d[t.name]]
        elif isinstance(t, Star):
            out = [Club()]
        elif isinstance(t, App):
            if isinstance(t.fun, Abs):
                lam = t.fun
                if isinstance(t.arg, Abs):
                    raise Unsupported("redex with a lambda argument")
                cands = {}
                for bu in self.bases(ctx, t.arg):
                    for A in self.closures(bu, ctx):
                        cands.setdefault(type_key(A), A)
                if isinstance(lam.body, Abs):
                    raise Unsupported("lambda body in synthesis position")
                for A in cands.values():
                    inner = tuple((k, v) for k, v in ctx if k != lam.var) + ((lam.var, A),)
                    out.extend(self.bases(inner, lam.body))
            else:
                for bf in self.bases(ctx, t.fun):
                    for B in self.renamings(bf, ctx):
                        if isinstance(B, Arrow) and self.check(ctx, t.arg, B.dom):
                            out.append(B.cod)
        else:
            raise Unsupported("lambda in synthesis position")
        uniq = {}
        for T in out:
            uniq.setdefault(type_key(T), T)
        cache[key] = list(uniq.values())
        return cache[key]

    def check(self, ctx, t, T) -> bool:
        key = (ctx, t, type_key(T))
        cache = self.__dict__.setdefault("_check", {})
        if key in cache:
            return cache[key]
        gfv = self._fv(ctx)
        if isinstance(t, Abs):
            ys, C = split_prefix(T)
            ren = {}
            for y in ys:
                ren[y] = f"Q{next(self.counter)}"
            C = _rename_free(C, ren)
            if not isinstance(C, Arrow):
                res = False
            else:
                inner = tuple((k, v) for k, v in ctx if k != t.var) + ((t.var, C.dom),)
                res = self.check(inner, t.body, C.cod)
        else:
            res = any(reach(b, T, gfv) for b in self.bases(ctx, t))
        cache[key] = res
        return res


def oracle_check(ctx: dict, t, T) -> bool:
    """Decide ctx |- t : T within the oracle's fragment."""
    if not free_vars(t) <= set(ctx):
        return False
    o = Oracle(ctx, T)
    return o.check(tuple(sorted(ctx.items(), key=lambda kv: kv[0])), t, T)
