"""Shared corpora and random generators for the test suite."""
from __future__ import annotations

import random

from fatcheck.syntax import (
    Abs, App, Arrow, Forall, TVar, Var, foralls, free_vars, parse_term, parse_type, term_size,
)

NAT = "forall X. (X -> X) -> X -> X"
ID = "forall X. X -> X"

# (name, arity, Curry term)
NUMERIC = [
    ("identity", 1, r"\n. n"),
    ("successor", 1, r"\n f x. f (n f x)"),
    ("zero", 1, r"\n f x. x"),
    ("two", 1, r"\n f x. f (f x)"),
    ("iszero", 1, r"\n f x. n (\y. x) (f x)"),
    ("square", 1, r"\n f x. n (n f) x"),
    ("double", 1, r"\n f x. n f (n f x)"),
    ("cube", 1, r"\n f x. n (n (n f)) x"),
    ("twice_plus_one", 1, r"\n f x. f (n f (n f x))"),
    ("positive", 1, r"\n f x. n (\y. f x) x"),
    ("square_plus", 1, r"\n f x. n (n f) (n f x)"),
    ("add", 2, r"\m n f x. m f (n f x)"),
    ("mult1", 2, r"\x y f z. x (y f) z"),
    ("mult2", 2, r"\x y f z. y (x f) z"),
    ("first", 2, r"\m n. m"),
    ("second", 2, r"\m n. n"),
    ("guard_zero", 2, r"\m n f x. m (\y. x) (n f x)"),
    ("guard_pos", 2, r"\m n f x. m (\y. n f x) x"),
    ("mult_plus", 2, r"\m n f x. m (n f) (m f x)"),
    ("both_zero", 2, r"\m n f x. m (\y. x) (n (\y. x) (f x))"),
]


# independent arithmetic for each corpus term
ARITH = {
    "identity": lambda n: n,
    "successor": lambda n: n + 1,
    "zero": lambda n: 0,
    "two": lambda n: 2,
    "iszero": lambda n: int(n == 0),
    "square": lambda n: n * n,
    "double": lambda n: 2 * n,
    "cube": lambda n: n ** 3,
    "twice_plus_one": lambda n: 2 * n + 1,
    "positive": lambda n: int(n > 0),
    "square_plus": lambda n: n * n + n,
    "add": lambda m, n: m + n,
    "mult1": lambda m, n: m * n,
    "mult2": lambda m, n: m * n,
    "first": lambda m, n: m,
    "second": lambda m, n: n,
    "guard_zero": lambda m, n: n if m == 0 else 0,
    "guard_pos": lambda m, n: n if m > 0 else 0,
    "mult_plus": lambda m, n: m * n + m,
    "both_zero": lambda m, n: int(m == 0 and n == 0),
}


def numeric(name):
    for n, k, s in NUMERIC:
        if n == name:
            return parse_term(s), k
    raise KeyError(name)


# target types for the encodings (instantiation overflow)
TARGETS = [
    "X", "Y", "X -> Y", "X -> X -> X", "(X -> X) -> X", "forall Y. Y",
    "forall Y. Y -> X", "forall Y. X -> Y", "forall Y Z. (Y -> Z) -> Y -> Z",
    "forall Y. (Y -> Y) -> Y -> Y", "(forall Y. Y) -> X", "X -> forall Y. Y -> Y",
    "forall Y. (forall Z. Z -> Y) -> Y", "(X -> Y) -> (Y -> X) -> X",
    "forall Y. Y -> Y -> Y", "forall Y. (X -> Y) -> Y", "(forall Y. Y -> Y) -> X -> X",
    "forall Y. forall Z. Z", "X -> (forall Y. Y) -> X", "forall Y. ((Y -> X) -> Y) -> Y",
]


# ---------------------------------------------------------------- random judgments

class Gen:
    def __init__(self, seed=0):
        self.rng = random.Random(seed)

    def type(self, d, bound):
        rng = self.rng
        r = rng.random()
        if d == 0 or r < 0.35:
            return TVar(rng.choice(["A", "B"] + bound))
        if r < 0.55 and d > 1:
            v = rng.choice(["X", "Y", "Z"])
            return Forall(v, self.type(d - 1, bound + [v]))
        return Arrow(self.type(d - 1, bound), self.type(d - 1, bound))

    def top(self):
        vs = self.rng.sample(["X", "Y"], self.rng.randint(0, 2))
        return foralls(vs, self.type(3, vs))

    def term(self, d, env, gvars):
        rng = self.rng
        r = rng.random()
        if (d == 0 or r < 0.3) and env + gvars:
            return Var(rng.choice(env + gvars))
        if d == 0 or r < 0.6:
            x = rng.choice(["x", "y", "z"])
            return Abs(x, self.term(max(d - 1, 0), env + [x], gvars))
        return App(self.term(d - 1, env, gvars), self.term(d - 1, env, gvars))

    def context(self, lo=0, hi=2):
        names = self.rng.sample(["f", "g", "a"], self.rng.randint(lo, hi))
        return {g: self.top() for g in names}


def closed_terms(n, seed=0, max_size=9):
    g = Gen(seed)
    out, seen = [], set()
    while len(out) < n:
        t = g.term(4, [], [])
        if free_vars(t) or term_size(t) > max_size or t in seen:
            continue
        seen.add(t)
        out.append(t)
    return out


def accepted_judgments(n, seed=0):
    """Random judgments the checker accepts.  Candidate types come from the
    oracle's closure of a synthesized type, which makes acceptance likely."""
    from oracle import Oracle, Unsupported
    from fatcheck.typecheck import Accepted, check

    g = Gen(seed)
    out = []
    tries = 0
    while len(out) < n:
        tries += 1
        assert tries < 200 * n, "generator starved"
        ctx = g.context(1, 3)
        t = g.term(3, [], list(ctx))
        if free_vars(t) - set(ctx) or term_size(t) > 7 or isinstance(t, Abs):
            continue
        o = Oracle(ctx, TVar("A"))
        key = tuple(sorted(ctx.items()))
        try:
            bases = o.bases(key, t)
        except Unsupported:
            continue
        if not bases:
            continue
        A = g.rng.choice(o.closures(bases[0], key))
        r = check(ctx, t, A)
        if isinstance(r, Accepted):
            out.append((ctx, t, A, r))
    return out


def parse_judgment(ctx, t, A):
    return ({k: parse_type(v) for k, v in ctx.items()}, parse_term(t), parse_type(A))
