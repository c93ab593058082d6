"""Contextual equivalence of numerical functions, and the constructions
around inhabitation.

Numerical functions of type Nat^k -> Nat denote extended polynomials:
on each region where a fixed set of arguments is zero and the rest are
positive, the function is a polynomial with natural coefficients.  Two
such terms are equivalent exactly when their region tables coincide, so
equivalence reduces to extracting the tables.  Extraction evaluates the
term on a grid, interpolates exactly, and re-checks the fit off the grid;
it raises instead of returning a fit it could not confirm.

Why regions suffice: a polynomial with natural coefficients is either the
zero polynomial or strictly positive on every point with positive
coordinates.  So ``iszero`` applied to such a polynomial is constant on
each region, and composing the closure operations never splits a region
further.

The rest of the module builds the separating pair for inhabitation, its
witness-driven separating context, enumerators for the contexts that
cannot separate it, the first-order translations, and a bounded
proof search used as test plumbing.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .encodings import TermContext, inj, io_plus_context, sum_type
from .reduction import (
    FALSE, TRUE, NotANumeral, beta_normalize, betaeta_equal, betaeta_normal_form,
)
from .syntax import (
    Abs, App, Arrow, Club, Forall, Star, Term, TVar, Type, TyAbs, TyApp, Var, all_term_names,
    all_type_names, alpha_eq, apps, arrows, erase_term, free_vars, fresh_name, ftv,
    is_curry, lams, substitute, type_key,
)


class IllTyped(ValueError):
    """The term is not accepted at the numerical type it is used at."""


class DegreeBoundExceeded(RuntimeError):
    pass


class WitnessRejected(ValueError):
    pass


class IllFormedFormula(ValueError):
    pass


# ---------------------------------------------------------------- numerals

NAT = Forall("X", arrows(Arrow(TVar("X"), TVar("X")), TVar("X"), TVar("X")))
BOOL = Forall("X", arrows(TVar("X"), TVar("X"), TVar("X")))
TOP = Forall("X", Arrow(TVar("X"), TVar("X")))          # the one-element type


def numeric_type(k: int) -> Type:
    return arrows(*([NAT] * k), NAT)


def church_true() -> Term:
    return TyAbs("X", TRUE)


def church_false() -> Term:
    return TyAbs("X", FALSE)


def _curry(t: Term) -> Term:
    return t if is_curry(t) else erase_term(t)


@lru_cache(maxsize=None)
def _accepted(t: Term, k: int) -> bool:
    from .typecheck import Accepted, check
    if free_vars(t):
        return False
    return isinstance(check({}, t, numeric_type(k)), Accepted)


def require_numerical(t: Term, k: int) -> Term:
    t = _curry(t)
    if not _accepted(t, k):
        raise IllTyped(f"not accepted at Nat^{k} -> Nat")
    return t


def _numeral(n: int) -> Term:
    from .reduction import church_numeral
    return church_numeral(n)


def _apply_numerals(t: Term, args: Sequence[int], fuel) -> int:
    avoid = all_term_names(t)
    f = "f" if "f" not in avoid else fresh_name("f", avoid)
    x = "x" if "x" not in avoid else fresh_name("x", avoid | {f})
    nf = beta_normalize(apps(t, *[_numeral(a) for a in args], Var(f), Var(x)), fuel)
    n = 0
    while isinstance(nf, App) and nf.fun == Var(f):
        n += 1
        nf = nf.arg
    if nf != Var(x):
        raise NotANumeral("the result is not f^n x")
    return n


def eval_numeric(t: Term, args: Sequence[int], fuel=None) -> int:
    """The number computed by t on the given arguments."""
    if any(a < 0 for a in args):
        raise ValueError("arguments are natural numbers")
    t = require_numerical(t, len(args))
    return _apply_numerals(t, args, fuel)


# ---------------------------------------------------------------- extended polynomials

Monomials = Tuple[Tuple[Tuple[int, ...], int], ...]


@dataclass(frozen=True)
class ExtPoly:
    """Region table: for every zero set S (1-based indices) a polynomial in
    the remaining variables, as sorted (exponents, coefficient) pairs with
    positive coefficients.  Exponents of variables in S are 0."""
    arity: int
    regions: Tuple[Tuple[Tuple[int, ...], Monomials], ...]

    def region(self, zeros) -> Monomials:
        zeros = tuple(sorted(zeros))
        for z, mons in self.regions:
            if z == zeros:
                return mons
        raise KeyError(zeros)

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise ValueError("wrong number of arguments")
        zeros = tuple(i + 1 for i, a in enumerate(args) if a == 0)
        total = 0
        for exps, c in self.region(zeros):
            term = c
            for a, e in zip(args, exps):
                term *= a ** e
            total += term
        return total

    def show(self) -> str:
        parts = []
        for zeros, mons in self.regions:
            parts.append(f"zeros={list(zeros)}: {_show_poly(mons, self.arity)}")
        return "; ".join(parts)


def _show_poly(mons: Monomials, k: int) -> str:
    if not mons:
        return "0"
    out = []
    for exps, c in mons:
        factors = []
        for i, e in enumerate(exps):
            if e == 1:
                factors.append(f"x{i + 1}")
            elif e > 1:
                factors.append(f"x{i + 1}^{e}")
        if c != 1 or not factors:
            factors.insert(0, str(c))
        out.append("*".join(factors))
    return " + ".join(out)


def _canon(coeffs: Dict[Tuple[int, ...], int]) -> Monomials:
    return tuple(sorted((e, c) for e, c in coeffs.items() if c != 0))


def make_extpoly(arity: int, table: Dict[Tuple[int, ...], Dict[Tuple[int, ...], int]]) -> ExtPoly:
    regions = []
    for zeros in zero_sets(arity):
        regions.append((zeros, _canon(table.get(zeros, {}))))
    return ExtPoly(arity, tuple(regions))


def zero_sets(k: int) -> List[Tuple[int, ...]]:
    out = []
    for r in range(k + 1):
        out.extend(itertools.combinations(range(1, k + 1), r))
    return out


def extpoly_to_json(p: ExtPoly) -> dict:
    return {
        "arity": p.arity,
        "regions": [{"zeros": list(z),
                     "monomials": [{"exps": list(e), "coeff": c} for e, c in mons]}
                    for z, mons in p.regions],
    }


def extpoly_from_json(data: dict) -> ExtPoly:
    k = data["arity"]
    table = {}
    for r in data["regions"]:
        table[tuple(sorted(r["zeros"]))] = {tuple(m["exps"]): m["coeff"] for m in r["monomials"]}
    return make_extpoly(k, table)


def extpoly_equal(p: ExtPoly, q: ExtPoly) -> bool:
    if p.arity != q.arity:
        raise ValueError("arity mismatch")
    return p.regions == q.regions


# ---------------------------------------------------------------- interpolation

def _interp_1d(values: Sequence[Fraction]) -> List[Fraction]:
    """Power-basis coefficients of the polynomial through (i+1, values[i])."""
    n = len(values)
    xs = list(range(1, n + 1))
    dd = [Fraction(v) for v in values]
    newton = [dd[0]]
    for j in range(1, n):
        dd = [(dd[i + 1] - dd[i]) / (xs[i + j] - xs[i]) for i in range(n - j)]
        newton.append(dd[0])
    coeffs = [Fraction(0)] * n
    # Horner on the Newton form: p = c0 + (x-1)(c1 + (x-2)(c2 + ...))
    acc = [Fraction(0)] * n
    for j in range(n - 1, -1, -1):
        shifted = [Fraction(0)] + acc[:-1]
        acc = [shifted[i] - xs[j] * acc[i] for i in range(n)]
        acc[0] += newton[j]
    coeffs = acc
    return coeffs


def _interp(m: int, n: int, value) -> Dict[Tuple[int, ...], Fraction]:
    """Tensor interpolation of ``value`` (a function of an m-tuple) on {1..n}^m."""
    if m == 0:
        return {(): Fraction(value(()))}
    rows = [_interp(m - 1, n, lambda rest, a=a: value((a,) + rest)) for a in range(1, n + 1)]
    keys = sorted(set().union(*rows))
    out = {}
    for rest in keys:
        cs = _interp_1d([row.get(rest, Fraction(0)) for row in rows])
        for e, c in enumerate(cs):
            if c != 0:
                out[(e,) + rest] = c
    return out


def occurrence_count(t: Term) -> int:
    """Occurrences of bound variables in the beta-eta normal form."""
    nf = betaeta_normal_form(_curry(t))

    def go(u, bound):
        if isinstance(u, Var):
            return 1 if u.name in bound else 0
        if isinstance(u, Abs):
            return go(u.body, bound | {u.var})
        if isinstance(u, App):
            return go(u.fun, bound) + go(u.arg, bound)
        return 0
    return go(nf, frozenset())


@dataclass(frozen=True)
class ExtractionReport:
    poly: ExtPoly
    degree_bound: int
    grid_points: int
    checks: Tuple[Tuple[Tuple[int, ...], int], ...]    # out-of-grid (point, value)


def extract_report(t: Term, k: int, fuel=None, doublings: int = 3,
                   checks: int = 10, seed: int = 0) -> ExtractionReport:
    t = require_numerical(t, k)
    cache: Dict[Tuple[int, ...], int] = {}

    def ev(point):
        if point not in cache:
            cache[point] = _apply_numerals(t, point, fuel)
        return cache[point]

    D = max(1, occurrence_count(t))
    for _ in range(doublings + 1):
        report = _fit(ev, k, D, checks, seed)
        if report is not None:
            poly, pts = report
            return ExtractionReport(poly, D, len(cache), pts)
        D *= 2
    raise DegreeBoundExceeded(f"no verified polynomial of degree <= {D // 2} per variable")


def _fit(ev, k: int, D: int, checks: int, seed: int):
    table = {}
    verified = []
    rng = random.Random(seed)
    for zeros in zero_sets(k):
        free = [i for i in range(k) if i + 1 not in zeros]

        def point(sub):
            full = [0] * k
            for i, a in zip(free, sub):
                full[i] = a
            return tuple(full)

        coeffs = _interp(len(free), D + 1, lambda sub: ev(point(sub)))
        mons = {}
        for exps, c in coeffs.items():
            if c.denominator != 1 or c < 0:
                return None
            full = [0] * k
            for i, e in zip(free, exps):
                full[i] = e
            mons[tuple(full)] = int(c)
        table[zeros] = mons
        if not free:
            continue
        cand = make_extpoly(k, {zeros: mons})
        for _ in range(checks):
            sub = [rng.randint(1, D + 5) for _ in free]
            j = rng.randrange(len(free))
            sub[j] = rng.randint(D + 2, D + 5)          # off the grid
            p = point(sub)
            if cand(*p) != ev(p):
                return None
            verified.append((p, ev(p)))
    return make_extpoly(k, table), tuple(verified)


def extract_extpoly(t: Term, k: int, fuel=None, doublings: int = 3) -> ExtPoly:
    """Region table of the function t computes, verified off the grid."""
    return extract_report(t, k, fuel, doublings).poly


# ---------------------------------------------------------------- deciding equality

@dataclass(frozen=True)
class NatComparison:
    equal: bool
    left: ExtPoly
    right: ExtPoly
    witness: Optional[Tuple[int, ...]] = None       # a differing argument tuple
    values: Optional[Tuple[int, int]] = None


def compare_numerical(t: Term, u: Term, k: int, fuel=None) -> NatComparison:
    p = extract_extpoly(t, k, fuel)
    q = extract_extpoly(u, k, fuel)
    if extpoly_equal(p, q):
        return NatComparison(True, p, q)
    point = separating_tuple(p, q)
    vt, vu = eval_numeric(t, point, fuel), eval_numeric(u, point, fuel)
    assert vt != vu, "extracted tables differ but the terms agree at the chosen tuple"
    return NatComparison(False, p, q, point, (vt, vu))


def eq_nat_numerical(t: Term, u: Term, k: int, fuel=None) -> bool:
    return compare_numerical(t, u, k, fuel).equal


def separating_tuple(p: ExtPoly, q: ExtPoly) -> Tuple[int, ...]:
    """An argument tuple where two different tables take different values."""
    for (zeros, a), (_, b) in zip(p.regions, q.regions):
        if a == b:
            continue
        deg = max([max(e) for e, _ in a + b if e] + [0])
        free = [i for i in range(p.arity) if i + 1 not in zeros]
        # distinct polynomials of degree <= deg per variable differ on {1..deg+1}^m
        for sub in itertools.product(range(1, deg + 2), repeat=len(free)):
            full = [0] * p.arity
            for i, v in zip(free, sub):
                full[i] = v
            if p(*full) != q(*full):
                return tuple(full)
    raise ValueError("the tables are equal")


# ---------------------------------------------------------------- separating pair

def replace_club(A: Type, C: Type) -> Type:
    if isinstance(A, Club):
        return C
    if isinstance(A, Arrow):
        return Arrow(replace_club(A.dom, C), replace_club(A.cod, C))
    if isinstance(A, Forall):
        return Forall(A.var, replace_club(A.body, C))
    return A


def replace_star(t: Term, u: Term) -> Term:
    if isinstance(t, Star):
        return u
    if isinstance(t, Abs):
        return Abs(t.var, replace_star(t.body, u))
    if isinstance(t, App):
        return App(replace_star(t.fun, u), replace_star(t.arg, u))
    if isinstance(t, TyAbs):
        return TyAbs(t.tyvar, replace_star(t.body, u))
    if isinstance(t, TyApp):
        return TyApp(replace_star(t.fun, u), t.witness)
    return t


@dataclass(frozen=True)
class SeparatingPair:
    A: Type
    Y: str
    A_star: Type            # Y -> A[Y/#]
    domain: Type            # A* +~ T~
    u: Term
    v: Term

    @property
    def type(self) -> Type:
        return Arrow(self.domain, BOOL)


def star_type(A: Type) -> Tuple[str, Type]:
    names = all_type_names(A)
    Y = "Y" if "Y" not in names else fresh_name("Y", names)
    return Y, Arrow(TVar(Y), replace_club(A, TVar(Y)))


def separating_pair(A: Type) -> SeparatingPair:
    """u_A = \\x. false and v_A = \\x. IO+[x] (\\x. true) (\\x. false), both of
    type (A* +~ T~) -> Bool, equivalent iff A is uninhabited."""
    Y, A_star = star_type(A)
    u = Abs("x", church_false())
    ctx = io_plus_context(A_star, TOP, BOOL)
    v = Abs("x", apps(ctx.fill(Var("x")), Abs("x", church_true()), Abs("x", church_false())))
    return SeparatingPair(A, Y, A_star, sum_type(A_star, TOP), u, v)


def separating_pair_nat(A: Type) -> SeparatingPair:
    """The same pair, used against contexts of result type Nat."""
    return separating_pair(A)


def separating_context(A: Type, witness: Term) -> TermContext:
    """K[ ] = [ ] (inj1 t*) with t* = \\y. t[y/*]; separates u_A from v_A."""
    from .typecheck import Accepted, check
    w = _curry(witness)
    if free_vars(w) or not isinstance(check({}, w, A), Accepted):
        raise WitnessRejected("the witness is not a closed inhabitant of the type")
    pair = separating_pair(A)
    names = all_term_names(w)
    y = "y" if "y" not in names else fresh_name("y", names)
    t_star = Abs(y, replace_star(w, Var(y)))
    arg = inj(1, t_star, pair.A_star, TOP)
    K = TermContext(lambda h: App(h, arg), "separate")
    assert alpha_eq(erase_term(betaeta_normal_form(K.fill(pair.u))), FALSE)
    assert alpha_eq(erase_term(betaeta_normal_form(K.fill(pair.v))), TRUE)
    return K


# ---------------------------------------------------------------- non-separating contexts

def _sizes(total: int, parts: int):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _sizes(total - first, parts - 1):
            yield (first,) + rest


def _mk(kind, size, env):
    """All contexts of one grammar family and exact size, as builders
    taking (hole, env).  env maps the goal variable of the family to its
    term variable."""
    out = []
    if kind == "C":          # goal Z: x_i | E [Z] C C
        if size == 1:
            for x in env["xs"]:
                out.append(lambda h, x=x: Var(x))
        for se, s1, s2 in _sizes(size - 1, 3) if size >= 4 else ():
            for E in _mk("E", se, env):
                for C1 in _mk("C", s1, env):
                    for C2 in _mk("C", s2, env):
                        out.append(lambda h, E=E, C1=C1, C2=C2:
                                   apps(TyApp(E(h), TVar(env["Z"])), C1(h), C2(h)))
    elif kind == "E":        # Bool: true | false | h (/\Y. \y z. D)
        if size == 1:
            out.append(lambda h: church_true())
            out.append(lambda h: church_false())
        elif size >= 2:
            k = env["depth"] + 1
            Y, y, z = f"Y{k}", f"y{k}", f"z{k}"
            inner = {**env, "depth": k, "Y": Y, "z": z}
            for D in _mk("D", size - 1, inner):
                out.append(lambda h, D=D, Y=Y, y=y, z=z: App(h, TyAbs(Y, lams([y, z], D(h)))))
    elif kind == "D":        # goal Y: z (/\W. \w. F) | E [Y] D D
        if size >= 2:
            k = env["depth"] + 1
            W, w = f"W{k}", f"w{k}"
            inner = {**env, "depth": k, "W": W, "w": w}
            for F in _mk("F", size - 1, inner):
                out.append(lambda h, F=F, W=W, w=w, z=env["z"]:
                           App(Var(z), TyAbs(W, Abs(w, F(h)))))
        for se, s1, s2 in _sizes(size - 1, 3) if size >= 6 else ():
            for E in _mk("E", se, env):
                for D1 in _mk("D", s1, env):
                    for D2 in _mk("D", s2, env):
                        out.append(lambda h, E=E, D1=D1, D2=D2, Y=env["Y"]:
                                   apps(TyApp(E(h), TVar(Y)), D1(h), D2(h)))
    elif kind == "F":        # goal W: w | E [W] F F
        if size == 1:
            out.append(lambda h, w=env["w"]: Var(w))
        for se, s1, s2 in _sizes(size - 1, 3) if size >= 4 else ():
            for E in _mk("E", se, env):
                for F1 in _mk("F", s1, env):
                    for F2 in _mk("F", s2, env):
                        out.append(lambda h, E=E, F1=F1, F2=F2, W=env["W"]:
                                   apps(TyApp(E(h), TVar(W)), F1(h), F2(h)))
    elif kind == "B":        # goal U: g | f B | E [U] B B
        if size == 1:
            out.append(lambda h: Var("g"))
        if size >= 2:
            for B in _mk("B", size - 1, env):
                out.append(lambda h, B=B: App(Var("f"), B(h)))
        for se, s1, s2 in _sizes(size - 1, 3) if size >= 4 else ():
            for E in _mk("E", se, env):
                for B1 in _mk("B", s1, env):
                    for B2 in _mk("B", s2, env):
                        out.append(lambda h, E=E, B1=B1, B2=B2:
                                   apps(TyApp(E(h), TVar("U")), B1(h), B2(h)))
    return out


def bool_contexts(limit: int, max_size: int = 12) -> List[TermContext]:
    """Closed Bool contexts /\\Z. \\x1 x2. C[ ] with C drawn from the families
    that cannot tell the separating pair apart when A is uninhabited; the
    hole stands for a term of type (A* +~ T~) -> Bool.  Smallest first."""
    env = {"xs": ("x1", "x2"), "Z": "Z", "depth": 0}
    out = []
    for size in range(1, max_size + 1):
        for C in _mk("C", size, env):
            out.append(TermContext(lambda h, C=C: TyAbs("Z", lams(["x1", "x2"], C(h))),
                                   f"G1/{size}"))
            if len(out) >= limit:
                return out
    return out


def nat_contexts(limit: int, max_size: int = 12) -> List[TermContext]:
    """Closed Nat contexts /\\U. \\f g. B[ ] with B from the Nat family."""
    env = {"depth": 0}
    out = []
    for size in range(1, max_size + 1):
        for B in _mk("B", size, env):
            out.append(TermContext(lambda h, B=B: TyAbs("U", lams(["f", "g"], B(h))),
                                   f"G5/{size}"))
            if len(out) >= limit:
                return out
    return out


def separates(K: TermContext, pair: SeparatingPair, fuel=None) -> bool:
    return not betaeta_equal(K.fill(pair.u), K.fill(pair.v), fuel)


# ---------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Atom:
    pred: str
    args: Tuple[str, ...]


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class All:
    var: str
    body: "Formula"


Formula = Union[Atom, Bot, Imp, All]

_FTOK = re.compile(r"\s*(?:(=>|->)|([A-Za-z][A-Za-z0-9_']*)|([().,]))")


def parse_formula(text: str) -> Formula:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _FTOK.match(text, pos)
        if not m:
            raise IllFormedFormula(f"unexpected character at {pos}")
        toks.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    toks.append(None)
    i = 0

    def peek():
        return toks[i]

    def take(expect=None):
        nonlocal i
        tok = toks[i]
        if expect is not None and tok != expect:
            raise IllFormedFormula(f"expected {expect!r}, found {tok!r}")
        i += 1
        return tok

    def ident():
        tok = take()
        if tok is None or not re.match(r"[A-Za-z]", tok) or tok in ("forall", "bot"):
            raise IllFormedFormula(f"expected a name, found {tok!r}")
        return tok

    def formula():
        if peek() == "forall":
            take()
            v = ident()
            take(".")
            return All(v, formula())
        left = atom()
        if peek() in ("=>", "->"):
            take()
            return Imp(left, formula())
        return left

    def atom():
        tok = peek()
        if tok == "bot":
            take()
            return Bot()
        if tok == "(":
            take()
            f = formula()
            take(")")
            return f
        p = ident()
        take("(")
        args = [ident()]
        if peek() == ",":
            take()
            args.append(ident())
        take(")")
        return Atom(p, tuple(args))

    f = formula()
    if peek() is not None:
        raise IllFormedFormula(f"unexpected {peek()!r}")
    return f


def show_formula(f: Formula) -> str:
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Atom):
        return f"{f.pred}({', '.join(f.args)})"
    if isinstance(f, Imp):
        left = show_formula(f.left)
        if isinstance(f.left, (Imp, All)):
            left = f"({left})"
        return f"{left} => {show_formula(f.right)}"
    return f"forall {f.var}. {show_formula(f.body)}"


def formula_fv(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Imp):
        return formula_fv(f.left) | formula_fv(f.right)
    if isinstance(f, All):
        return formula_fv(f.body) - {f.var}
    return frozenset()


def relations(f: Formula) -> Dict[str, int]:
    if isinstance(f, Atom):
        return {f.pred: len(f.args)}
    if isinstance(f, Imp):
        out = dict(relations(f.left))
        for p, n in relations(f.right).items():
            if out.setdefault(p, n) != n:
                raise IllFormedFormula(f"relation {p} used with two arities")
        return out
    if isinstance(f, All):
        return relations(f.body)
    return {}


# ---------------------------------------------------------------- dyadic translation

SPADE, BULLET, CIRC1, CIRC2, STAR_V = "Spade", "Bullet", "Circ1", "Circ2", "StarV"


def _var(a: str) -> Type:
    return TVar(f"X_{a}")


def _rel(p: str, i: int) -> Type:
    return TVar(f"{p}_{i}")


def _dot(A: Type) -> Type:
    return Arrow(A, TVar(BULLET))


def relation_type(p: str, A: Type, B: Type) -> Type:
    """p(A, B) = ((A. -> p1) -> (B. -> p2) -> p3) -> star."""
    pab = arrows(Arrow(_dot(A), _rel(p, 1)), Arrow(_dot(B), _rel(p, 2)), _rel(p, 3))
    return Arrow(pab, TVar(STAR_V))


def u_types(A: Type, symbols: Sequence[str]) -> List[Type]:
    out = []
    for p in symbols:
        for i in (1, 2):
            out.append(Arrow(Arrow(_dot(A), _rel(p, i)), TVar(CIRC1)))
    out.append(Arrow(_dot(A), TVar(CIRC2)))
    return out


def _translate(f: Formula, symbols) -> Type:
    if isinstance(f, Bot):
        return TVar(SPADE)
    if isinstance(f, Atom):
        a = f.args
        # a unary atom is read as a binary one with the argument repeated
        return relation_type(f.pred, _var(a[0]), _var(a[-1]))
    if isinstance(f, Imp):
        return Arrow(_translate(f.left, symbols), _translate(f.right, symbols))
    X = _var(f.var)
    return Forall(X.name, arrows(*u_types(X, symbols), _translate(f.body, symbols)))


def _symbols(formulas) -> Tuple[str, ...]:
    arities: Dict[str, int] = {}
    for f in formulas:
        for p, n in relations(f).items():
            if arities.setdefault(p, n) != n:
                raise IllFormedFormula(f"relation {p} used with two arities")
    return tuple(sorted(arities))


def _atoms_of_implication(f: Formula):
    prem = []
    while isinstance(f, Imp):
        prem.append(f.left)
        f = f.right
    return prem, f


def assumption_form(f: Formula) -> str:
    """Which of the three admissible assumption shapes f has: "atomic",
    "horn" or "seriality"; raises IllFormedFormula otherwise."""
    if isinstance(f, Atom):
        return "atomic"
    if formula_fv(f):
        raise IllFormedFormula(f"assumption {show_formula(f)} is not closed")
    # forall a. (forall b. p(a, b) => bot) => bot
    if isinstance(f, All) and isinstance(f.body, Imp) and isinstance(f.body.right, Bot):
        inner = f.body.left
        if isinstance(inner, All) and isinstance(inner.body, Imp) \
                and isinstance(inner.body.right, Bot) and isinstance(inner.body.left, Atom) \
                and inner.body.left.args == (f.var, inner.var):
            return "seriality"
    body = f
    while isinstance(body, All):
        body = body.body
    prem, concl = _atoms_of_implication(body)
    if isinstance(concl, (Atom, Bot)) and all(isinstance(p, Atom) for p in prem):
        covered = set().union(*[set(p.args) for p in prem]) if prem else set()
        if isinstance(concl, Bot) or set(concl.args) <= covered:
            return "horn"
    raise IllFormedFormula(f"assumption {show_formula(f)} has none of the admissible shapes")


@dataclass(frozen=True)
class Sequent:
    ctx: Dict[str, Type]
    goal: Type


def translate_formula(f: Formula, symbols: Optional[Sequence[str]] = None) -> Type:
    if symbols is None:
        symbols = _symbols([f])
    return _translate(f, tuple(symbols))


def translate_sequent(phi: Formula, context: Sequence[Formula] = (),
                      validate: bool = True) -> Sequent:
    """Typing problem for context |- phi: one variable per assumption and
    U hypotheses for every free first-order variable."""
    if validate:
        for a in context:
            assumption_form(a)
    symbols = _symbols(list(context) + [phi])
    ctx = {}
    for i, a in enumerate(context, 1):
        ctx[f"h{i}"] = _translate(a, symbols)
    free = sorted(formula_fv(phi).union(*[formula_fv(a) for a in context]))
    n = 0
    for a in free:
        for U in u_types(_var(a), symbols):
            n += 1
            ctx[f"u{n}"] = U
    return Sequent(ctx, _translate(phi, symbols))


def translate_dyadic(phi: Formula, context: Sequence[Formula] = ()) -> Type:
    """The translated formula; with a context, the whole sequent as one
    type (assumptions and U hypotheses become premises)."""
    if not context:
        return translate_formula(phi)
    s = translate_sequent(phi, context)
    return arrows(*s.ctx.values(), s.goal)


# ---------------------------------------------------------------- monadic bijection

def monadic_to_type(f: Formula, pred: str = "p") -> Type:
    if isinstance(f, Atom):
        if f.pred != pred or len(f.args) != 1:
            raise IllFormedFormula(f"expected {pred}(_), found {show_formula(f)}")
        return TVar(f.args[0])
    if isinstance(f, Imp):
        return Arrow(monadic_to_type(f.left, pred), monadic_to_type(f.right, pred))
    if isinstance(f, All):
        return Forall(f.var, monadic_to_type(f.body, pred))
    raise IllFormedFormula("bot has no counterpart among types")


def type_to_monadic(A: Type, pred: str = "p") -> Formula:
    if isinstance(A, TVar):
        return Atom(pred, (A.name,))
    if isinstance(A, Arrow):
        return Imp(type_to_monadic(A.dom, pred), type_to_monadic(A.cod, pred))
    if isinstance(A, Forall):
        return All(A.var, type_to_monadic(A.body, pred))
    raise ValueError("the constant # has no counterpart among formulas")


# ---------------------------------------------------------------- bounded search

def bounded_search(A: Type, depth: int, ctx: Optional[Dict[str, Type]] = None) -> Optional[Term]:
    """Church-style beta-normal inhabitant of A (in ctx), or None.  Goals
    are eta-expanded except when a hypothesis has exactly the goal type.  Depth counts lambda introductions and variable heads along a
    branch; type abstraction and instantiation are free.  Instantiation
    witnesses are the type variables in scope plus one fresh name."""
    ctx = dict(ctx or {})
    names = set(all_type_names(A))
    for T in ctx.values():
        names |= all_type_names(T)
    spare = fresh_name("V", names) if "V" in names else "V"
    scope0 = frozenset(ftv(A)).union(*[ftv(T) for T in ctx.values()])
    memo: Dict[tuple, Optional[Term]] = {}
    counter = itertools.count(1)
    used_vars = set(ctx)

    def fresh_term_var():
        while True:
            x = f"x{next(counter)}"
            if x not in used_vars:
                used_vars.add(x)
                return x

    def target(T):
        bound = set()
        while True:
            if isinstance(T, Forall):
                bound.add(T.var)
                T = T.body
            elif isinstance(T, Arrow):
                T = T.cod
            else:
                return T, bound

    def can_reach(T, goal):
        tgt, bound = target(T)
        if isinstance(tgt, TVar) and tgt.name in bound:
            return True
        return alpha_eq(tgt, goal)

    def search(env, scope, goal, d):
        key = (tuple((x, type_key(T)) for x, T in env), scope, type_key(goal), d)
        if key in memo:
            return memo[key]
        out = solve(env, scope, goal, d)
        memo[key] = out
        return out

    def solve(env, scope, goal, d):
        if isinstance(goal, Forall):
            X = goal.var
            body = goal.body
            taken = set(scope) | {spare} | names
            if X in scope or X == spare:
                newX = fresh_name(X, taken)
                body = substitute(body, X, TVar(newX))
                X = newX
            inner = search(env, scope | {X}, body, d)
            return None if inner is None else TyAbs(X, inner)
        if d <= 0:
            return None
        for x, T in reversed(env):
            # a hypothesis of exactly the goal type closes it without eta-expansion
            if alpha_eq(T, goal):
                return Var(x)
        if isinstance(goal, Arrow):
            x = fresh_term_var()
            inner = search(env + ((x, goal.dom),), scope, goal.cod, d - 1)
            return None if inner is None else Abs(x, inner)
        if isinstance(goal, Club):
            return Star()
        pool = sorted(scope) + [spare]
        for x, T in reversed(env):
            if not can_reach(T, goal):
                continue
            spine = eliminate(env, scope, pool, T, goal, d - 1)
            if spine is not None:
                head = Var(x)
                for kind, item in spine:
                    head = TyApp(head, item) if kind == "ty" else App(head, item)
                return head
        return None

    def eliminate(env, scope, pool, T, goal, d):
        if alpha_eq(T, goal):
            return []
        if isinstance(T, Forall):
            for w in pool:
                rest = eliminate(env, scope, pool, substitute(T.body, T.var, TVar(w)), goal, d)
                if rest is not None:
                    return [("ty", TVar(w))] + rest
            return None
        if isinstance(T, Arrow):
            if not can_reach(T.cod, goal):
                return None
            arg = search(env, scope, T.dom, d)
            if arg is None:
                return None
            rest = eliminate(env, scope, pool, T.cod, goal, d)
            return None if rest is None else [("tm", arg)] + rest
        return None

    return search(tuple(ctx.items()), scope0, A, depth)


__all__ = [
    "All", "Atom", "BOOL", "Bot", "DegreeBoundExceeded", "ExtPoly", "ExtractionReport",
    "Formula", "IllFormedFormula", "IllTyped", "Imp", "NAT", "NatComparison",
    "SeparatingPair", "Sequent", "TOP", "WitnessRejected", "assumption_form",
    "bool_contexts", "bounded_search", "church_false", "church_true", "compare_numerical",
    "eq_nat_numerical", "eval_numeric", "extpoly_equal", "extpoly_from_json",
    "extpoly_to_json", "extract_extpoly", "extract_report", "make_extpoly",
    "monadic_to_type", "nat_contexts", "numeric_type", "parse_formula", "relation_type",
    "separates", "separating_context", "separating_pair", "separating_pair_nat",
    "separating_tuple", "show_formula", "translate_dyadic", "translate_formula",
    "translate_sequent", "type_to_monadic", "u_types",
]
