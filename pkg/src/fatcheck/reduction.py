"""Beta and eta normalization, Church numerals and booleans."""
from __future__ import annotations

import os
import sys

from .syntax import (
    Abs, App, Term, TVar, TyAbs, TyApp, Var, alpha_eq, erase_term,
    free_vars, lams, subst_term, subst_type_in_term, term_ftv,
)

DEFAULT_FUEL = 10 ** 6

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class FuelExhausted(RuntimeError):
    pass


class NotANumeral(ValueError):
    pass


class Fuel:
    """Budget of redex contractions; each contraction spends one unit."""

    def __init__(self, max_steps=None):
        if max_steps is None:
            max_steps = int(os.environ.get("FATCHECK_FUEL", DEFAULT_FUEL))
        if max_steps <= 0:
            raise ValueError("fuel must be positive")
        self.max_steps = max_steps
        self.used = 0

    def spend(self):
        self.used += 1
        if self.used > self.max_steps:
            raise FuelExhausted(f"more than {self.max_steps} reduction steps")


def _fuel(fuel) -> Fuel:
    if fuel is None:
        return Fuel()
    if isinstance(fuel, int):
        return Fuel(fuel)
    return fuel


def _contract(t: Term) -> Term:
    if isinstance(t, App):
        return subst_term(t.fun.body, t.fun.var, t.arg)
    return subst_type_in_term(t.fun.body, t.fun.tyvar, t.witness)


def _is_redex(t: Term) -> bool:
    return (isinstance(t, App) and isinstance(t.fun, Abs)) or \
        (isinstance(t, TyApp) and isinstance(t.fun, TyAbs))


def _whnf(t: Term, fuel: Fuel) -> Term:
    while True:
        if isinstance(t, App):
            f = _whnf(t.fun, fuel)
            if isinstance(f, Abs):
                fuel.spend()
                t = subst_term(f.body, f.var, t.arg)
                continue
            return App(f, t.arg)
        if isinstance(t, TyApp):
            f = _whnf(t.fun, fuel)
            if isinstance(f, TyAbs):
                fuel.spend()
                t = subst_type_in_term(f.body, f.tyvar, t.witness)
                continue
            return TyApp(f, t.witness)
        return t


def _nf_outer(t: Term, fuel: Fuel) -> Term:
    t = _whnf(t, fuel)
    if isinstance(t, Abs):
        return Abs(t.var, _nf_outer(t.body, fuel))
    if isinstance(t, TyAbs):
        return TyAbs(t.tyvar, _nf_outer(t.body, fuel))
    if isinstance(t, App):
        return App(_nf_outer(t.fun, fuel), _nf_outer(t.arg, fuel))
    if isinstance(t, TyApp):
        return TyApp(_nf_outer(t.fun, fuel), t.witness)
    return t


def _nf_inner(t: Term, fuel: Fuel) -> Term:
    # rightmost-innermost: arguments before functions, bodies before binders
    if isinstance(t, Abs):
        return Abs(t.var, _nf_inner(t.body, fuel))
    if isinstance(t, TyAbs):
        return TyAbs(t.tyvar, _nf_inner(t.body, fuel))
    if isinstance(t, App):
        a = _nf_inner(t.arg, fuel)
        f = _nf_inner(t.fun, fuel)
        t = App(f, a)
    elif isinstance(t, TyApp):
        t = TyApp(_nf_inner(t.fun, fuel), t.witness)
    else:
        return t
    if _is_redex(t):
        fuel.spend()
        return _nf_inner(_contract(t), fuel)
    return t


def beta_normalize(t: Term, fuel=None, strategy: str = "leftmost-outermost") -> Term:
    """Beta normal form, contracting term and type redexes.

    Raises FuelExhausted when more than ``fuel`` contractions are needed.
    """
    fuel = _fuel(fuel)
    if strategy == "leftmost-outermost":
        return _nf_outer(t, fuel)
    if strategy == "rightmost-innermost":
        return _nf_inner(t, fuel)
    raise ValueError(f"unknown strategy {strategy!r}")


def eta_reduce(t: Term) -> Term:
    """Exhaustive eta reduction, bottom-up."""
    if isinstance(t, Abs):
        body = eta_reduce(t.body)
        if isinstance(body, App) and body.arg == Var(t.var) and t.var not in free_vars(body.fun):
            return body.fun
        return Abs(t.var, body)
    if isinstance(t, TyAbs):
        body = eta_reduce(t.body)
        if isinstance(body, TyApp) and body.witness == TVar(t.tyvar) \
                and t.tyvar not in term_ftv(body.fun):
            return body.fun
        return TyAbs(t.tyvar, body)
    if isinstance(t, App):
        return App(eta_reduce(t.fun), eta_reduce(t.arg))
    if isinstance(t, TyApp):
        return TyApp(eta_reduce(t.fun), t.witness)
    return t


def betaeta_normal_form(t: Term, fuel=None) -> Term:
    return eta_reduce(beta_normalize(t, fuel))


def betaeta_equal(t: Term, u: Term, fuel=None) -> bool:
    fuel = _fuel(fuel)
    return alpha_eq(betaeta_normal_form(t, fuel), betaeta_normal_form(u, fuel))


# ---------------------------------------------------------------- data

def church_numeral(n: int) -> Term:
    if n < 0:
        raise ValueError("numerals are natural numbers")
    body = Var("x")
    for _ in range(n):
        body = App(Var("f"), body)
    return lams(["f", "x"], body)


def read_numeral(t: Term) -> int:
    """Inverse of church_numeral on beta-normal terms (eta-short 1 accepted)."""
    t = erase_term(t)
    if not isinstance(t, Abs):
        raise NotANumeral("not an abstraction")
    f = t.var
    body = t.body
    if body == Var(f):
        return 1
    if not isinstance(body, Abs) or body.var == f:
        raise NotANumeral("expected \\f x. f^n x")
    x = body.var
    n = 0
    cur = body.body
    while isinstance(cur, App) and cur.fun == Var(f):
        n += 1
        cur = cur.arg
    if cur != Var(x):
        raise NotANumeral("expected \\f x. f^n x")
    return n


TRUE = lams(["x", "y"], Var("x"))
FALSE = lams(["x", "y"], Var("y"))


def church_bool(b: bool) -> Term:
    return TRUE if b else FALSE


def read_bool(t: Term) -> bool:
    t = erase_term(t)
    if alpha_eq(t, TRUE):
        return True
    if alpha_eq(t, FALSE):
        return False
    raise ValueError("not a Church boolean")


__all__ = [
    "DEFAULT_FUEL", "FALSE", "Fuel", "FuelExhausted", "NotANumeral", "TRUE",
    "beta_normalize", "betaeta_equal", "betaeta_normal_form", "church_bool",
    "church_numeral", "eta_reduce", "read_bool", "read_numeral",
]
