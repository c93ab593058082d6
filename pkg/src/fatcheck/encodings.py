"""Sums and products in Church style, impredicative and predicative.

The impredicative destructors instantiate the encoded type at an arbitrary
type C.  The predicative ones reach the same effect through contexts that
only ever instantiate at type variables, recursing on the structure of C
(instantiation overflow).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .syntax import (
    Abs, App, Arrow, Club, Forall, Term, TVar, TyAbs, TyApp, Type, Var, all_term_names,
    all_tyvar_names_in_term, all_type_names, arrows, fresh_name, ftv, lams, show_term,
    substitute,
)


def _fresh(base: str, avoid: set) -> str:
    name = base if base not in avoid else fresh_name(base, avoid)
    avoid.add(name)
    return name


def sum_type(A: Type, B: Type) -> Type:
    """A +~ B = forall X. (A -> X) -> (B -> X) -> X."""
    X = _fresh("X", set(ftv(A)) | set(ftv(B)))
    return Forall(X, arrows(Arrow(A, TVar(X)), Arrow(B, TVar(X)), TVar(X)))


def prod_type(A: Type, B: Type) -> Type:
    """A x~ B = forall X. (A -> B -> X) -> X."""
    X = _fresh("X", set(ftv(A)) | set(ftv(B)))
    return Forall(X, Arrow(arrows(A, B, TVar(X)), TVar(X)))


def _avoid_term(*terms) -> set:
    out = set()
    for t in terms:
        out |= all_term_names(t)
    return out


def _avoid_types(*terms, types=()) -> set:
    out = set()
    for t in terms:
        out |= all_tyvar_names_in_term(t)
    for T in types:
        out |= all_type_names(T)
    return out


def inj(i: int, t: Term, A: Type, B: Type) -> Term:
    """/\\X. \\f g. f t (i = 1) or g t (i = 2)."""
    if i not in (1, 2):
        raise ValueError("injection index is 1 or 2")
    names = _avoid_term(t)
    f, g = _fresh("f", names), _fresh("g", names)
    X = _fresh("X", _avoid_types(t, types=(A, B)))
    return TyAbs(X, lams([f, g], App(Var(f if i == 1 else g), t)))


def pair(t: Term, u: Term, A: Type, B: Type) -> Term:
    """/\\X. \\f. f t u."""
    names = _avoid_term(t, u)
    f = _fresh("f", names)
    X = _fresh("X", _avoid_types(t, u, types=(A, B)))
    return TyAbs(X, Abs(f, App(App(Var(f), t), u)))


def proj(i: int, t: Term, A: Type, B: Type) -> Term:
    """t [A] (\\x y. x) or t [B] (\\x y. y)."""
    if i not in (1, 2):
        raise ValueError("projection index is 1 or 2")
    sel = lams(["x", "y"], Var("x" if i == 1 else "y"))
    return App(TyApp(t, A if i == 1 else B), sel)


def case_impredicative(t: Term, x: str, u: Term, y: str, v: Term, C: Type) -> Term:
    """t [C] (\\x. u) (\\y. v)."""
    return App(App(TyApp(t, C), Abs(x, u)), Abs(y, v))


# ---------------------------------------------------------------- contexts

@dataclass(frozen=True)
class TermContext:
    """A term with one hole.  Binders around the hole are chosen fresh for
    whatever is plugged in, so filling never captures the plug's variables."""
    build: Callable[[Term], Term]
    label: str

    def fill(self, t: Term) -> Term:
        return self.build(t)

    def show(self) -> str:
        return show_term(self.build(Var("HOLE"))).replace("HOLE", "[ ]")


def _io(kind: str, A: Type, B: Type, C: Type) -> TermContext:
    def build(plug: Term) -> Term:
        names = _avoid_term(plug)
        tnames = _avoid_types(plug, types=(A, B, C))
        return go(C, plug, names, tnames)

    def go(C, plug, names, tnames):
        if isinstance(C, TVar):
            return TyApp(plug, C)
        if isinstance(C, Club):
            raise ValueError("the constant # is not a type variable")
        if isinstance(C, Arrow):
            y, z = _fresh("y", names), _fresh("z", names)
            inner = go(C.cod, plug, names, tnames)
            if kind == "+":
                f, g = _fresh("f", names), _fresh("g", names)
                return lams([f, g, y], App(App(inner,
                                               Abs(z, App(App(Var(f), Var(z)), Var(y)))),
                                           Abs(z, App(App(Var(g), Var(z)), Var(y)))))
            f, w = _fresh("f", names), _fresh("w", names)
            return lams([f, y], App(inner, lams([z, w], App(App(App(Var(f), Var(z)), Var(w)), Var(y)))))
        # forall Y. C'
        Y = C.var
        body = C.body
        if Y in ftv(A) | ftv(B) or Y in tnames - all_type_names(C):
            newY = _fresh(Y, set(tnames) | all_type_names(C))
            body = substitute(body, Y, TVar(newY))
            Y = newY
        tnames = set(tnames) | {Y}
        z = _fresh("z", names)
        inner = go(body, plug, names, tnames)
        if kind == "+":
            f, g = _fresh("f", names), _fresh("g", names)
            return lams([f, g], TyAbs(Y, App(App(inner,
                                                 Abs(z, TyApp(App(Var(f), Var(z)), TVar(Y)))),
                                             Abs(z, TyApp(App(Var(g), Var(z)), TVar(Y))))))
        f, w = _fresh("f", names), _fresh("w", names)
        return Abs(f, TyAbs(Y, App(inner, lams([z, w], TyApp(App(App(Var(f), Var(z)), Var(w)), TVar(Y))))))

    return TermContext(build, f"IO{kind}")


def io_plus_context(A: Type, B: Type, C: Type) -> TermContext:
    """Hole of type A +~ B; result (A -> C) -> (B -> C) -> C."""
    return _io("+", A, B, C)


def io_times_context(A: Type, B: Type, C: Type) -> TermContext:
    """Hole of type A x~ B; result (A -> B -> C) -> C."""
    return _io("x", A, B, C)


def case_predicative(t: Term, x: str, u: Term, y: str, v: Term, A: Type, B: Type, C: Type) -> Term:
    return App(App(io_plus_context(A, B, C).fill(t), Abs(x, u)), Abs(y, v))


def split_predicative(t: Term, x: str, y: str, u: Term, A: Type, B: Type, C: Type) -> Term:
    return App(io_times_context(A, B, C).fill(t), lams([x, y], u))


def type_applications(t: Term):
    """Every witness of a type application in t."""
    if isinstance(t, TyApp):
        yield t.witness
        yield from type_applications(t.fun)
    elif isinstance(t, TyAbs):
        yield from type_applications(t.body)
    elif isinstance(t, Abs):
        yield from type_applications(t.body)
    elif isinstance(t, App):
        yield from type_applications(t.fun)
        yield from type_applications(t.arg)


def is_witness_atomic(t: Term) -> bool:
    return all(isinstance(w, TVar) for w in type_applications(t))
