"""Types and terms of polymorphic lambda calculi with atomic instantiation.

Types are built from variables, arrows, universal quantifiers and the
constant ``#`` (written ♣ in mathematical notation).  Terms come in a
Curry flavour (plain lambda terms, plus the constant ``*``) and a Church
flavour that adds type abstraction ``/\\X. t`` and type application
``t [T]``.  All values are immutable.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Union


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class Arrow:
    dom: "Type"
    cod: "Type"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Type"


@dataclass(frozen=True)
class Club:
    pass


Type = Union[TVar, Arrow, Forall, Club]
CLUB = Club()


# simple types: the image of erase_types
@dataclass(frozen=True)
class Base:
    pass


@dataclass(frozen=True)
class SArrow:
    dom: "SimpleType"
    cod: "SimpleType"


SimpleType = Union[Base, SArrow]
O = Base()


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Abs:
    var: str
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class TyAbs:
    tyvar: str
    body: "Term"


@dataclass(frozen=True)
class TyApp:
    fun: "Term"
    witness: Type


@dataclass(frozen=True)
class Star:
    pass


Term = Union[Var, Abs, App, TyAbs, TyApp, Star]
STAR = Star()

TypingContext = Dict[str, Type]


# ---------------------------------------------------------------- helpers

def arrows(*types: Type) -> Type:
    """Right-nested arrow ``A1 -> ... -> An``."""
    out = types[-1]
    for t in reversed(types[:-1]):
        out = Arrow(t, out)
    return out


def foralls(names: Iterable[str], body: Type) -> Type:
    for n in reversed(list(names)):
        body = Forall(n, body)
    return body


def lams(names: Iterable[str], body: Term) -> Term:
    for n in reversed(list(names)):
        body = Abs(n, body)
    return body


def apps(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def split_prefix(A: Type):
    """Return (binders, body) where body is not quantifier-headed."""
    names = []
    while isinstance(A, Forall):
        names.append(A.var)
        A = A.body
    return names, A


def is_curry(t: Term) -> bool:
    if isinstance(t, (Var, Star)):
        return True
    if isinstance(t, Abs):
        return is_curry(t.body)
    if isinstance(t, App):
        return is_curry(t.fun) and is_curry(t.arg)
    return False


def term_size(t: Term) -> int:
    if isinstance(t, (Var, Star)):
        return 1
    if isinstance(t, Abs):
        return 1 + term_size(t.body)
    if isinstance(t, App):
        return 1 + term_size(t.fun) + term_size(t.arg)
    if isinstance(t, TyAbs):
        return 1 + term_size(t.body)
    return 1 + term_size(t.fun)


def type_size(A: Type) -> int:
    if isinstance(A, (TVar, Club)):
        return 1
    if isinstance(A, Arrow):
        return 1 + type_size(A.dom) + type_size(A.cod)
    return 1 + type_size(A.body)


# ---------------------------------------------------------------- free variables

def ftv(A: Type) -> frozenset:
    if isinstance(A, TVar):
        return frozenset([A.name])
    if isinstance(A, Club):
        return frozenset()
    if isinstance(A, Arrow):
        return ftv(A.dom) | ftv(A.cod)
    return ftv(A.body) - {A.var}


def ftv_context(ctx: TypingContext) -> frozenset:
    out = frozenset()
    for A in ctx.values():
        out |= ftv(A)
    return out


def all_type_names(A: Type) -> set:
    """Free and bound type variable names of A."""
    if isinstance(A, TVar):
        return {A.name}
    if isinstance(A, Club):
        return set()
    if isinstance(A, Arrow):
        return all_type_names(A.dom) | all_type_names(A.cod)
    return {A.var} | all_type_names(A.body)


def free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Star):
        return frozenset()
    if isinstance(t, Abs):
        return free_vars(t.body) - {t.var}
    if isinstance(t, App):
        return free_vars(t.fun) | free_vars(t.arg)
    if isinstance(t, TyAbs):
        return free_vars(t.body)
    return free_vars(t.fun)


def term_ftv(t: Term) -> frozenset:
    """Free type variables occurring in the witnesses of a Church term."""
    if isinstance(t, (Var, Star)):
        return frozenset()
    if isinstance(t, Abs):
        return term_ftv(t.body)
    if isinstance(t, App):
        return term_ftv(t.fun) | term_ftv(t.arg)
    if isinstance(t, TyAbs):
        return term_ftv(t.body) - {t.tyvar}
    return term_ftv(t.fun) | ftv(t.witness)


def all_term_names(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Star):
        return set()
    if isinstance(t, Abs):
        return {t.var} | all_term_names(t.body)
    if isinstance(t, App):
        return all_term_names(t.fun) | all_term_names(t.arg)
    if isinstance(t, TyAbs):
        return all_term_names(t.body)
    return all_term_names(t.fun)


def all_tyvar_names_in_term(t: Term) -> set:
    if isinstance(t, (Var, Star)):
        return set()
    if isinstance(t, Abs):
        return all_tyvar_names_in_term(t.body)
    if isinstance(t, App):
        return all_tyvar_names_in_term(t.fun) | all_tyvar_names_in_term(t.arg)
    if isinstance(t, TyAbs):
        return {t.tyvar} | all_tyvar_names_in_term(t.body)
    return all_tyvar_names_in_term(t.fun) | all_type_names(t.witness)


_SUFFIX = re.compile(r"(_\d+|'+)$")


def fresh_name(base: str, avoid) -> str:
    """A name derived from ``base`` that is not in ``avoid``."""
    root = _SUFFIX.sub("", base) or base
    cand = root + "'"
    if cand not in avoid:
        return cand
    for i in itertools.count(2):
        cand = f"{root}_{i}"
        if cand not in avoid:
            return cand


# ---------------------------------------------------------------- substitution

def substitute(A: Type, X: str, C: Type) -> Type:
    """Capture-avoiding A[C/X]."""
    return subst_types(A, {X: C})


def subst_types(A: Type, sigma: dict) -> Type:
    """Simultaneous capture-avoiding substitution of type variables."""
    if not sigma:
        return A
    if isinstance(A, TVar):
        return sigma.get(A.name, A)
    if isinstance(A, Club):
        return A
    if isinstance(A, Arrow):
        return Arrow(subst_types(A.dom, sigma), subst_types(A.cod, sigma))
    inner = {k: v for k, v in sigma.items() if k != A.var}
    if not inner:
        return A
    body_fv = ftv(A.body)
    inner = {k: v for k, v in inner.items() if k in body_fv}
    if not inner:
        return A
    incoming = set()
    for v in inner.values():
        incoming |= ftv(v)
    if A.var in incoming:
        new = fresh_name(A.var, incoming | body_fv | set(inner))
        inner = dict(inner)
        inner[A.var] = TVar(new)
        return Forall(new, subst_types(A.body, inner))
    return Forall(A.var, subst_types(A.body, inner))


def subst_term(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding t[u/x] (term variables; type binders are respected)."""
    fv_u = free_vars(u)
    tfv_u = term_ftv(u)

    def go(t):
        if isinstance(t, Var):
            return u if t.name == x else t
        if isinstance(t, Star):
            return t
        if isinstance(t, App):
            return App(go(t.fun), go(t.arg))
        if isinstance(t, TyApp):
            return TyApp(go(t.fun), t.witness)
        if isinstance(t, TyAbs):
            if x not in free_vars(t.body):
                return t
            if t.tyvar in tfv_u:
                new = fresh_name(t.tyvar, tfv_u | all_tyvar_names_in_term(t.body))
                body = subst_type_in_term(t.body, t.tyvar, TVar(new))
                return TyAbs(new, go(body))
            return TyAbs(t.tyvar, go(t.body))
        # Abs
        if t.var == x or x not in free_vars(t.body):
            return t
        if t.var in fv_u:
            new = fresh_name(t.var, fv_u | all_term_names(t.body) | {x})
            body = subst_term(t.body, t.var, Var(new))
            return Abs(new, go(body))
        return Abs(t.var, go(t.body))

    return go(t)


def subst_type_in_term(t: Term, X: str, C: Type) -> Term:
    """Replace the free type variable X by C in the witnesses of t."""
    fv_c = ftv(C)

    def go(t):
        if isinstance(t, (Var, Star)):
            return t
        if isinstance(t, Abs):
            return Abs(t.var, go(t.body))
        if isinstance(t, App):
            return App(go(t.fun), go(t.arg))
        if isinstance(t, TyApp):
            return TyApp(go(t.fun), substitute(t.witness, X, C))
        if t.tyvar == X:
            return t
        if t.tyvar in fv_c and X in term_ftv(t.body):
            new = fresh_name(t.tyvar, fv_c | all_tyvar_names_in_term(t.body) | {X})
            return TyAbs(new, go(subst_type_in_term(t.body, t.tyvar, TVar(new))))
        return TyAbs(t.tyvar, go(t.body))

    return go(t)


# ---------------------------------------------------------------- alpha equivalence

def _db_type(A: Type, env: tuple):
    if isinstance(A, TVar):
        for i, n in enumerate(env):
            if n == A.name:
                return ("b", i)
        return ("f", A.name)
    if isinstance(A, Club):
        return ("c",)
    if isinstance(A, Arrow):
        return ("->", _db_type(A.dom, env), _db_type(A.cod, env))
    return ("all", _db_type(A.body, (A.var,) + env))


def _db_term(t: Term, env: tuple, tenv: tuple):
    if isinstance(t, Var):
        for i, n in enumerate(env):
            if n == t.name:
                return ("b", i)
        return ("f", t.name)
    if isinstance(t, Star):
        return ("*",)
    if isinstance(t, Abs):
        return ("lam", _db_term(t.body, (t.var,) + env, tenv))
    if isinstance(t, App):
        return ("@", _db_term(t.fun, env, tenv), _db_term(t.arg, env, tenv))
    if isinstance(t, TyAbs):
        return ("Lam", _db_term(t.body, env, (t.tyvar,) + tenv))
    return ("@T", _db_term(t.fun, env, tenv), _db_type(t.witness, tenv))


def type_key(A: Type):
    """Canonical, hashable representative of the alpha class of A."""
    return _db_type(A, ())


def term_key(t: Term):
    return _db_term(t, (), ())


def alpha_eq(a, b) -> bool:
    """Equality up to renaming of bound variables, for types or terms."""
    type_like = (TVar, Arrow, Forall, Club)
    if isinstance(a, type_like) != isinstance(b, type_like):
        return False
    if isinstance(a, type_like):
        return type_key(a) == type_key(b)
    return term_key(a) == term_key(b)


# ---------------------------------------------------------------- renaming

def barendregt_rename(obj, avoid: Optional[Iterable[str]] = None):
    """Rename every binder to a name that is used nowhere else.

    Free names are kept; ``avoid`` lists extra names binders must not take.
    Works on types and on (Curry or Church) terms.
    """
    if isinstance(obj, (TVar, Arrow, Forall, Club)):
        used = set(ftv(obj)) | set(avoid or ())
        return _rename_type(obj, {}, used)
    used_terms = set(free_vars(obj)) | set(avoid or ())
    used_types = set(term_ftv(obj)) | set(avoid or ())
    return _rename_term(obj, {}, {}, used_terms, used_types)


def _pick(name: str, used: set) -> str:
    new = name if name not in used else fresh_name(name, used)
    used.add(new)
    return new


def _rename_type(A: Type, env: dict, used: set) -> Type:
    if isinstance(A, TVar):
        return TVar(env.get(A.name, A.name))
    if isinstance(A, Club):
        return A
    if isinstance(A, Arrow):
        return Arrow(_rename_type(A.dom, env, used), _rename_type(A.cod, env, used))
    new = _pick(A.var, used)
    return Forall(new, _rename_type(A.body, {**env, A.var: new}, used))


def _rename_term(t, env, tenv, used, tused):
    if isinstance(t, Var):
        return Var(env.get(t.name, t.name))
    if isinstance(t, Star):
        return t
    if isinstance(t, Abs):
        new = _pick(t.var, used)
        return Abs(new, _rename_term(t.body, {**env, t.var: new}, tenv, used, tused))
    if isinstance(t, App):
        f = _rename_term(t.fun, env, tenv, used, tused)
        return App(f, _rename_term(t.arg, env, tenv, used, tused))
    if isinstance(t, TyAbs):
        new = _pick(t.tyvar, tused)
        return TyAbs(new, _rename_term(t.body, env, {**tenv, t.tyvar: new}, used, tused))
    w = _rename_type(subst_types(t.witness, {k: TVar(v) for k, v in tenv.items()}), {}, tused)
    return TyApp(_rename_term(t.fun, env, tenv, used, tused), w)


# ---------------------------------------------------------------- erasure

def erase_types(A: Type) -> SimpleType:
    """Collapse quantifiers: variables and ``#`` go to the base type."""
    if isinstance(A, (TVar, Club)):
        return O
    if isinstance(A, Arrow):
        return SArrow(erase_types(A.dom), erase_types(A.cod))
    return erase_types(A.body)


def erase_context(ctx: TypingContext) -> dict:
    return {x: erase_types(A) for x, A in ctx.items()}


def erase_term(t: Term) -> Term:
    """Drop type abstractions and applications, giving a Curry term."""
    if isinstance(t, (Var, Star)):
        return t
    if isinstance(t, Abs):
        return Abs(t.var, erase_term(t.body))
    if isinstance(t, App):
        return App(erase_term(t.fun), erase_term(t.arg))
    if isinstance(t, TyAbs):
        return erase_term(t.body)
    return erase_term(t.fun)


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<bigl>/\\|Λ)
  | (?P<arrow>->|=>|→|⇒)
  | (?P<lam>\\|λ)
  | (?P<forall>∀)
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
  | (?P<club>\#|♣)
  | (?P<star>\*|★)
  | (?P<punct>[().\[\],])
""", re.VERBOSE)


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if kind == "ident" and val == "forall":
                kind = "forall"
            elif kind == "punct":
                kind = val
            out.append((kind, val, pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = kind if len(kind) == 1 else kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def finish(self):
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])

    # types
    def type_(self) -> Type:
        kind = self.peek()[0]
        if kind == "forall":
            self.take()
            names = [self.take("ident")[1]]
            while self.peek()[0] == "ident":
                names.append(self.take()[1])
            self.take(".")
            return foralls(names, self.type_())
        left = self.type_atom()
        if self.peek()[0] == "arrow":
            self.take()
            return Arrow(left, self.type_())
        return left

    def type_atom(self) -> Type:
        kind, val, pos = self.peek()
        if kind == "ident":
            self.take()
            return TVar(val)
        if kind == "club":
            self.take()
            return CLUB
        if kind == "(":
            self.take()
            A = self.type_()
            self.take(")")
            return A
        raise ParseError(f"expected a type, found {val or 'end of input'!r}", pos)

    # terms
    def term(self, church: bool) -> Term:
        kind, val, pos = self.peek()
        if kind == "lam":
            self.take()
            names = [self.take("ident")[1]]
            while self.peek()[0] == "ident":
                names.append(self.take()[1])
            self.take(".")
            return lams(names, self.term(church))
        if kind == "bigl":
            if not church:
                raise ParseError("type abstraction in a Curry-style term", pos)
            self.take()
            names = [self.take("ident")[1]]
            while self.peek()[0] == "ident":
                names.append(self.take()[1])
            self.take(".")
            body = self.term(church)
            for n in reversed(names):
                body = TyAbs(n, body)
            return body
        head = self.term_atom(church)
        while True:
            kind, val, pos = self.peek()
            if kind in ("ident", "star", "("):
                head = App(head, self.term_atom(church))
            elif kind == "[":
                if not church:
                    raise ParseError("type application in a Curry-style term", pos)
                self.take()
                w = self.type_()
                self.take("]")
                head = TyApp(head, w)
            elif kind in ("lam", "bigl"):
                head = App(head, self.term(church))
                return head
            else:
                return head

    def term_atom(self, church: bool) -> Term:
        kind, val, pos = self.peek()
        if kind == "ident":
            self.take()
            return Var(val)
        if kind == "star":
            self.take()
            return STAR
        if kind == "(":
            self.take()
            t = self.term(church)
            self.take(")")
            return t
        raise ParseError(f"expected a term, found {val or 'end of input'!r}", pos)


def parse_type(text: str) -> Type:
    p = _Parser(text)
    A = p.type_()
    p.finish()
    return A


def parse_term(text: str, style: str = "curry") -> Term:
    if style not in ("curry", "church"):
        raise ValueError(f"unknown term style {style!r}")
    p = _Parser(text)
    t = p.term(style == "church")
    p.finish()
    return t


def parse_context(source) -> TypingContext:
    """Read a typing context from a JSON string or an already-decoded dict."""
    data = json.loads(source) if isinstance(source, str) else source
    if not isinstance(data, dict):
        raise ValueError("a typing context must be a JSON object")
    return {str(k): parse_type(v) for k, v in data.items()}


# ---------------------------------------------------------------- printing

def show_type(A: Type) -> str:
    if isinstance(A, TVar):
        return A.name
    if isinstance(A, Club):
        return "#"
    if isinstance(A, Arrow):
        dom = show_type(A.dom)
        if isinstance(A.dom, (Arrow, Forall)):
            dom = f"({dom})"
        return f"{dom} -> {show_type(A.cod)}"
    names, body = split_prefix(A)
    return f"forall {' '.join(names)}. {show_type(body)}"


def show_simple(s: SimpleType) -> str:
    if isinstance(s, Base):
        return "o"
    dom = show_simple(s.dom)
    if isinstance(s.dom, SArrow):
        dom = f"({dom})"
    return f"{dom} -> {show_simple(s.cod)}"


def show_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Star):
        return "*"
    if isinstance(t, Abs):
        names = []
        while isinstance(t, Abs):
            names.append(t.var)
            t = t.body
        return f"\\{' '.join(names)}. {show_term(t)}"
    if isinstance(t, TyAbs):
        return f"/\\{t.tyvar}. {show_term(t.body)}"
    # application spine
    spine = []
    while isinstance(t, (App, TyApp)):
        spine.append(t)
        t = t.fun
    head = show_term(t)
    if isinstance(t, (Abs, TyAbs)):
        head = f"({head})"
    parts = [head]
    for node in reversed(spine):
        if isinstance(node, TyApp):
            parts.append(f"[{show_type(node.witness)}]")
        else:
            a = show_term(node.arg)
            if isinstance(node.arg, (App, TyApp, Abs, TyAbs)):
                a = f"({a})"
            parts.append(a)
    return " ".join(parts)


def show_context(ctx: TypingContext) -> dict:
    return {x: show_type(A) for x, A in ctx.items()}
