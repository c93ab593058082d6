"""Unification over type schemes with sequence and projection variables.

The language has three sorts.  Sequence expressions denote finite lists of
type variables: a literal ``<X1 .. Xn>``, a sequence variable ``a`` or a
projection-variable application ``alpha a1 .. an``.  Star expressions
denote types: a type variable, the l-th element ``pi^l`` of a sequence,
a metavariable application ``F s1 .. sn`` or an arrow between quantified
expressions ``forall a. phi``.

A problem is decided in four stages: arrow/arrow equations are split
(normal form), a first-order skeleton is unified to detect variable cycles,
metavariables forced into arrow shape are expanded, and the remaining
arrow-free problem is solved by bounded search over the four elementary
assignments (projection or constant, for projection variables and for
metavariables).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple, Union

from .fou import (
    ClashFailure, CycleFailure, FoArrow, FoConst, FoProblem, FoVar, fo_unify,
)
from .syntax import (
    CLUB, Arrow, Forall, TVar, Type, alpha_eq, foralls, fresh_name,
)

CLUB_NAME = "#"


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class LitSeq:
    vars: Tuple[str, ...]


@dataclass(frozen=True)
class SeqVar:
    name: str


@dataclass(frozen=True)
class ProjApp:
    var: str
    args: Tuple[SeqVar, ...]


SeqExpr = Union[LitSeq, SeqVar, ProjApp]


@dataclass(frozen=True)
class TVarE:
    name: str


@dataclass(frozen=True)
class Pi:
    index: int
    of: SeqExpr

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("projection indices start at 1")


@dataclass(frozen=True)
class MetaApp:
    var: str
    args: Tuple[SeqExpr, ...]


@dataclass(frozen=True)
class QType:
    binder: SeqVar
    body: "StarExpr"


@dataclass(frozen=True)
class ArrowE:
    left: QType
    right: QType


StarExpr = Union[TVarE, Pi, MetaApp, ArrowE]


@dataclass(frozen=True)
class ArityLink:
    """(alpha : a) -- the projection variable has as many components as a."""
    proj: str
    seq: str


@dataclass(frozen=True)
class LengthPin:
    """(a : k) -- the sequence variable has length k."""
    seq: str
    length: int


Constraint = Union[ArityLink, LengthPin]


@dataclass(frozen=True)
class Expansion:
    """Record of a metavariable split into an arrow of two fresh ones."""
    var: str
    arity: int
    left: str
    right: str
    left_binder: str
    right_binder: str


@dataclass(frozen=True)
class UnifProblem:
    equations: Tuple[Tuple[StarExpr, StarExpr], ...] = ()
    constraints: Tuple[Constraint, ...] = ()
    seq_vars: Tuple[str, ...] = ()
    proj_vars: Dict[str, int] = field(default_factory=dict)
    meta_vars: Dict[str, int] = field(default_factory=dict)
    # bookkeeping from normalization and arrow elimination
    expansions: Tuple[Expansion, ...] = ()
    aliases: Dict[str, str] = field(default_factory=dict)


# ---------------------------------------------------------------- substitutions

@dataclass(frozen=True)
class ConstVar:
    name: str


@dataclass(frozen=True)
class ProjOf:
    arg: int       # 1-based argument index j
    pos: int       # 1-based position l


@dataclass(frozen=True)
class Rho:
    """pi^pos(rho_arg) inside a scheme body."""
    arg: int
    pos: int


@dataclass(frozen=True)
class Scheme:
    arity: int
    body: object   # a Type whose leaves may also be Rho


@dataclass(frozen=True)
class UnifSubstitution:
    seq_len: Dict[str, int]
    seq_names: Dict[str, Tuple[str, ...]]
    proj: Dict[str, Tuple[Union[ConstVar, ProjOf], ...]]
    meta: Dict[str, Scheme]


@dataclass(frozen=True)
class Unifier:
    substitution: UnifSubstitution


@dataclass(frozen=True)
class NoSolution:
    reason: str          # "Cycle" | "ArrowClash" | "Exhausted"
    detail: str = ""


SolveOutcome = Union[Unifier, NoSolution]


class InvalidSubstitution(ValueError):
    pass


# ---------------------------------------------------------------- printing

def show_seq(s: SeqExpr) -> str:
    if isinstance(s, LitSeq):
        return "<" + " ".join(s.vars) + ">"
    if isinstance(s, SeqVar):
        return s.name
    return "(" + " ".join([s.var] + [a.name for a in s.args]) + ")"


def show_star(e: StarExpr) -> str:
    if isinstance(e, TVarE):
        return e.name
    if isinstance(e, Pi):
        return f"pi{e.index}({show_seq(e.of)})"
    if isinstance(e, MetaApp):
        if not e.args:
            return e.var
        return f"{e.var}(" + ", ".join(show_seq(a) for a in e.args) + ")"
    return f"({show_q(e.left)}) -> ({show_q(e.right)})"


def show_q(q: QType) -> str:
    return f"forall {q.binder.name}. {show_star(q.body)}"


def show_equation(eq) -> str:
    return f"{show_star(eq[0])} = {show_star(eq[1])}"


def show_constraint(c: Constraint) -> str:
    if isinstance(c, ArityLink):
        return f"({c.proj} : {c.seq})"
    return f"({c.seq} : {c.length})"


def show_problem(p: UnifProblem) -> str:
    lines = [show_equation(eq) for eq in p.equations]
    lines += [show_constraint(c) for c in p.constraints]
    return "\n".join(lines)


# ---------------------------------------------------------------- traversal

def seq_children(s: SeqExpr):
    if isinstance(s, ProjApp):
        return list(s.args)
    return []


def star_subexprs(e):
    """Yield every star/seq/q-expression inside e, e included."""
    stack = [e]
    while stack:
        cur = stack.pop()
        yield cur
        if isinstance(cur, Pi):
            stack.append(cur.of)
        elif isinstance(cur, MetaApp):
            stack.extend(cur.args)
        elif isinstance(cur, ArrowE):
            stack.append(cur.left)
            stack.append(cur.right)
        elif isinstance(cur, QType):
            stack.append(cur.binder)
            stack.append(cur.body)
        elif isinstance(cur, ProjApp):
            stack.extend(cur.args)


def problem_subexprs(p: UnifProblem):
    for l, r in p.equations:
        yield from star_subexprs(l)
        yield from star_subexprs(r)


def deg(p: UnifProblem, alpha: str) -> int:
    """Largest l such that pi^l(alpha ...) occurs in the equations."""
    best = 0
    for e in problem_subexprs(p):
        if isinstance(e, Pi) and isinstance(e.of, ProjApp) and e.of.var == alpha:
            best = max(best, e.index)
    return best


def degrees(p: UnifProblem) -> Dict[str, int]:
    """deg for every projection variable in one pass."""
    out = {alpha: 0 for alpha in p.proj_vars}
    for e in problem_subexprs(p):
        if isinstance(e, Pi) and isinstance(e.of, ProjApp):
            out[e.of.var] = max(out.get(e.of.var, 0), e.index)
    return out


def constants_of(p: UnifProblem) -> List[str]:
    """Concrete type variable names of the problem, in first-occurrence order."""
    seen: List[str] = []
    for e in problem_subexprs(p):
        names = []
        if isinstance(e, TVarE):
            names = [e.name]
        elif isinstance(e, LitSeq):
            names = list(e.vars)
        for n in names:
            if n not in seen:
                seen.append(n)
    return seen


def declare(equations, constraints=(), seq_vars=(), proj_vars=None, meta_vars=None) -> UnifProblem:
    """Build a problem, inferring undeclared variables and arities from use."""
    seqs = list(seq_vars)
    projs = dict(proj_vars or {})
    metas = dict(meta_vars or {})
    eqs = tuple((l, r) for l, r in equations)
    for l, r in eqs:
        for e in itertools.chain(star_subexprs(l), star_subexprs(r)):
            if isinstance(e, SeqVar) and e.name not in seqs:
                seqs.append(e.name)
            elif isinstance(e, ProjApp):
                projs.setdefault(e.var, len(e.args))
            elif isinstance(e, MetaApp):
                metas.setdefault(e.var, len(e.args))
    for c in constraints:
        if c.seq not in seqs:
            seqs.append(c.seq)
        if isinstance(c, ArityLink):
            projs.setdefault(c.proj, 0)
    p = UnifProblem(eqs, tuple(constraints), tuple(seqs), projs, metas)
    check_well_formed(p)
    return p


def check_well_formed(p: UnifProblem):
    for e in problem_subexprs(p):
        if isinstance(e, ProjApp):
            if e.var not in p.proj_vars:
                raise ValueError(f"undeclared projection variable {e.var}")
            if p.proj_vars[e.var] != len(e.args):
                raise ValueError(f"{e.var} applied to {len(e.args)} arguments, "
                                 f"declared arity {p.proj_vars[e.var]}")
        elif isinstance(e, MetaApp):
            if e.var not in p.meta_vars:
                raise ValueError(f"undeclared metavariable {e.var}")
            if p.meta_vars[e.var] != len(e.args):
                raise ValueError(f"{e.var} applied to {len(e.args)} arguments, "
                                 f"declared arity {p.meta_vars[e.var]}")
        elif isinstance(e, SeqVar) and e.name not in p.seq_vars:
            raise ValueError(f"undeclared sequence variable {e.name}")


# ---------------------------------------------------------------- rewriting

def _rename_seq_in(e, ren: dict):
    if isinstance(e, SeqVar):
        return SeqVar(ren.get(e.name, e.name))
    if isinstance(e, LitSeq):
        return e
    if isinstance(e, ProjApp):
        return ProjApp(e.var, tuple(_rename_seq_in(a, ren) for a in e.args))
    if isinstance(e, TVarE):
        return e
    if isinstance(e, Pi):
        return Pi(e.index, _rename_seq_in(e.of, ren))
    if isinstance(e, MetaApp):
        return MetaApp(e.var, tuple(_rename_seq_in(a, ren) for a in e.args))
    if isinstance(e, ArrowE):
        return ArrowE(_rename_seq_in(e.left, ren), _rename_seq_in(e.right, ren))
    return QType(_rename_seq_in(e.binder, ren), _rename_seq_in(e.body, ren))


def _rename_constraint(c, ren: dict):
    if isinstance(c, ArityLink):
        return ArityLink(c.proj, ren.get(c.seq, c.seq))
    return LengthPin(ren.get(c.seq, c.seq), c.length)


def _dedupe(items):
    out = []
    seen = set()
    for it in items:
        if it not in seen:
            seen.add(it)
            out.append(it)
    return tuple(out)


def resolve_alias(aliases: dict, name: str) -> str:
    seen = set()
    while name in aliases and name not in seen:
        seen.add(name)
        name = aliases[name]
    return name


def extend_equations(equations, a: str, frozen=frozenset()):
    """Append the sequence variable ``a`` to every projection-variable and
    metavariable application (the ``Ua`` operation).

    Metavariables listed in ``frozen`` are left untouched; the constraint
    generator uses this for the type schemes of variables bound outside the
    current subterm.
    """
    tail = SeqVar(a)

    def go(e):
        if isinstance(e, (LitSeq, SeqVar, TVarE)):
            return e
        if isinstance(e, ProjApp):
            return ProjApp(e.var, e.args + (tail,))
        if isinstance(e, Pi):
            return Pi(e.index, go(e.of))
        if isinstance(e, MetaApp):
            args = tuple(go(x) for x in e.args)
            if e.var in frozen:
                return MetaApp(e.var, args)
            return MetaApp(e.var, args + (tail,))
        if isinstance(e, ArrowE):
            return ArrowE(go(e.left), go(e.right))
        return QType(e.binder, go(e.body))

    return [(go(l), go(r)) for l, r in equations]


# ---------------------------------------------------------------- normal form

def normalize_problem(p: UnifProblem) -> UnifProblem:
    """Split every arrow/arrow equation, renaming right binders to left ones.

    Renamings are collected in a union-find and applied once at the end;
    since they only touch sequence-variable names, the result is the same
    as renaming after every split.
    """
    parent: Dict[str, str] = {}

    def find(x: str) -> str:
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    out = []
    work = list(reversed(p.equations))
    while work:
        l, r = work.pop()
        if isinstance(l, ArrowE) and isinstance(r, ArrowE):
            for keep, drop in ((l.left.binder.name, r.left.binder.name),
                               (l.right.binder.name, r.right.binder.name)):
                k, d = find(keep), find(drop)
                if k != d:
                    parent[d] = k
            work.append((l.right.body, r.right.body))
            work.append((l.left.body, r.left.body))
        else:
            out.append((l, r))
    ren = {x: find(x) for x in list(parent)}
    ren = {x: y for x, y in ren.items() if x != y}
    aliases = dict(p.aliases)
    aliases.update(ren)
    if ren:
        out = [(_rename_seq_in(x, ren), _rename_seq_in(y, ren)) for x, y in out]
    cons = [_rename_constraint(c, ren) for c in p.constraints]
    out = [(l, r) for l, r in out if l != r]
    return replace(p, equations=tuple(out), constraints=_dedupe(cons), aliases=aliases)


# ---------------------------------------------------------------- cycle check

def _skeleton(e) -> object:
    if isinstance(e, (TVarE, Pi)):
        return FoConst("c")
    if isinstance(e, MetaApp):
        return FoVar("x_" + e.var)
    if isinstance(e, QType):
        return _skeleton(e.body)
    return FoArrow(_skeleton(e.left), _skeleton(e.right))


def build_fo_skeleton(p: UnifProblem) -> FoProblem:
    """First-order image: sequences and concrete variables become the
    constant c, each metavariable application a first-order variable,
    and quantifiers are dropped."""
    return FoProblem.of((_skeleton(l), _skeleton(r)) for l, r in p.equations)


def phase1_cycle_check(p: UnifProblem):
    """None when the skeleton unifies, otherwise a NoSolution.

    An occurs-check failure of the skeleton is a variable cycle.  A
    constructor clash in the skeleton also rules out every unifier (a
    unifier induces a skeleton unifier) and is reported as ArrowClash.
    """
    res = fo_unify(build_fo_skeleton(p))
    if isinstance(res, CycleFailure):
        return NoSolution("Cycle", f"{res.var} occurs in its own skeleton")
    if isinstance(res, ClashFailure):
        return NoSolution("ArrowClash", "skeleton clash between a variable and an arrow")
    return None


# ---------------------------------------------------------------- arrow elimination

class _Names:
    def __init__(self, used):
        self.used = set(used)

    def fresh(self, base: str) -> str:
        name = fresh_name(base, self.used) if base in self.used else base
        self.used.add(name)
        return name


def _all_names(p: UnifProblem) -> set:
    names = set(p.seq_vars) | set(p.proj_vars) | set(p.meta_vars) | set(p.aliases)
    for ex in p.expansions:
        names |= {ex.var, ex.left, ex.right, ex.left_binder, ex.right_binder}
    return names


def _expand_metas(e, makers: dict):
    if isinstance(e, MetaApp):
        mk = makers.get(e.var)
        return mk(e.args) if mk else e
    if isinstance(e, ArrowE):
        return ArrowE(_expand_metas(e.left, makers), _expand_metas(e.right, makers))
    if isinstance(e, QType):
        return QType(e.binder, _expand_metas(e.body, makers))
    return e


def _has_arrow(p: UnifProblem) -> bool:
    return any(isinstance(l, ArrowE) or isinstance(r, ArrowE) for l, r in p.equations)


def eliminate_arrows(p: UnifProblem, max_rounds: int = 100000):
    """Reduce an acyclic normalized problem to a simple one.

    Returns the simple problem or NoSolution("ArrowClash").  A metavariable
    equated with an arrow is replaced everywhere by an arrow between two
    fresh metavariables of one more argument, bound by fresh sequence
    variables; renormalizing then splits the resulting equations.
    """
    p = normalize_problem(p)
    names = _Names(_all_names(p))
    for _ in range(max_rounds):
        targets: List[str] = []
        for l, r in p.equations:
            if isinstance(r, ArrowE) and not isinstance(l, ArrowE):
                l, r = r, l
            if isinstance(l, ArrowE) and not isinstance(r, ArrowE):
                if isinstance(r, (TVarE, Pi)):
                    return NoSolution("ArrowClash", f"{show_star(r)} equated with an arrow")
                if r.var not in targets:
                    targets.append(r.var)
        if not targets:
            return p
        metas = dict(p.meta_vars)
        seqs = list(p.seq_vars)
        exps = list(p.expansions)
        makers = {}
        for target in targets:
            n = p.meta_vars[target]
            f1, f2 = names.fresh(target + "1"), names.fresh(target + "2")
            c, d = names.fresh("c_" + target), names.fresh("d_" + target)
            metas[f1] = metas[f2] = n + 1
            seqs += [c, d]
            exps.append(Expansion(target, n, f1, f2, c, d))

            def make(args, f1=f1, f2=f2, c=c, d=d):
                return ArrowE(QType(SeqVar(c), MetaApp(f1, tuple(args) + (SeqVar(c),))),
                              QType(SeqVar(d), MetaApp(f2, tuple(args) + (SeqVar(d),))))
            makers[target] = make
        eqs = tuple((_expand_metas(l, makers), _expand_metas(r, makers)) for l, r in p.equations)
        p = replace(p, equations=eqs, meta_vars=metas, seq_vars=tuple(seqs),
                    expansions=tuple(exps))
        p = normalize_problem(p)
    raise RuntimeError("arrow elimination did not terminate")


# ---------------------------------------------------------------- applying substitutions

def _seq_value(S: UnifSubstitution, s: SeqExpr) -> Tuple[str, ...]:
    if isinstance(s, LitSeq):
        return s.vars
    if isinstance(s, SeqVar):
        if s.name not in S.seq_names:
            raise InvalidSubstitution(f"no value for sequence variable {s.name}")
        return S.seq_names[s.name]
    comps = S.proj.get(s.var)
    if comps is None:
        raise InvalidSubstitution(f"no value for projection variable {s.var}")
    out = []
    for c in comps:
        if isinstance(c, ConstVar):
            out.append(c.name)
        else:
            if c.arg > len(s.args):
                raise InvalidSubstitution(f"{s.var} projects a missing argument")
            arg = _seq_value(S, s.args[c.arg - 1])
            if c.pos > len(arg):
                raise InvalidSubstitution(f"{s.var} projects past the end of {show_seq(s.args[c.arg - 1])}")
            out.append(arg[c.pos - 1])
    return tuple(out)


def _tv(name: str) -> Type:
    return CLUB if name == CLUB_NAME else TVar(name)


def instantiate_scheme(body, args: List[Tuple[str, ...]]) -> Type:
    """Replace pi^l(rho_i) by the l-th name of the i-th argument, renaming
    scheme binders that would capture an incoming name."""
    incoming = set(itertools.chain.from_iterable(args))

    def go(b, env):
        if isinstance(b, Rho):
            if b.arg > len(args) or b.pos > len(args[b.arg - 1]):
                raise InvalidSubstitution("scheme projects past the end of an argument")
            return _tv(args[b.arg - 1][b.pos - 1])
        if isinstance(b, TVar):
            return TVar(env.get(b.name, b.name)) if b.name != CLUB_NAME else CLUB
        if isinstance(b, Arrow):
            return Arrow(go(b.dom, env), go(b.cod, env))
        if isinstance(b, Forall):
            if b.var in incoming:
                new = fresh_name(b.var, incoming | _scheme_names(b) | set(env.values()))
                return Forall(new, go(b.body, {**env, b.var: new}))
            return Forall(b.var, go(b.body, env))
        return b

    return go(body, {})


def _scheme_names(b) -> set:
    if isinstance(b, TVar):
        return {b.name}
    if isinstance(b, Arrow):
        return _scheme_names(b.dom) | _scheme_names(b.cod)
    if isinstance(b, Forall):
        return {b.var} | _scheme_names(b.body)
    return set()


def apply_star(S: UnifSubstitution, e) -> Type:
    if isinstance(e, TVarE):
        return _tv(e.name)
    if isinstance(e, Pi):
        seq = _seq_value(S, e.of)
        if e.index > len(seq):
            raise InvalidSubstitution(f"pi{e.index} past the end of {show_seq(e.of)}")
        return _tv(seq[e.index - 1])
    if isinstance(e, MetaApp):
        sch = S.meta.get(e.var)
        if sch is None:
            raise InvalidSubstitution(f"no value for metavariable {e.var}")
        if sch.arity != len(e.args):
            raise InvalidSubstitution(f"arity mismatch for {e.var}")
        return instantiate_scheme(sch.body, [_seq_value(S, a) for a in e.args])
    if isinstance(e, ArrowE):
        return Arrow(apply_star(S, e.left), apply_star(S, e.right))
    if isinstance(e, QType):
        return foralls(_seq_value(S, e.binder), apply_star(S, e.body))
    raise TypeError(f"not an expression: {e!r}")


def verify_unifier(p: UnifProblem, S: UnifSubstitution) -> bool:
    """Check that S equates both sides of every equation up to renaming of
    bound variables and satisfies every constraint."""
    try:
        consts = set(constants_of(p))
        seen_names = set()
        for a in p.seq_vars:
            names = S.seq_names.get(a)
            if names is None or len(names) != S.seq_len.get(a):
                return False
            if len(set(names)) != len(names) or seen_names & set(names) or consts & set(names):
                return False
            seen_names |= set(names)
        degs = degrees(p)
        for alpha in p.proj_vars:
            comps = S.proj.get(alpha)
            if comps is None or len(comps) < degs[alpha]:
                return False
        for c in p.constraints:
            if isinstance(c, LengthPin):
                if S.seq_len.get(c.seq) != c.length:
                    return False
            elif len(S.proj.get(c.proj, ())) != S.seq_len.get(c.seq):
                return False
        for l, r in p.equations:
            if not alpha_eq(apply_star(S, l), apply_star(S, r)):
                return False
        return True
    except InvalidSubstitution:
        return False


# ---------------------------------------------------------------- bounded search

@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the bounded search; the defaults follow the K+N bound."""
    bound: Optional[int] = None          # override for K+N
    fresh_base: str = "W"
    max_nodes: int = 2_000_000


class _Exhausted(Exception):
    pass


def search_bound(p: UnifProblem) -> Tuple[int, int]:
    """(K, N): largest literal length / projection index / pinned length, and
    the number of equations."""
    K = 0
    for e in problem_subexprs(p):
        if isinstance(e, LitSeq):
            K = max(K, len(e.vars))
        elif isinstance(e, Pi):
            K = max(K, e.index)
    for c in p.constraints:
        if isinstance(c, LengthPin):
            K = max(K, c.length)
    return K, len(p.equations)


class _Lengths:
    """Lower bounds on lengths, grouped by arity links, checked against pins."""

    def __init__(self, p: UnifProblem):
        self.parent = {}
        for a in p.seq_vars:
            self.parent[("s", a)] = ("s", a)
        for al in p.proj_vars:
            self.parent[("p", al)] = ("p", al)
        for c in p.constraints:
            if isinstance(c, ArityLink):
                self._union(("p", c.proj), ("s", c.seq))
        self.pin = {}
        self.ok = True
        for c in p.constraints:
            if isinstance(c, LengthPin):
                r = self.find(("s", c.seq))
                if r in self.pin and self.pin[r] != c.length:
                    self.ok = False
                self.pin[r] = c.length
        self.low = {}

    def find(self, k):
        self.parent.setdefault(k, k)
        while self.parent[k] != k:
            self.parent[k] = self.parent[self.parent[k]]
            k = self.parent[k]
        return k

    def _union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def bump(self, key, value: int, trail: list) -> bool:
        r = self.find(key)
        if self.low.get(r, 0) >= value:
            return True
        if r in self.pin and value > self.pin[r]:
            return False
        trail.append((r, self.low.get(r)))
        self.low[r] = value
        return True

    def undo(self, trail: list, mark: int):
        while len(trail) > mark:
            r, old = trail.pop()
            if old is None:
                self.low.pop(r, None)
            else:
                self.low[r] = old

    def value(self, key) -> int:
        r = self.find(key)
        if r in self.pin:
            return self.pin[r]
        return self.low.get(r, 0)


class _Solver:
    def __init__(self, p: UnifProblem, bound: int, config: SearchConfig, avoid=frozenset()):
        self.p = p
        self.bound = bound
        self.config = config
        self.nodes = 0
        consts = constants_of(p)
        used = set(consts) | _all_names(p) | set(avoid)
        self.avoid = set(avoid)
        self.fresh_const = fresh_name(config.fresh_base, used) if config.fresh_base in used \
            else config.fresh_base
        self.pool = consts + [self.fresh_const]
        self.lengths = _Lengths(p)
        self.trail: list = []
        self.meta: Dict[str, tuple] = {}
        self.projc: Dict[Tuple[str, int], tuple] = {}
        # every application of each variable in the simple problem
        self.proj_apps: Dict[str, set] = {}
        self.meta_apps: Dict[str, set] = {}
        for e in problem_subexprs(p):
            if isinstance(e, ProjApp):
                self.proj_apps.setdefault(e.var, set()).add(e.args)
            elif isinstance(e, MetaApp):
                self.meta_apps.setdefault(e.var, set()).add(e.args)

    # --- lengths -------------------------------------------------------
    def _need(self, s: SeqExpr, q: int) -> bool:
        """Record that position q of s is used; False if impossible."""
        if isinstance(s, LitSeq):
            return q <= len(s.vars)
        if isinstance(s, SeqVar):
            return self.lengths.bump(("s", s.name), q, self.trail)
        return self.lengths.bump(("p", s.var), q, self.trail)

    def initial_lengths(self) -> bool:
        if not self.lengths.ok:
            return False
        for e in problem_subexprs(self.p):
            if isinstance(e, Pi) and not self._need(e.of, e.index):
                return False
        return True

    # --- rewriting -----------------------------------------------------
    def _proj(self, s: SeqExpr, q: int):
        """pi^q(s), simplified; None when out of range."""
        if isinstance(s, LitSeq):
            return TVarE(s.vars[q - 1]) if q <= len(s.vars) else None
        if isinstance(s, ProjApp):
            c = self.projc.get((s.var, q))
            if c is not None:
                if c[0] == "const":
                    return TVarE(c[1])
                return self._proj(s.args[c[1] - 1], c[2])
        return Pi(q, s)

    def simplify(self, e):
        if isinstance(e, TVarE):
            return e
        if isinstance(e, Pi):
            return self._proj(e.of, e.index)
        c = self.meta.get(e.var)
        if c is None:
            return e
        if c[0] == "const":
            return TVarE(c[1])
        return self._proj(e.args[c[1] - 1], c[2])

    @staticmethod
    def flex(e) -> bool:
        return isinstance(e, MetaApp) or (isinstance(e, Pi) and isinstance(e.of, ProjApp))

    # --- choices -------------------------------------------------------
    def options(self, e, other):
        """Candidate assignments for the head of flex expression e."""
        rigid = not self.flex(other)
        out = []
        if isinstance(e, MetaApp):
            direct, indirect = [], []
            for j, arg in enumerate(e.args, start=1):
                for q in range(1, self.bound + 1):
                    pr = self._proj(arg, q)
                    if pr is None or not self._fits(pr, other, rigid):
                        continue
                    opt = ("meta", e.var, ("proj", j, q))
                    (indirect if isinstance(arg, ProjApp) else direct).append(opt)
            out = direct + indirect
            for X in self.pool:
                if rigid and other != TVarE(X):
                    continue
                out.append(("meta", e.var, ("const", X)))
        else:
            alpha, l = e.of.var, e.index
            for j, arg in enumerate(e.of.args, start=1):
                if rigid and not (isinstance(other, Pi) and other.of == arg):
                    continue
                for q in range(1, self.bound + 1):
                    if rigid and other.index != q:
                        continue
                    out.append(("proj", (alpha, l), ("proj", j, q)))
            for X in self.pool:
                if rigid and other != TVarE(X):
                    continue
                out.append(("proj", (alpha, l), ("const", X)))
        return out

    def _fits(self, pr, other, rigid: bool) -> bool:
        """Could pr (a projection just produced) still equal the other side?"""
        if not rigid:
            return True
        if not self.flex(pr):
            return pr == other
        if isinstance(pr, Pi) and isinstance(pr.of, ProjApp) and isinstance(other, Pi):
            return other.of in pr.of.args
        return True

    def assign(self, opt) -> bool:
        kind, key, val = opt
        if kind == "meta":
            self.meta[key] = val
            if val[0] == "proj":
                _, j, q = val
                for args in self.meta_apps.get(key, ()):
                    if not self._need(args[j - 1], q):
                        return False
        else:
            alpha, l = key
            self.projc[key] = val
            if not self.lengths.bump(("p", alpha), l, self.trail):
                return False
            if val[0] == "proj":
                _, j, q = val
                for args in self.proj_apps.get(alpha, ()):
                    if not self._need(args[j - 1], q):
                        return False
        return True

    def unassign(self, opt):
        kind, key, _ = opt
        if kind == "meta":
            del self.meta[key]
        else:
            del self.projc[key]

    # --- main loop -----------------------------------------------------
    # Equations live in self.eqs; solved ones leave self.alive.  Every change
    # is logged in self.eqtrail so a failed branch can be rolled back.
    def _refresh(self, idxs) -> bool:
        for i in idxs:
            if i not in self.alive:
                continue
            l, r = self.eqs[i]
            l2, r2 = self.simplify(l), self.simplify(r)
            if l2 is None or r2 is None:
                return False
            for side in (l2, r2):
                if isinstance(side, Pi) and not self._need(side.of, side.index):
                    return False
            if l2 == r2:
                self.eqtrail.append((i, (l, r), True))
                self.alive.discard(i)
                continue
            if not self.flex(l2) and not self.flex(r2):
                return False   # distinct variables, distinct positions, or X = pi(a)
            if (l2, r2) != (l, r):
                self.eqtrail.append((i, (l, r), False))
                self.eqs[i] = (l2, r2)
        return True

    def _undo_eqs(self, mark: int):
        while len(self.eqtrail) > mark:
            i, old, killed = self.eqtrail.pop()
            self.eqs[i] = old
            if killed:
                self.alive.add(i)

    def pick(self):
        """Options of the flex-rigid equation with fewest choices, else of the
        first flex-flex equation."""
        best = None
        first_ff = None
        for i in sorted(self.alive):
            l, r = self.eqs[i]
            fl, fr = self.flex(l), self.flex(r)
            if fl and fr:
                if first_ff is None:
                    first_ff = (l, r)
                continue
            e, other = (l, r) if fl else (r, l)
            opts = self.options(e, other)
            if len(opts) <= 1:
                return opts
            if best is None or len(opts) < len(best):
                best = opts
        if best is not None:
            return best
        return self.options(*first_ff)

    @staticmethod
    def _key(opt) -> str:
        kind, key, _ = opt
        return "m:" + key if kind == "meta" else "p:" + key[0]

    def search(self) -> bool:
        self.nodes += 1
        if self.nodes > self.config.max_nodes:
            raise _Exhausted()
        if not self.alive:
            return True
        for opt in self.pick():
            m_len, m_eq = len(self.trail), len(self.eqtrail)
            if self.assign(opt) and self._refresh(sorted(self.occ.get(self._key(opt), ()))) \
                    and self.search():
                return True
            self.unassign(opt)
            self.lengths.undo(self.trail, m_len)
            self._undo_eqs(m_eq)
        return False

    def run(self) -> bool:
        if not self.initial_lengths():
            return False
        self.eqs = list(self.p.equations)
        self.alive = set(range(len(self.eqs)))
        self.eqtrail = []
        self.occ: Dict[str, set] = {}
        for i, (l, r) in enumerate(self.eqs):
            for e in itertools.chain(star_subexprs(l), star_subexprs(r)):
                if isinstance(e, MetaApp):
                    self.occ.setdefault("m:" + e.var, set()).add(i)
                elif isinstance(e, ProjApp):
                    self.occ.setdefault("p:" + e.var, set()).add(i)
        if not self._refresh(range(len(self.eqs))):
            return False
        return self.search()


def _scheme_of(val, arity: int) -> Scheme:
    if val[0] == "const":
        return Scheme(arity, _tv(val[1]))
    return Scheme(arity, Rho(val[1], val[2]))


def _substitute_rho_last(body, n: int, names: Tuple[str, ...]):
    """Turn pi^l(rho_{n+1}) into the bound name names[l-1]."""
    if isinstance(body, Rho):
        if body.arg == n + 1:
            if body.pos > len(names):
                raise InvalidSubstitution("scheme projects past a binder sequence")
            return TVar(names[body.pos - 1])
        return body
    if isinstance(body, Arrow):
        return Arrow(_substitute_rho_last(body.dom, n, names), _substitute_rho_last(body.cod, n, names))
    if isinstance(body, Forall):
        return Forall(body.var, _substitute_rho_last(body.body, n, names))
    return body


def _build_substitution(solver: _Solver, p: UnifProblem) -> UnifSubstitution:
    lengths = solver.lengths
    W = solver.fresh_const
    all_seq = list(p.seq_vars) + [a for a in p.aliases if a not in p.seq_vars]
    seq_len = {}
    for a in all_seq:
        seq_len[a] = lengths.value(("s", resolve_alias(p.aliases, a)))
    taken = set(solver.pool) | _all_names(p) | solver.avoid
    counter = itertools.count(1)
    seq_names = {}
    for a in all_seq:
        names = []
        for _ in range(seq_len[a]):
            while True:
                cand = f"V{next(counter)}"
                if cand not in taken:
                    break
            taken.add(cand)
            names.append(cand)
        seq_names[a] = tuple(names)
    proj = {}
    for alpha in p.proj_vars:
        k = lengths.value(("p", alpha))
        comps = []
        for j in range(1, k + 1):
            val = solver.projc.get((alpha, j))
            if val is None or val[0] == "const":
                comps.append(ConstVar(W if val is None else val[1]))
            else:
                comps.append(ProjOf(val[1], val[2]))
        proj[alpha] = tuple(comps)
    meta = {}
    for F, n in p.meta_vars.items():
        val = solver.meta.get(F)
        meta[F] = _scheme_of(val if val is not None else ("const", W), n)
    for ex in reversed(p.expansions):
        c = seq_names[ex.left_binder] if ex.left_binder in seq_names else ()
        d = seq_names[ex.right_binder] if ex.right_binder in seq_names else ()
        left = _substitute_rho_last(meta[ex.left].body, ex.arity, c)
        right = _substitute_rho_last(meta[ex.right].body, ex.arity, d)
        meta[ex.var] = Scheme(ex.arity, Arrow(foralls(c, left), foralls(d, right)))
    return UnifSubstitution(seq_len, seq_names, proj, meta)


def solve_simple(p: UnifProblem, config: SearchConfig = SearchConfig(),
                 avoid=frozenset()) -> SolveOutcome:
    """Bounded search for a unifier of an arrow-free problem.

    Projection indices are tried up to K, then up to K+N; the first
    successful branch in the fixed rule order wins.
    """
    if _has_arrow(p):
        raise ValueError("solve_simple expects a problem without arrows")
    K, N = search_bound(p)
    top = config.bound if config.bound is not None else K + N
    bounds = sorted({max(1, min(K, top)), max(1, top)})
    for b in bounds:
        solver = _Solver(p, b, config, avoid)
        try:
            found = solver.run()
        except _Exhausted:
            return NoSolution("Exhausted", "search node budget exceeded")
        if found:
            return Unifier(_build_substitution(solver, p))
    return NoSolution("Exhausted", f"no unifier with projection indices up to {top}")


def fat_unify(p: UnifProblem, config: SearchConfig = SearchConfig(),
              avoid=frozenset()) -> SolveOutcome:
    """Decide a problem: normalize, reject cycles, eliminate arrows, search.

    Names in ``avoid`` are never used for the fresh variables of a unifier.
    """
    norm = normalize_problem(p)
    bad = phase1_cycle_check(norm)
    if bad is not None:
        return bad
    simple = eliminate_arrows(norm)
    if isinstance(simple, NoSolution):
        return simple
    out = solve_simple(simple, config, avoid)
    if isinstance(out, Unifier):
        assert verify_unifier(p, out.substitution), "solver produced a non-unifier"
    return out


# ---------------------------------------------------------------- JSON

def seq_to_json(s: SeqExpr):
    if isinstance(s, LitSeq):
        return ["lit", list(s.vars)]
    if isinstance(s, SeqVar):
        return ["seq", s.name]
    return ["proj", s.var, [a.name for a in s.args]]


def seq_from_json(j) -> SeqExpr:
    tag = j[0]
    if tag == "lit":
        return LitSeq(tuple(j[1]))
    if tag == "seq":
        return SeqVar(j[1])
    if tag == "proj":
        return ProjApp(j[1], tuple(SeqVar(a) for a in j[2]))
    raise ValueError(f"unknown sequence expression tag {tag!r}")


def star_to_json(e):
    if isinstance(e, TVarE):
        return ["var", e.name]
    if isinstance(e, Pi):
        return ["pi", e.index, seq_to_json(e.of)]
    if isinstance(e, MetaApp):
        return ["app", e.var, [seq_to_json(a) for a in e.args]]
    if isinstance(e, ArrowE):
        return ["arrow", star_to_json(e.left), star_to_json(e.right)]
    return ["forall", e.binder.name, star_to_json(e.body)]


def star_from_json(j):
    tag = j[0]
    if tag == "var":
        return TVarE(j[1])
    if tag == "pi":
        return Pi(int(j[1]), seq_from_json(j[2]))
    if tag == "app":
        return MetaApp(j[1], tuple(seq_from_json(a) for a in j[2]))
    if tag == "arrow":
        return ArrowE(star_from_json(j[1]), star_from_json(j[2]))
    if tag == "forall":
        return QType(SeqVar(j[1]), star_from_json(j[2]))
    raise ValueError(f"unknown star expression tag {tag!r}")


def problem_to_json(p: UnifProblem) -> dict:
    cons = []
    for c in p.constraints:
        if isinstance(c, ArityLink):
            cons.append(["arity", c.proj, c.seq])
        else:
            cons.append(["length", c.seq, c.length])
    return {
        "seq_vars": list(p.seq_vars),
        "proj_vars": [{"name": k, "arity": v} for k, v in p.proj_vars.items()],
        "meta_vars": [{"name": k, "arity": v} for k, v in p.meta_vars.items()],
        "equations": [[star_to_json(l), star_to_json(r)] for l, r in p.equations],
        "constraints": cons,
    }


def problem_from_json(data: dict) -> UnifProblem:
    cons = []
    for c in data.get("constraints", []):
        if c[0] == "arity":
            cons.append(ArityLink(c[1], c[2]))
        elif c[0] == "length":
            cons.append(LengthPin(c[1], int(c[2])))
        else:
            raise ValueError(f"unknown constraint tag {c[0]!r}")
    eqs = [(star_from_json(l), star_from_json(r)) for l, r in data.get("equations", [])]
    return declare(
        eqs, cons,
        seq_vars=data.get("seq_vars", []),
        proj_vars={d["name"]: int(d["arity"]) for d in data.get("proj_vars", [])},
        meta_vars={d["name"]: int(d["arity"]) for d in data.get("meta_vars", [])},
    )


def scheme_to_text(s: Scheme) -> str:
    from .syntax import show_type

    def conv(b):
        if isinstance(b, Rho):
            return TVar(f"pi{b.pos}(r{b.arg})")
        if isinstance(b, Arrow):
            return Arrow(conv(b.dom), conv(b.cod))
        if isinstance(b, Forall):
            return Forall(b.var, conv(b.body))
        return b

    params = " ".join(f"r{i}" for i in range(1, s.arity + 1))
    body = show_type(conv(s.body))
    return f"\\{params}. {body}" if params else body


def substitution_to_json(S: UnifSubstitution) -> dict:
    proj = {}
    for k, comps in S.proj.items():
        proj[k] = [c.name if isinstance(c, ConstVar) else f"pi{c.pos}(x{c.arg})" for c in comps]
    return {
        "seq": {k: list(v) for k, v in S.seq_names.items()},
        "proj": proj,
        "meta": {k: scheme_to_text(v) for k, v in S.meta.items()},
    }


def outcome_to_json(out: SolveOutcome) -> dict:
    if isinstance(out, Unifier):
        return {"result": "yes", "unifier": substitution_to_json(out.substitution)}
    return {"result": "no", "reason": out.reason, "detail": out.detail}
