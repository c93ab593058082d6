"""Command-line front end.

Every command prints one JSON verdict on stdout:
``{"result": "yes" | "no" | "error", "reason": ..., "payload": {...}, "version": ...}``
and exits 0 for yes, 1 for no, 2 for errors.  Diagnostics go to stderr
unless ``--quiet`` is given.  Term, type, context and formula arguments
accept either inline text or a path to a file holding it.
"""
from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import __version__
from . import equivalence as eqv
from . import fat_unify as fu
from .encodings import (
    inj, io_plus_context, io_times_context, is_witness_atomic, pair, prod_type, sum_type,
)
from .reduction import FuelExhausted, beta_normalize, eta_reduce
from .syntax import (
    ParseError, erase_term, parse_context, parse_term, parse_type, show_term,
    show_type,
)
from .typecheck import Accepted, check, derivation_to_json, typable

EXIT = {"yes": 0, "no": 1, "error": 2}


class _Fail(Exception):
    pass


def _text(arg: str) -> str:
    """Inline text, or the contents of the file the argument names."""
    if arg is not None and os.path.isfile(arg):
        return Path(arg).read_text().strip()
    return arg


def _term(arg: str, style: str = "curry"):
    text = _text(arg)
    try:
        return parse_term(text, style)
    except ParseError:
        if style == "curry":
            return parse_term(text, "church")
        raise


def _ctx(arg):
    if not arg:
        return {}
    return parse_context(_text(arg))


def _emit(ctx: click.Context, result: str, reason: str = "", payload=None):
    out = {"result": result, "reason": reason, "payload": payload or {}, "version": __version__}
    click.echo(json.dumps(out, indent=2, sort_keys=True, ensure_ascii=False))
    ctx.exit(EXIT[result])


def _note(ctx: click.Context, msg: str):
    if not ctx.find_root().params.get("quiet"):
        click.echo(msg, err=True)


def _guard(fn):
    """Turn library errors into error verdicts (exit 2)."""
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return fn(*args, **kwargs)
        except (ParseError, FuelExhausted, ValueError, KeyError, _Fail) as e:
            _note(ctx, f"error: {e}")
            _emit(ctx, "error", type(e).__name__, {"message": str(e)})
    return wrapper


@click.group()
@click.option("--quiet", is_flag=True, help="Suppress diagnostics on stderr.")
@click.version_option(__version__)
def main(quiet):
    """Atomic System F: checking, unification, encodings and equivalence."""


# ---------------------------------------------------------------- checking

def _check_one(job):
    ctx_text, term_text, type_text = job
    ctx = parse_context(ctx_text) if ctx_text else {}
    t = parse_term(term_text)
    A = parse_type(type_text)
    r = check(ctx, t, A)
    if isinstance(r, Accepted):
        return {"result": "yes", "derivation": derivation_to_json(r.derivation)}
    return {"result": "no", "reason": r.reason, "detail": r.detail}


@main.command("check")
@click.option("--ctx", "ctx_arg", default=None, help="Typing context (JSON text or file).")
@click.option("--term", "term_arg", required=True,
              help="Curry term (text or file); a directory checks every *.lam in it.")
@click.option("--type", "type_arg", required=True, help="Type to check against.")
@click.option("--jobs", default=1, show_default=True, help="Parallel workers for directory input.")
@click.pass_context
@_guard
def check_cmd(ctx, ctx_arg, term_arg, type_arg, jobs):
    """Decide CTX |- TERM : TYPE."""
    ctx_text = _text(ctx_arg) if ctx_arg else None
    type_text = _text(type_arg)
    if os.path.isdir(term_arg):
        files = sorted(Path(term_arg).glob("*.lam"))
        jobs_in = [(ctx_text, f.read_text().strip(), type_text) for f in files]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_check_one, jobs_in))
        else:
            results = [_check_one(j) for j in jobs_in]
        table = {f.name: r for f, r in zip(files, results)}
        ok = all(r["result"] == "yes" for r in results)
        _emit(ctx, "yes" if ok else "no", "" if ok else "some judgments rejected",
              {"files": table})
    res = _check_one((ctx_text, _text(term_arg), type_text))
    if res["result"] == "yes":
        _emit(ctx, "yes", "", {"derivation": res["derivation"]})
    _note(ctx, f"rejected: {res['reason']}")
    _emit(ctx, "no", res["reason"], {"detail": res["detail"]})


@main.command("infer")
@click.option("--ctx", "ctx_arg", default=None, help="Typing context (JSON text or file).")
@click.option("--term", "term_arg", required=True, help="Curry term (text or file).")
@click.pass_context
@_guard
def infer_cmd(ctx, ctx_arg, term_arg):
    """Decide whether TERM has some type, and report one."""
    t = _term(term_arg)
    r = typable(_ctx(ctx_arg), t)
    if isinstance(r, Accepted):
        arg = r.derivation.premises[1] if r.derivation.rule == "App" else r.derivation
        _emit(ctx, "yes", "", {"type": show_type(arg.type),
                               "derivation": derivation_to_json(arg)})
    _note(ctx, f"untypable: {r.reason}")
    _emit(ctx, "no", r.reason, {"detail": r.detail})


@main.command("normalize")
@click.option("--term", "term_arg", required=True, help="Term (text or file).")
@click.option("--church", is_flag=True, help="Parse as a Church-style term.")
@click.option("--eta", is_flag=True, help="Also eta-reduce.")
@click.option("--fuel", type=int, default=None, help="Maximum number of contractions.")
@click.option("--strategy", type=click.Choice(["leftmost-outermost", "rightmost-innermost"]),
              default="leftmost-outermost", show_default=True)
@click.pass_context
@_guard
def normalize_cmd(ctx, term_arg, church, eta, fuel, strategy):
    """Beta (and optionally eta) normal form."""
    t = _term(term_arg, "church" if church else "curry")
    nf = beta_normalize(t, fuel, strategy)
    if eta:
        nf = eta_reduce(nf)
    _emit(ctx, "yes", "", {"normal_form": show_term(nf)})


@main.command("unify")
@click.argument("problem", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
@_guard
def unify_cmd(ctx, problem):
    """Solve a unification problem over type schemes (JSON file)."""
    p = fu.problem_from_json(json.loads(Path(problem).read_text()))
    out = fu.fat_unify(p)
    data = fu.outcome_to_json(out)
    if data["result"] == "yes":
        _emit(ctx, "yes", "", {"unifier": data["unifier"]})
    _emit(ctx, "no", data["reason"], {"detail": data["detail"]})


# ---------------------------------------------------------------- encodings

@main.command("encode")
@click.option("--op", type=click.Choice(["io-plus", "io-times", "inj", "pair"]), required=True)
@click.option("--left", "left", default="A", show_default=True, help="Left component type.")
@click.option("--right", "right", default="B", show_default=True, help="Right component type.")
@click.option("--target", default=None, help="Result type C of an IO context.")
@click.option("--term", "terms", multiple=True, help="Component term(s) for inj / pair.")
@click.option("--index", type=click.IntRange(1, 2), default=1, show_default=True)
@click.pass_context
@_guard
def encode_cmd(ctx, op, left, right, target, terms, index):
    """Build encoded sums and products and the instantiation-overflow contexts."""
    A, B = parse_type(_text(left)), parse_type(_text(right))
    if op in ("io-plus", "io-times"):
        if target is None:
            raise _Fail("--target is required for IO contexts")
        C = parse_type(_text(target))
        K = (io_plus_context if op == "io-plus" else io_times_context)(A, B, C)
        filled = K.fill(parse_term("HOLE"))
        enc = sum_type(A, B) if op == "io-plus" else prod_type(A, B)
        _emit(ctx, "yes", "", {"context": K.show(), "hole_type": show_type(enc),
                               "witness_atomic": is_witness_atomic(filled)})
    ts = [_term(x, "church") for x in terms]
    if op == "inj":
        if len(ts) != 1:
            raise _Fail("inj takes exactly one --term")
        out, T = inj(index, ts[0], A, B), sum_type(A, B)
    else:
        if len(ts) != 2:
            raise _Fail("pair takes exactly two --term options")
        out, T = pair(ts[0], ts[1], A, B), prod_type(A, B)
    _emit(ctx, "yes", "", {"term": show_term(out), "type": show_type(T)})


# ---------------------------------------------------------------- equivalence

@main.command("eqnat")
@click.argument("left")
@click.argument("right")
@click.option("--arity", type=int, required=True, help="Number of Nat arguments.")
@click.pass_context
@_guard
def eqnat_cmd(ctx, left, right, arity):
    """Decide contextual equivalence of two numerical functions."""
    r = eqv.compare_numerical(_term(left), _term(right), arity)
    payload = {"left": eqv.extpoly_to_json(r.left), "right": eqv.extpoly_to_json(r.right)}
    if r.equal:
        _emit(ctx, "yes", "", payload)
    payload["separating_tuple"] = list(r.witness)
    payload["values"] = list(r.values)
    _emit(ctx, "no", "the functions differ", payload)


@main.command("separate")
@click.option("--type", "type_arg", required=True, help="Type A, possibly mentioning #.")
@click.option("--witness", default=None, help="Closed inhabitant of A (text or file).")
@click.option("--nat", is_flag=True, help="Label the pair for Nat-valued contexts.")
@click.option("--contexts", type=int, default=0, show_default=True,
              help="Also try this many small non-separating contexts.")
@click.pass_context
@_guard
def separate_cmd(ctx, type_arg, witness, nat, contexts):
    """Build the pair that is separable exactly when A is inhabited."""
    A = parse_type(_text(type_arg))
    pr = eqv.separating_pair_nat(A) if nat else eqv.separating_pair(A)
    payload = {"u": show_term(pr.u), "v": show_term(pr.v), "type": show_type(pr.type),
               "observation": "Nat" if nat else "Bool"}
    if contexts:
        family = eqv.nat_contexts(contexts) if nat else eqv.bool_contexts(contexts)
        hits = [K.show() for K in family if eqv.separates(K, pr)]
        payload["contexts_tried"] = len(family)
        payload["separating_found"] = hits[:5]
    if witness is None:
        _emit(ctx, "yes", "", payload)
    try:
        K = eqv.separating_context(A, _term(witness))
    except eqv.WitnessRejected as e:
        _note(ctx, f"witness rejected: {e}")
        _emit(ctx, "no", "WitnessRejected", payload)
    payload["context"] = K.show()
    payload["K[u]"] = show_term(erase_term(beta_normalize(K.fill(pr.u))))
    payload["K[v]"] = show_term(erase_term(beta_normalize(K.fill(pr.v))))
    _emit(ctx, "yes", "", payload)


@main.command("translate")
@click.argument("formula")
@click.option("--mode", type=click.Choice(["dyadic", "monadic"]), required=True)
@click.option("--assume", multiple=True, help="Assumption formula (dyadic mode).")
@click.option("--reverse", is_flag=True, help="Monadic mode: read a type, print the formula.")
@click.pass_context
@_guard
def translate_cmd(ctx, formula, mode, assume, reverse):
    """Translate first-order formulas into types."""
    text = _text(formula)
    if mode == "monadic":
        if reverse:
            f = eqv.type_to_monadic(parse_type(text))
            _emit(ctx, "yes", "", {"formula": eqv.show_formula(f)})
        _emit(ctx, "yes", "", {"type": show_type(eqv.monadic_to_type(eqv.parse_formula(text)))})
    phi = eqv.parse_formula(text)
    if assume:
        s = eqv.translate_sequent(phi, [eqv.parse_formula(_text(a)) for a in assume])
        _emit(ctx, "yes", "", {"context": {k: show_type(v) for k, v in s.ctx.items()},
                               "goal": show_type(s.goal)})
    _emit(ctx, "yes", "", {"type": show_type(eqv.translate_dyadic(phi))})


@main.command("search")
@click.option("--type", "type_arg", required=True, help="Type to inhabit.")
@click.option("--depth", type=int, required=True, help="Depth bound.")
@click.option("--ctx", "ctx_arg", default=None, help="Typing context (JSON text or file).")
@click.pass_context
@_guard
def search_cmd(ctx, type_arg, depth, ctx_arg):
    """Bounded inhabitation search."""
    A = parse_type(_text(type_arg))
    t = eqv.bounded_search(A, depth, _ctx(ctx_arg))
    if t is None:
        _emit(ctx, "no", f"no inhabitant up to depth {depth}")
    _emit(ctx, "yes", "", {"term": show_term(t), "curry": show_term(erase_term(t))})


def run(argv) -> int:
    """Run the CLI in-process and return its exit code."""
    try:
        code = main.main(args=list(argv), prog_name="fatcheck", standalone_mode=False)
    except SystemExit as e:
        return int(e.code or 0)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return 2
    return code if isinstance(code, int) else 0


if __name__ == "__main__":
    sys.exit(main())
