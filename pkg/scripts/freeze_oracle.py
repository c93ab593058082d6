"""Freeze the brute-force oracle's verdicts on the curated judgment set.

Run from the repository root:  python3 scripts/freeze_oracle.py
Writes tests/data/oracle_verdicts.json.  The type checker is not imported.
"""
import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracle import oracle_check  # noqa: E402
from fatcheck.syntax import parse_context, parse_term, parse_type, split_prefix, term_size  # noqa: E402

ID = "forall X. X -> X"
NAT = "forall X. (X -> X) -> X -> X"

# (context, term, type)
CURATED = [
    ({"x": ID, "y": "forall Y. Y"}, "x y", "forall Z. Z"),
    ({"x": ID, "y": "Y"}, "x y", "forall Z. Z"),
    ({}, r"\x. x", ID),
    ({}, r"\x. x", "forall X. (forall Y. Y) -> X"),
    ({}, r"\x. x", "(forall Y. Y) -> (forall Y. Y)"),
    ({}, r"\x. x x", ID),
    ({}, r"\x. x x", "(forall X. X) -> (forall X. X)"),
    ({}, r"\x. x x", "(forall X. X -> X) -> (forall X. X -> X)"),
    ({}, r"\x. x x", "forall Y. (forall X. X -> X) -> Y -> Y"),
    ({}, r"\x y. x", "forall X Y. X -> Y -> X"),
    ({}, r"\x y. x", "forall X. X -> (forall Y. Y -> X)"),
    ({}, r"\x y. y", "forall X Y. X -> Y -> X"),
    ({}, r"\f x. f x", "forall X Y. (X -> Y) -> X -> Y"),
    ({}, r"\f x. f (f x)", NAT),
    ({}, r"\f x. f (f x)", "forall X Y. (X -> Y) -> X -> Y"),
    ({}, r"\x y. x y", "(forall X. X -> Y) -> (X -> X) -> Y"),
    ({"f": "forall X. X -> X -> X"}, r"\x. f x", "forall Y. Y -> Y -> Y"),
    ({"f": "forall X. X -> X -> X", "a": "A", "b": "B"}, "f a b", "A"),
    ({"f": "forall X. X -> X -> X", "a": "A"}, "f a a", "A"),
    ({"f": "forall X. X -> X -> X", "a": "A"}, "f a a", "forall Z. Z"),
    ({"n": NAT, "s": "A -> A", "z": "A"}, "n s z", "A"),
    ({"n": NAT, "s": "(A -> A) -> A -> A"}, "n s", "(A -> A) -> A -> A"),
    ({"n": NAT, "m": NAT}, "n m", NAT),
    ({"n": NAT}, r"\f. n f", "forall Y. (Y -> Y) -> Y -> Y"),
    ({"n": NAT}, "n n", NAT),
    ({"x": "forall X. X"}, "x x", "forall Y. Y"),
    ({"x": "forall X. X"}, "x", "A -> A"),
    ({"x": "forall X Y. X -> Y"}, "x x", "forall Z. Z"),
    ({"x": "forall X Y. X -> Y"}, "x", "forall Z. Z -> Z"),
    ({"x": "forall X Y. X -> Y", "a": "A"}, "x a", "B"),
    ({"k": "forall X Y. X -> Y -> X", "a": "A"}, "k a", "forall Y. Y -> A"),
    ({"k": "forall X Y. X -> Y -> X", "a": "A"}, "k a a", "A"),
    ({"k": "forall X Y. X -> Y -> X"}, "k k", "forall Y. Y -> (forall X Y. X -> Y -> X)"),
    ({"g": "(forall X. X -> X) -> A", "i": ID}, "g i", "A"),
    ({"g": "(forall X. X -> X) -> A"}, r"g (\x. x)", "A"),
    ({"g": "(forall X. X -> X) -> A"}, r"g (\x. x x)", "A"),
    ({"g": "(forall X. X -> X) -> A", "y": "B"}, r"g (\x. y)", "A"),
    ({"g": "(A -> A) -> B"}, r"g (\x. x)", "B"),
    ({"a": "A"}, r"(\x. x) a", "A"),
    ({"i": ID}, r"(\x. x x) i", ID),
    ({"i": ID, "a": "A"}, r"(\x. x a) i", "A"),
    ({"i": ID}, r"(\x. x) i", "forall Y. Y -> Y"),
    ({"p": "forall X. (A -> B -> X) -> X"}, r"p (\x y. x)", "A"),
    ({"p": "forall X. (A -> B -> X) -> X"}, r"p (\x y. y)", "A"),
    ({"p": "forall X. (A -> X) -> (B -> X) -> X", "f": "A -> C", "g": "B -> C"}, "p f g", "C"),
    ({"p": "forall X. (A -> X) -> (B -> X) -> X", "f": "A -> C"}, "p f f", "C"),
    ({"h": "A -> (forall X. X -> X)"}, r"\a. h a", "A -> A -> A"),
    ({"h": "A -> (forall X. X -> X)", "a": "A"}, "h a", "B -> B"),
    ({"c": "#"}, r"\x. c", "forall X. X -> #"),
    ({}, r"\f. f *", "forall X. (# -> X) -> X"),
]


def main():
    rows = []
    for ctx, term, ty in CURATED:
        c, t, A = parse_context(ctx), parse_term(term), parse_type(ty)
        assert term_size(t) <= 7, term
        assert all(len(split_prefix(T)[0]) <= 2 for T in list(c.values()) + [A]), ty
        rows.append({"ctx": ctx, "term": term, "type": ty, "oracle": oracle_check(c, t, A)})
    out = ROOT / "tests" / "data" / "oracle_verdicts.json"
    out.write_text(json.dumps(rows, indent=1, ensure_ascii=False) + "\n")
    print(f"{len(rows)} instances, {sum(r['oracle'] for r in rows)} typable -> {out}")


if __name__ == "__main__":
    main()
