"""Extract the extended polynomial of every numerical corpus term.

Run from the repository root:  python3 scripts/extract_corpus.py [--json]
Prints degree bound, grid size, the region table, and whether the table
matches the reference arithmetic on {0..6}^k.
"""
import argparse
import itertools
import json
import pathlib
import sys
import time

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from corpus import ARITH, NUMERIC  # noqa: E402
from fatcheck.equivalence import extpoly_to_json, extract_report  # noqa: E402
from fatcheck.syntax import parse_term  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--json", action="store_true", help="emit JSON lines instead of text")
    args = ap.parse_args()
    for name, k, src in NUMERIC:
        t0 = time.perf_counter()
        rep = extract_report(parse_term(src), k)
        secs = time.perf_counter() - t0
        ok = all(rep.poly(*a) == ARITH[name](*a) for a in itertools.product(range(7), repeat=k))
        if args.json:
            print(json.dumps({"name": name, "arity": k, "degree_bound": rep.degree_bound,
                              "grid_points": rep.grid_points, "matches": ok, "seconds": secs,
                              "poly": extpoly_to_json(rep.poly)}, sort_keys=True))
        else:
            print(f"{name:15s} k={k} D={rep.degree_bound:<2d} grid={rep.grid_points:<4d} "
                  f"{'ok ' if ok else 'BAD'} {secs:5.2f}s  {rep.poly.show()}")


if __name__ == "__main__":
    main()
