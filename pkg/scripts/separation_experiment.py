"""Separating pairs in practice.

For each type: build the pair (u, v); if a witness is known, fill the
separating context and show both normal forms; then count how many of the
first N small Bool contexts separate the pair.

Run from the repository root:  python3 scripts/separation_experiment.py [-n 1000]
"""
import argparse
import time

from fatcheck.equivalence import bool_contexts, separates, separating_context, separating_pair
from fatcheck.reduction import beta_normalize
from fatcheck.syntax import erase_term, parse_term, parse_type, show_term

CASES = [
    ("#", "*"),
    ("# -> #", r"\z. z"),
    ("forall X. X -> #", r"\z. *"),
    ("forall X. X -> X", r"\z. z"),
    ("forall X. X", None),
    ("(forall X. X -> Y) -> (X -> X) -> Y", None),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=1000, help="number of small contexts")
    args = ap.parse_args()
    contexts = bool_contexts(args.n)
    for src, witness in CASES:
        A = parse_type(src)
        pr = separating_pair(A)
        line = f"{src:40s}"
        if witness is not None:
            K = separating_context(A, parse_term(witness))
            ku = show_term(erase_term(beta_normalize(K.fill(pr.u))))
            kv = show_term(erase_term(beta_normalize(K.fill(pr.v))))
            line += f" K[u]={ku:12s} K[v]={kv:12s}"
        else:
            line += " " * 32
        t0 = time.perf_counter()
        hits = sum(separates(C, pr) for C in contexts)
        print(f"{line} small contexts separating: {hits}/{len(contexts)} "
              f"({time.perf_counter() - t0:.2f}s)")


if __name__ == "__main__":
    main()
