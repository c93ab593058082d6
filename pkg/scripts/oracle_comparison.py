"""Compare check with the brute-force oracle on fresh random judgments.

Run from the repository root:  python3 scripts/oracle_comparison.py [-n 500] [--seed 1]
Judgments the oracle cannot handle are skipped and counted.
"""
import argparse
import pathlib
import sys
import time

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from corpus import Gen  # noqa: E402
from oracle import Unsupported, oracle_check  # noqa: E402
from fatcheck.syntax import free_vars, show_term, show_type  # noqa: E402
from fatcheck.typecheck import Accepted, check  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    g = Gen(args.seed)
    counts = {"agree_yes": 0, "agree_no": 0, "disagree": 0, "skipped": 0}
    t0 = time.perf_counter()
    done = 0
    while done < args.n:
        ctx = g.context(0, 2)
        t = g.term(3, [], list(ctx))
        if free_vars(t) - set(ctx):
            continue
        A = g.top()
        done += 1
        try:
            expected = oracle_check(ctx, t, A)
        except Unsupported:
            counts["skipped"] += 1
            continue
        got = isinstance(check(ctx, t, A), Accepted)
        if got != expected:
            counts["disagree"] += 1
            print(f"DISAGREE {ctx} |- {show_term(t)} : {show_type(A)} check={got} oracle={expected}")
        else:
            counts["agree_yes" if got else "agree_no"] += 1
    print(counts, f"{time.perf_counter() - t0:.1f}s")
    sys.exit(1 if counts["disagree"] else 0)


if __name__ == "__main__":
    main()
