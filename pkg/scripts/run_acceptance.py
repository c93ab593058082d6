"""Run the acceptance suite and print one PASS/FAIL line per criterion.

Run from anywhere:  python3 scripts/run_acceptance.py
Exit status is pytest's.
"""
import pathlib
import sys

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    sys.exit(pytest.main(["-q", "-p", "no:cacheprovider", str(ROOT / "tests" / "test_acceptance.py")]))
