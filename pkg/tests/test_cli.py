"""CLI integration: every example in the README is executed with its
documented exit code, plus determinism, fuel, quiet mode and batch mode."""
import json
import os
import re
import shlex
import subprocess
import sys
from pathlib import Path

import pytest

from fatcheck.cli import run

ROOT = Path(__file__).resolve().parent.parent
EXAMPLE = re.compile(r"^\$ fatcheck (.*?)\s+# exit (\d)")


def readme_examples():
    out = []
    for line in (ROOT / "README.md").read_text().splitlines():
        m = EXAMPLE.match(line)
        if m:
            out.append((shlex.split(m.group(1)), int(m.group(2))))
    return out


def fatcheck(args, env=None):
    e = dict(os.environ, **(env or {}))
    return subprocess.run([sys.executable, "-m", "fatcheck.cli", *args], cwd=ROOT,
                          capture_output=True, text=True, env=e, timeout=120)


def test_readme_has_examples():
    assert len(readme_examples()) >= 15


@pytest.mark.parametrize("args,code", readme_examples(), ids=lambda x: " ".join(x)[:50]
                         if isinstance(x, list) else str(x))
def test_readme_example(args, code):
    p = fatcheck(args)
    assert p.returncode == code, p.stdout + p.stderr
    verdict = json.loads(p.stdout)
    assert verdict["result"] == {0: "yes", 1: "no", 2: "error"}[code]
    assert set(verdict) == {"result", "reason", "payload", "version"}


def test_output_is_deterministic():
    args = ["eqnat", "samples/succ.lam", "samples/ident.lam", "--arity", "1"]
    a, b = fatcheck(args), fatcheck(args)
    assert a.stdout == b.stdout and a.returncode == b.returncode == 1
    assert json.loads(a.stdout)["payload"]["separating_tuple"] == [1]


def test_fuel_from_environment():
    p = fatcheck(["normalize", "--term", r"(\x. x x) (\x. x x)"], {"FATCHECK_FUEL": "50"})
    assert p.returncode == 2
    assert json.loads(p.stdout)["reason"] == "FuelExhausted"


def test_quiet_silences_stderr():
    args = ["check", "--term", r"\x.", "--type", "X"]
    assert fatcheck(args).stderr
    assert fatcheck(["--quiet", *args]).stderr == ""


def test_directory_mode_in_parallel(tmp_path):
    (tmp_path / "a.lam").write_text(r"\x. x")
    (tmp_path / "b.lam").write_text(r"\f x. f x")
    (tmp_path / "c.lam").write_text(r"\x. x x")
    p = fatcheck(["check", "--term", str(tmp_path), "--type", "forall X. X -> X", "--jobs", "2"])
    assert p.returncode == 1
    files = json.loads(p.stdout)["payload"]["files"]
    assert files["a.lam"]["result"] == "yes"
    assert files["b.lam"]["result"] == "no" and files["c.lam"]["result"] == "no"
    serial = fatcheck(["check", "--term", str(tmp_path), "--type", "forall X. X -> X"])
    assert serial.stdout == p.stdout


def test_in_process_runner(capsys):
    assert run(["--quiet", "search", "--type", "forall X. X -> X", "--depth", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["payload"]["curry"] == r"\x1. x1"
    assert run(["--quiet", "infer", "--term", r"\x. x x"]) == 1
    assert run(["--quiet", "translate", "p(a", "--mode", "dyadic"]) == 2
