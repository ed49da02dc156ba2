"""Acceptance criteria 1-10 at their stated counts, exact arithmetic throughout.

Every test prints one ``criterion N: PASS|FAIL ...`` line live and again in
the terminal summary.  Wall-clock time is reported next to each verdict; the
verdict itself is about correctness only (see the runtime notes in README).
"""
import functools
import json
import re
import subprocess
import sys
from pathlib import Path

import pytest

from gq import suites as S

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.slow

SEED = 1
ROOT = Path(__file__).resolve().parents[1]


@functools.lru_cache(maxsize=None)
def run_suite(name):
    return {
        "exp-bch": lambda: S.suite_exp_bch(SEED, 200),
        "condition": lambda: S.suite_condition(SEED, 200),
        "oracle": lambda: S.suite_oracle(SEED, 100, bound=3),
        "dvb": lambda: S.suite_dvb(SEED, 100, max_rank=3),
        "pike": lambda: S.suite_pike(SEED, 100, max_rank=3),
        "lifts": lambda: S.suite_lifts(SEED, 200, max_m=4),
        "double-normal": lambda: S.suite_dnb(SEED, twists=20, max_m=5, twist_scope="all"),
        "weighted-normal": lambda: S.suite_wnb(SEED, twists=20, max_m=4),
    }[name]()


def report(capsys, n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)


def suite_line(r):
    extra = ", ".join(f"{k}={v}" for k, v in sorted(r.stats.items(), key=str))
    s = f"{r.name}: {r.passed}/{r.cases} passed in {r.seconds:.1f}s"
    if extra:
        s += f" [{extra}]"
    if r.failures:
        s += f" first failure: {r.failures[0]}"
    return s


@pytest.mark.parametrize("n,name", [
    (1, "exp-bch"), (2, "condition"), (3, "oracle"), (4, "dvb"),
    (5, "pike"), (6, "lifts"), (7, "double-normal"), (8, "weighted-normal"),
])
def test_criterion_suite(n, name, capsys):
    r = run_suite(name)
    report(capsys, n, r.failed == 0 and r.cases > 0, suite_line(r))
    assert r.failed == 0, r.failures


def test_criterion_9_splitting(capsys):
    parts, ok = [], True
    for name in ("condition", "oracle", "dvb", "pike"):
        r = run_suite(name)
        parts.append(f"{name} {r.split_passed}/{r.split_passed + r.split_failed}")
        ok &= r.split_failed == 0 and r.split_passed > 0
    report(capsys, 9, ok, "π∘j = id on " + ", ".join(parts))
    assert ok


def _gq(args):
    return subprocess.run([sys.executable, "-m", "gq", *args, "--format", "json"],
                          capture_output=True, cwd=ROOT, env={"GQ_COLOR": "never", "PATH": ""})


def test_criterion_10_cli_determinism(capsys):
    fixtures = sorted((ROOT / "fixtures").glob("*.gq"))
    bad = []
    for f in fixtures:
        text = f.read_text(encoding="utf-8")
        cmd = re.search(r"^# command: (\S+)", text, re.M).group(1)
        want = int(re.search(r"^# expect-exit: (\d+)", text, re.M).group(1))
        cites = re.search(r"^#.*(theorem|proposition|lemma|remark|corollary|example)", text, re.M | re.I)
        a, b = _gq([cmd, str(f.relative_to(ROOT))]), _gq([cmd, str(f.relative_to(ROOT))])
        if a.stdout != b.stdout or a.returncode != b.returncode:
            bad.append(f"{f.name}: output differs between runs")
        elif a.returncode != want:
            bad.append(f"{f.name}: exit {a.returncode}, expected {want}")
        elif not cites:
            bad.append(f"{f.name}: header cites no theorem")
        else:
            json.loads(a.stdout)
    v1 = _gq(["verify", "--seed", "4", "--cases", "3", "--suite", "condition", "--suite", "dvb"])
    v2 = _gq(["verify", "--seed", "4", "--cases", "3", "--suite", "condition", "--suite", "dvb"])
    if v1.stdout != v2.stdout:
        bad.append("verify output differs between runs")
    ok = len(fixtures) >= 12 and not bad
    report(capsys, 10, ok, f"{len(fixtures)} fixtures run twice, byte-identical JSON, exit codes as declared"
           + (f"; problems: {bad}" if bad else ""))
    assert ok, bad
