"""Shared oracles.  Each one is written independently of the library code."""
from __future__ import annotations

import math
from fractions import Fraction

import pytest


def two_pass_variance(xs, ddof: int = 0) -> float:
    """Mean first, then the exactly-rounded sum of squared deviations."""
    xs = [float(x) for x in xs]
    m = math.fsum(xs) / len(xs)
    return math.fsum((x - m) ** 2 for x in xs) / (len(xs) - ddof)


def exact_variance(xs, ddof: int = 0) -> Fraction:
    fs = [Fraction(x) for x in xs]
    m = sum(fs) / len(fs)
    return sum((f - m) ** 2 for f in fs) / (len(fs) - ddof)


def rel_close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


@pytest.fixture
def tmp_out(tmp_path):
    return tmp_path / "out"


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[0][2:])):
            terminalreporter.write_line(line)
