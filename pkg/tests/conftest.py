import pytest

from gq.parser import parse_field, parse_polynomial
from gq.polyalg import WeightedPolyRing


def ring(spec: str) -> WeightedPolyRing:
    """'x1:1, x2:1, y:2' or 'x:1,0; y:0,1' style declarations."""
    out = []
    for piece in spec.replace(";", " ").split():
        nm, w = piece.rstrip(",").split(":")
        out.append((nm, tuple(int(t) for t in w.split(","))))
    return WeightedPolyRing(out)


def F(R, text):
    return parse_field(text, R)


def P(R, text):
    return parse_polynomial(text, R)


@pytest.fixture
def R1():
    """x1, x2 of weight 1 and y of weight 2."""
    return ring("x1:1 x2:1 y:2")


@pytest.fixture
def Rdvb():
    """The rank (1,1,1) double vector bundle fiber."""
    return ring("x:1,0 y:0,1 z:1,1")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
