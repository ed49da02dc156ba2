from gmpy2 import mpq
from hypothesis import given, settings, strategies as st
import pytest

from conftest import F, P, ring
from gq.errors import UsageError
from gq.polyalg import (Derivation, Polynomial, WeightedPolyRing, bracket, dim_component,
                        graded_piece, restrict_to_base)


def test_weight_decompose(Rdvb):
    parts = P(Rdvb, "x + x*y").weight_decompose()
    assert parts == {(1, 0): P(Rdvb, "x"), (1, 1): P(Rdvb, "x*y")}
    assert P(Rdvb, "0").weight_decompose() == {}
    assert P(Rdvb, "3/2*z - x*y").weight_decompose() == {(1, 1): P(Rdvb, "3/2*z - x*y")}


def test_bracket_examples(Rdvb):
    assert bracket(F(Rdvb, "d(x)"), F(Rdvb, "x*d(z)")) == F(Rdvb, "d(z)")
    assert not bracket(F(Rdvb, "d(x) + y*d(z)"), F(Rdvb, "d(y) + x*d(z)"))


@pytest.mark.parametrize("a,b,om,nu", [(1, 1, 1, 1), (2, -1, 3, 1), (mpq(1, 2), 3, -2, 5)])
def test_warp_bracket(Rdvb, a, b, om, nu):
    X = Derivation(Rdvb, {0: Rdvb.const(a), 2: P(Rdvb, "y") * om})
    Y = Derivation(Rdvb, {1: Rdvb.const(b), 2: P(Rdvb, "x") * nu})
    assert bracket(X, Y) == F(Rdvb, "d(z)") * (mpq(a) * nu - mpq(b) * om)


def test_restrict_to_base():
    R = ring("z:1,1 w:2,1 x:1,0")
    assert restrict_to_base(F(R, "d(z) + x*d(w)")) == (1,)
    Rd = ring("x:1,0 y:0,1 z:1,1")
    assert restrict_to_base(F(Rd, "y*d(z)")) == (0,)
    R1 = ring("x1:1 x2:1")
    assert restrict_to_base(F(R1, "2*d(x1) - 3*d(x2)")) == (2, -3)


def test_graded_piece(Rdvb):
    S = graded_piece([F(Rdvb, "d(z)")], "augmentation", (0, -1), ring=Rdvb)
    assert S.dim == 1 and Derivation.from_vector(Rdvb, (0, -1), S.rows[0]) == F(Rdvb, "x*d(z)")
    R = ring("x1:1 y:2")
    assert graded_piece([F(R, "d(x1)")], "augmentation", (-1,), ring=R).dim == 0
    S = graded_piece([F(R, "d(y)")], "augmentation", (-1,), ring=R)
    assert Derivation.from_vector(R, (-1,), S.rows[0]) == F(R, "x1*d(y)")


@pytest.mark.parametrize("a,b,c", [(a, b, c) for a in range(4) for b in range(4) for c in range(3)])
def test_dim_component_dvb(a, b, c):
    R = WeightedPolyRing([(f"x{i}", (1, 0)) for i in range(a)] + [(f"y{i}", (0, 1)) for i in range(b)]
                         + [(f"z{i}", (1, 1)) for i in range(c)])
    assert dim_component(R, (1, 1)) == a * b + c
    assert dim_component(R, (0, 0)) == 1


def test_dim_component_single():
    assert dim_component(ring("x:1"), (3,)) == 1


def test_ring_errors():
    with pytest.raises(UsageError):
        WeightedPolyRing([("x", (1,)), ("x", (2,))])
    R = ring("x:1")
    with pytest.raises(UsageError):
        R.var("nope")


# ---------------------------------------------------------------- algebraic laws

R3 = ring("a:1 b:1 c:2 d:3")
coef = st.integers(-3, 3)
mono = st.tuples(*(st.integers(0, 2) for _ in range(4)))
polys = st.dictionaries(mono, coef, max_size=4).map(lambda t: Polynomial(R3, {e: mpq(c) for e, c in t.items()}))
fields = st.dictionaries(st.integers(0, 3), polys, max_size=3).map(lambda d: Derivation(R3, d))


@settings(max_examples=80, deadline=None)
@given(fields, fields, fields)
def test_jacobi(X, Y, Z):
    J = bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X)) + bracket(Z, bracket(X, Y))
    assert not J


@settings(max_examples=80, deadline=None)
@given(fields, polys, polys)
def test_leibniz(X, f, g):
    assert X(f * g) == X(f) * g + f * X(g)


@settings(max_examples=80, deadline=None)
@given(fields, fields, polys)
def test_bracket_is_commutator(X, Y, f):
    assert bracket(X, Y)(f) == X(Y(f)) - Y(X(f))


@settings(max_examples=80, deadline=None)
@given(polys)
def test_decompose_roundtrip(f):
    parts = f.weight_decompose()
    total = R3.zero()
    for w, p in parts.items():
        assert p.is_homogeneous() and p.weight() == w
        total = total + p
    assert total == f
