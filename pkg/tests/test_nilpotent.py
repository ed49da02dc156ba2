from gmpy2 import mpq
from hypothesis import given, settings, strategies as st
import pytest

from conftest import F, P, ring
from gq import random_instances as ri
from gq.errors import UsageError
from gq.nilpotent import (GradedSubalgebra, bch, check_closed, check_condition,
                          check_weak_condition, exp_automorphism, lie_closure,
                          orbit_through_origin, saturate)
from gq.polyalg import bracket


# ---------------------------------------------------------------- exp

def test_exp_translation(Rdvb):
    g = exp_automorphism(F(Rdvb, "d(z)"))
    assert g.pullback(P(Rdvb, "z")) == P(Rdvb, "z + 1")
    assert g.pullback(P(Rdvb, "x")) == P(Rdvb, "x")


def test_exp_shear(Rdvb):
    g = exp_automorphism(F(Rdvb, "y*d(z)"))
    assert g.pullback(P(Rdvb, "z")) == P(Rdvb, "z + y")
    assert (g @ g).pullback(P(Rdvb, "z")) == P(Rdvb, "z + 2*y")


def test_exp_truncation():
    R = ring("x:1 y:2")
    g = exp_automorphism(F(R, "d(x) + x*d(y)"))
    assert g.pullback(P(R, "x")) == P(R, "x + 1")
    assert g.pullback(P(R, "y")) == P(R, "y + x + 1/2")


def test_exp_rejects_nonnegative(Rdvb):
    with pytest.raises(UsageError):
        exp_automorphism(F(Rdvb, "x*d(x)"))


def test_exp_inverse_and_triangular(Rdvb):
    X = F(Rdvb, "2*d(x) + y*d(z) - d(y)")
    g = exp_automorphism(X)
    assert g.is_triangular()
    assert (g @ g.inverse()).is_identity()


# ---------------------------------------------------------------- BCH

def test_bch_commuting():
    R = ring("x:1 y:1")
    assert bch(F(R, "d(x)"), F(R, "d(y)")) == F(R, "d(x) + d(y)")


@pytest.mark.parametrize("a,b,om,nu", [(1, 0, 0, 1), (2, 3, -1, 1), (1, 1, 1, 1)])
def test_bch_heisenberg(Rdvb, a, b, om, nu):
    X = F(Rdvb, "d(x)") * a + F(Rdvb, "y*d(z)") * om
    Y = F(Rdvb, "d(y)") * b + F(Rdvb, "x*d(z)") * nu
    Z = X + Y + F(Rdvb, "d(z)") * (mpq(a * nu - b * om) / 2)
    assert bch(X, Y) == Z
    assert exp_automorphism(Z) == exp_automorphism(X) @ exp_automorphism(Y)


def test_bch_inverse(Rdvb):
    X = F(Rdvb, "d(x) + y*d(z)")
    assert not bch(X, -X)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_bch_random(seed):
    rng = ri.rng_for(seed, 0, "hyp-bch")
    R = ri.random_ring(rng)
    X, Y = ri.random_negative_field(rng, R), ri.random_negative_field(rng, R)
    assert exp_automorphism(bch(X, Y)) == exp_automorphism(X) @ exp_automorphism(Y)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_bch_associative(seed):
    rng = ri.rng_for(seed, 0, "hyp-assoc")
    R = ri.random_ring(rng)
    X, Y, Z = (ri.random_negative_field(rng, R) for _ in range(3))
    assert bch(bch(X, Y), Z) == bch(X, bch(Y, Z))


# ---------------------------------------------------------------- closure and the criterion

def test_closure_examples(R1):
    assert check_closed(GradedSubalgebra(R1, [F(R1, "d(x1)"), F(R1, "x1*d(y)"), F(R1, "d(y)")]))
    rep = check_closed(GradedSubalgebra(R1, [F(R1, "d(x1)"), F(R1, "x1*d(y)")]))
    assert not rep and rep.witness[2] == F(R1, "d(y)")
    assert check_closed(GradedSubalgebra(R1, [F(R1, "d(y)")]))


def test_lie_closure(R1):
    h = lie_closure(R1, [F(R1, "d(x1)"), F(R1, "x1*d(y)")])
    assert h.contains(F(R1, "d(y)")) and h.dim() == 3


def test_condition_dvb_holds(Rdvb):
    assert check_condition(GradedSubalgebra(Rdvb, [F(Rdvb, "d(x) + y*d(z)"), F(Rdvb, "d(y) + x*d(z)")]))


def test_condition_fails_with_witness(R1):
    h = GradedSubalgebra(R1, [F(R1, "d(x1)"), F(R1, "x1*d(y)"), F(R1, "d(y)")])
    rep = check_condition(h)
    assert not rep
    k, lhs, rhs = rep.witness
    assert k == (-1,) and lhs.dim == 1 and rhs.dim == 2
    assert lhs.issubspace(rhs)


def test_condition_full_g(R1):
    assert check_condition(GradedSubalgebra.full(R1))


def test_condition_requires_closure(R1):
    with pytest.raises(UsageError):
        check_condition(GradedSubalgebra(R1, [F(R1, "d(x1)"), F(R1, "x1*d(y)")]))


def test_subalgebra_rejects_nonnegative(R1):
    with pytest.raises(UsageError):
        GradedSubalgebra(R1, [F(R1, "x1*d(x2)")])


def test_saturate_examples(R1):
    k = GradedSubalgebra(R1, [F(R1, "d(x1)"), F(R1, "x1*d(y)"), F(R1, "d(y)")])
    assert check_weak_condition(k)
    s = saturate(k)
    assert s == GradedSubalgebra(R1, [F(R1, "d(x1)"), F(R1, "d(y)"), F(R1, "x1*d(y)"), F(R1, "x2*d(y)")])
    assert check_condition(s)
    assert saturate(s) == s
    assert not check_weak_condition(GradedSubalgebra(R1, [F(R1, "x1*d(y)")]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_saturation_fixes_weak(seed):
    rng = ri.rng_for(seed, 0, "hyp-sat")
    R = ri.random_ring(rng)
    h = ri.random_subalgebra(rng, R)
    if check_weak_condition(h):
        s = saturate(h)
        assert check_closed(s) and check_condition(s) and h.issubalgebra_of(s)
    if check_condition(h):
        assert check_weak_condition(h) and saturate(h) == h


# ---------------------------------------------------------------- orbit of the origin

def test_orbit_translation(R1):
    k = orbit_through_origin(GradedSubalgebra(R1, [F(R1, "d(x1)")]))
    assert k.dims == {(1,): 1}
    s1 = k.parameter_ring.var("s1")
    assert k.parametrization == {"x1": s1, "x2": k.parameter_ring.zero(), "y": k.parameter_ring.zero()}


def test_orbit_dvb(Rdvb):
    k = orbit_through_origin(GradedSubalgebra(Rdvb, [F(Rdvb, "d(x) + y*d(z)"), F(Rdvb, "d(y) + x*d(z)")]))
    assert k.dims == {(1, 0): 1, (0, 1): 1}
    S = k.parameter_ring
    assert k.parametrization == {"x": S.var("s1"), "y": S.var("s2"), "z": S.var("s1") * S.var("s2")}


def test_orbit_zero(R1):
    k = orbit_through_origin(GradedSubalgebra(R1, []))
    assert k.dims == {} and all(not p for p in k.parametrization.values())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_orbit_is_invariant_zero_set(seed):
    """Invariants without constant term vanish on the orbit of the origin."""
    from gq.quotient import staged_quotient
    rng = ri.rng_for(seed, 0, "hyp-orbit")
    R, h = ri.random_valid_pair(rng)
    q = staged_quotient(R, h)
    par = q.kernel.parametrization
    img = {R.index(nm): p for nm, p in par.items()}
    for p in q.pullbacks.values():
        assert not p.subs(img, q.kernel.parameter_ring)
