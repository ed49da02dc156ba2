from gmpy2 import mpq
from hypothesis import given, settings, strategies as st
import pytest

from gq import random_instances as ri
from gq.dvb import (DVBFiber, DVBSubalgebraSpec, HeisenbergElement, WideData, check_quot2,
                    dvb_action, gc_criterion, group_element, heisenberg_inverse, heisenberg_mul,
                    iterated_quotient, pike_decompose, pike_uniqueness, pike_verify,
                    quotient_dvb, summand_action, warp, wide_quotient)
from gq.errors import UsageError
from gq.grading import Subspace
from gq.nilpotent import GradedSubalgebra
from gq.polyalg import Derivation, bracket
from gq.suites import group_law_check

D111 = DVBFiber(1, 1, 1)
Z0 = Subspace.zero(1)
C = Subspace.full(1)


def fa(side, om):
    return D111.fat_a([side], [[om]])


def fb(side, nu):
    return D111.fat_b([side], [[nu]])


# ---------------------------------------------------------------- warp and the group law

@pytest.mark.parametrize("a,om,b,nu", [(1, 2, 3, 5), (1, 0, 1, 0), (0, 1, 0, 1), (2, -1, 0, 3)])
def test_warp(a, om, b, nu):
    assert warp(D111, fa(a, om), fb(b, nu)) == (mpq(a * nu - b * om),)


def test_warp_is_bracket():
    X, Y = fa(2, 3), fb(1, -1)
    assert D111.core(warp(D111, X, Y)) == bracket(X, Y)


def el(a=0, om=0, b=0, nu=0, c=0):
    return HeisenbergElement(fa(a, om), fb(b, nu), (mpq(c),))


def test_group_law_side_times_side():
    g = heisenberg_mul(D111, el(a=1, om=0), el(b=1, nu=0))
    assert g.ahat == fa(1, 0) and g.bhat == fb(1, 0) and g.c == (0,)
    g = heisenberg_mul(D111, el(a=1), el(b=0, nu=1))
    assert g.c == (1,)


def test_group_law_commutator():
    g1, g2 = el(a=1), el(nu=1)
    c12 = heisenberg_mul(D111, g1, g2).c[0]
    c21 = heisenberg_mul(D111, g2, g1).c[0]
    assert c12 - c21 == 2
    g1, g2 = el(om=1), el(nu=1)
    assert heisenberg_mul(D111, g1, g2).c == heisenberg_mul(D111, g2, g1).c


def test_group_law_inverse():
    g = el(2, 1, -1, 3, 5)
    e = heisenberg_mul(D111, g, heisenberg_inverse(g))
    assert not e.ahat and not e.bhat and e.c == (0,)


@pytest.mark.parametrize("ranks", [(1, 1, 1), (2, 1, 1), (1, 2, 2), (2, 2, 1)])
def test_group_law_matches_composition(ranks):
    total, bad = group_law_check(DVBFiber(*ranks))
    assert total > 0 and bad == 0


def test_summand_actions():
    pt = ((2,), (3,), (5,))
    assert summand_action(D111, "a", ((1,), [[4]]), pt) == ((3,), (3,), (17,))
    assert summand_action(D111, "b", ((1,), [[4]]), pt) == ((2,), (4,), (13,))
    assert summand_action(D111, "c", (7,), pt) == ((2,), (3,), (12,))


@pytest.mark.parametrize("kind,g,data", [("a", el(a=1, om=4), ((1,), [[4]])),
                                          ("b", el(b=1, nu=4), ((1,), [[4]])),
                                          ("c", el(c=14), (7,))])
def test_group_element_acts_as_summand(kind, g, data):
    # Ψ(â, b̂, c) = exp(â + b̂ + c/2), so the core coordinate of a triple is
    # twice the translation it produces; the side summands act literally.
    pt = ((2,), (3,), (5,))
    assert dvb_action(D111, g, pt) == summand_action(D111, kind, data, pt)


# ---------------------------------------------------------------- quotient criterion

def spec(ahat, bhat, cp):
    return DVBSubalgebraSpec(D111, ahat, bhat, cp)


def test_quot2_invalid_fat():
    sp = spec([fa(1, 2)], [], C)
    rep = check_quot2(sp)
    assert not rep.fat_a_ok and not rep.valid and not gc_criterion(sp)


def test_quot2_full():
    sp = spec([fa(0, 1), fa(1, 0)], [fb(0, 1), fb(1, 0)], C)
    assert check_quot2(sp).valid
    rep = quotient_dvb(sp)
    assert rep.ranks == (0, 0, 0)
    assert [(s.index, s.rank) for s in rep.result.stages] == [((1, 1), 1), ((1, 0), 1), ((0, 1), 1)]


def test_quot2_heisenberg():
    sp = spec([fa(1, 1)], [fb(1, 1)], Z0)
    rep = check_quot2(sp)
    assert rep.valid and rep.gc_criterion
    q = quotient_dvb(sp)
    assert q.ranks == (0, 0, 1)
    (p,) = q.result.pullbacks.values()
    R = D111.ring
    assert p == R.var("z1") - R.var("x1") * R.var("y1")


def test_quot2_closure_not_automatic():
    sp = spec([fa(1, 0)], [fb(1, 1)], Z0)
    rep = check_quot2(sp)
    assert rep.fat_conditions and not rep.closed and not rep.valid
    with pytest.raises(UsageError):
        quotient_dvb(sp)


def test_empty_spec_identity():
    q = quotient_dvb(spec([], [], Z0))
    assert q.ranks == (1, 1, 1)


def test_spec_rejects_wrong_degree():
    with pytest.raises(UsageError):
        spec([fb(1, 0)], [], Z0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.booleans())
def test_fat_conditions_iff_gc(seed, valid):
    sp = ri.random_dvb_spec(ri.rng_for(seed, 0, "hyp-dvb"), 3, valid=valid)
    rep = check_quot2(sp)
    assert rep.fat_conditions == rep.gc_criterion
    if valid:
        assert rep.valid


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_quotient_ranks(seed):
    sp = ri.random_dvb_spec(ri.rng_for(seed, 0, "hyp-ranks"), 3)
    q = quotient_dvb(sp)
    A1, B1 = sp.side_images()
    D = sp.fiber
    assert q.ranks == (D.a - A1.dim, D.b - B1.dim, D.c - sp.cprime.dim)


@pytest.mark.parametrize("a,b,c", [(a, b, c) for a in range(5) for b in range(5) for c in range(5)])
def test_dim_P11(a, b, c):
    assert DVBFiber(a, b, c).dim_P11() == a * b + c


# ---------------------------------------------------------------- wide subbundles and the decomposition

def test_wide_vertical_full():
    W = WideData(D111, "B", Subspace.full(1), C)
    assert wide_quotient(W).ranks == (1, 0, 0)


def test_wide_trivial():
    W = WideData(D111, "B", Subspace.zero(1), Z0)
    assert wide_quotient(W).ranks == (1, 1, 1)


def test_wide_partial_core():
    D = DVBFiber(1, 1, 2)
    W = WideData(D, "B", Subspace.full(1), Subspace.span([[1, 0]], 2))
    rep = wide_quotient(W)
    assert rep.ranks == (1, 0, 1)
    assert D.ring.var("z2") in rep.result.pullbacks.values()


def test_wide_membership():
    W = WideData(D111, "B", Subspace.full(1), Z0, [[[mpq(3)]]])
    # c = ν_b(a) = 3·b·a
    assert W.contains_point(((1,), (2,), (6,)))
    assert not W.contains_point(((1,), (2,), (3,)))


def test_pike_heisenberg():
    sp = spec([fa(1, 1)], [fb(1, 1)], Z0)
    d1, d2 = pike_decompose(sp)
    assert d1.side == "B" and d1.sub.dim == 1 and d1.core.dim == 0
    assert wide_quotient(d1).ranks == (1, 0, 1)
    rep = pike_verify(sp)
    assert rep.ok
    v = iterated_quotient(D111.ring, sp.subalgebra(), d1.subalgebra())
    (p,) = v.pullbacks.values()
    R = D111.ring
    assert p == R.var("z1") - R.var("x1") * R.var("y1")


def test_pike_trivial_vertical():
    sp = spec([fa(1, 0)], [], Z0)
    d1, d2 = pike_decompose(sp)
    assert d1.sub.dim == 0 and d1.core.dim == 0
    assert pike_verify(sp).ok


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_pike_random(seed):
    rng = ri.rng_for(seed, 0, "hyp-pike")
    sp = ri.random_dvb_spec(rng, 3)
    assert pike_verify(sp).ok
    c1, c2 = ri.random_split(rng, sp.cprime)
    assert pike_uniqueness(sp, c1, c2)
