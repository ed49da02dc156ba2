from gmpy2 import mpq
from hypothesis import given, settings, strategies as st
import pytest

from gq import random_instances as ri
from gq.errors import UsageError
from gq.geom import jets, normal, weil
from gq.geom.jets import FiltrationDiffeo, JetSpace, chart_ring, lift
from gq.geom.normal import (chart_names, dnb_weights, double_normal_gr, double_normal_subquotient,
                            flip, weighted_normal_order2, wnb_weights)
from gq.geom.weil import WeilAlgebra, jet_evaluate, symmetrize_element, symmetrize_jet
from gq.parser import parse_field, parse_polynomial
from gq.polyalg import Derivation, bracket
from gq.suites import lift_identities


# ---------------------------------------------------------------- Weil algebras

def test_weil_square():
    C = chart_ring(["u"], 1)
    S = JetSpace(["u"], (2,))
    lifts = S.function_lifts(parse_polynomial("u^2", C))
    R = S.ring
    u, u1, u2 = R.var("u"), R.var("u_1"), R.var("u_2")
    assert lifts == {(0,): u * u, (1,): u * u1 * 2, (2,): u1 * u1 + u * u2 * 2}


def test_weil_unital_and_generator():
    A = WeilAlgebra((1, 1))
    C = chart_ring(["u"], 2)
    pt = [A.element({(0, 0): 2, (1, 0): 3, (0, 1): 5, (1, 1): 7})]
    assert jet_evaluate(C.one(), pt) == A.scalar(1)
    assert jet_evaluate(C.var("u"), pt) == pt[0]


def test_weil_truncation():
    A = WeilAlgebra((2,))
    e = A.eps(0)
    assert e ** 2 != A.scalar(0) and e ** 3 == A.scalar(0)
    assert A.dim() == 3 and WeilAlgebra((1, 1)).dim() == 4


def test_symmetrize_jet():
    assert symmetrize_jet([(1, 2, 3)]) == [{(0, 0): 1, (0, 1): 2, (1, 0): 2, (1, 1): 6}]
    assert symmetrize_jet([(4, 0, 0)]) == [{(0, 0): 4, (0, 1): 0, (1, 0): 0, (1, 1): 0}]


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3), st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_symmetrize_multiplicative(p, q):
    A = WeilAlgebra((2,))
    x = A.element({(k,): c for k, c in enumerate(p)})
    y = A.element({(k,): c for k, c in enumerate(q)})
    assert symmetrize_element(x * y) == symmetrize_element(x) * symmetrize_element(y)


# ---------------------------------------------------------------- lifts

def test_lift_examples_tangent():
    S = JetSpace(["u"], (1,))
    C, R = S.chart, S.ring
    f, X = parse_polynomial("u^2", C), parse_field("u*d(u)", C, allow_base=True)
    assert lift(f, "t", S) == parse_polynomial("2*u*u_1", R)
    assert lift(X, "t", S) == parse_field("u*d(u) + u_1*d(u_1)", R, allow_base=True)
    assert lift(X, "v", S) == parse_field("u*d(u_1)", R, allow_base=True)
    lhs = lift(X * f, "t", S)
    assert lhs == lift(f, "t", S) * lift(X, "v", S) + lift(f, "v", S) * lift(X, "t", S)
    assert lhs == parse_field("u^3*d(u) + 3*u^2*u_1*d(u_1)", R, allow_base=True)


def test_lift_bracket_example():
    S = JetSpace(["u"], (1,))
    C = S.chart
    X, Y = parse_field("u*d(u)", C, allow_base=True), parse_field("d(u)", C, allow_base=True)
    want = parse_field("-d(u_1)", S.ring, allow_base=True)
    assert bracket(lift(X, "t", S), lift(Y, "v", S)) == want == lift(bracket(X, Y), "v", S)


def test_second_order_lift_example():
    S = JetSpace(["u"], (2,))
    C = S.chart
    X, f = parse_field("d(u)", C, allow_base=True), parse_polynomial("u^2", C)
    assert S.lift_field(X, (2,))(S.lift_function(f, (2,))) == S.lift_function(X(f), (0,))
    assert S.lift_field(X, (2,))(S.lift_function(f, (1,))) == S.ring.zero()


def test_lift_pattern_errors():
    S = JetSpace(["u"], (1, 1))
    with pytest.raises(UsageError):
        lift(S.chart.var("u"), "x", S)
    with pytest.raises(UsageError):
        S.lift_field(Derivation.partial(S.chart, "u"), (2, 0))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3))
def test_lift_identities_random(seed, m):
    bad = [label for label, ok in lift_identities(ri.rng_for(seed, 0, "hyp-lift"), m) if not ok]
    assert not bad


# ---------------------------------------------------------------- filtration twists

def test_twist_rejects_low_weight():
    with pytest.raises(UsageError, match="u1"):
        C = chart_ring(["u1", "u2"], 1)
        FiltrationDiffeo(["u1", "u2"], [(1,), (2,)], {"u2": C.var("u1")})


def test_twist_rejects_linear_change():
    C = chart_ring(["u1", "u2"], 1)
    with pytest.raises(UsageError):
        FiltrationDiffeo(["u1", "u2"], [(1,), (1,)], {"u2": C.var("u2") * 2})


def test_twist_inverse():
    C = chart_ring(["u1", "u2", "u3"], 2)
    phi = FiltrationDiffeo(["u1", "u2", "u3"], dnb_weights(3, {1, 2}, {2, 3}),
                           {"u2": C.var("u1") * C.var("u3")})
    for i in range(3):
        assert phi.forward[i].subs(phi.inverse, C) == C.var(i)
    assert phi.coordinate_field(0) == parse_field("d(u1) + u3*d(u2)", C, allow_base=True)


# ---------------------------------------------------------------- double normal bundles

def test_dnb_clean():
    gr = double_normal_gr(3, {1, 2}, {2, 3})
    assert (gr.sides, gr.core, gr.base_dim, gr.excess) == ((1, 1), 1, 0, 1)
    sq = double_normal_subquotient(3, {1, 2}, {2, 3}, oracle=True)
    assert sq.summary() == gr.summary()


def test_dnb_transverse():
    gr = double_normal_gr(2, {1}, {2})
    assert (gr.sides, gr.core) == ((1, 1), 0)
    assert double_normal_subquotient(2, {1}, {2}).summary() == gr.summary()


def test_dnb_equal_sets():
    gr = double_normal_gr(4, {1, 3}, {1, 3})
    assert (gr.sides, gr.core, gr.base_dim) == ((0, 0), 2, 2)
    assert flip(gr).summary() == gr.summary()


def test_dnb_twisted():
    C = chart_ring(chart_names(3), 2)
    tw = FiltrationDiffeo(chart_names(3), dnb_weights(3, {1, 2}, {2, 3}), {"u2": C.var("u1") * C.var("u3")})
    sq = double_normal_subquotient(3, {1, 2}, {2, 3}, twist=tw)
    assert sq.summary() == double_normal_gr(3, {1, 2}, {2, 3}).summary()


def test_dnb_coordinate_pullbacks_untwisted():
    sq = double_normal_subquotient(3, {1, 2}, {2, 3})
    for run in sq.samples:
        for nm, p in run.result.pullbacks.items():
            assert len(p.terms) == 1 and sum(next(iter(p.terms))) == 1


def test_flip():
    a = double_normal_gr(4, {1, 2}, {2, 3, 4})
    b = double_normal_gr(4, {2, 3, 4}, {1, 2})
    assert flip(a).summary() == b.summary()
    assert flip(flip(a)) == a
    sq = double_normal_subquotient(4, {1, 2}, {2, 3, 4})
    assert flip(sq).summary() == double_normal_subquotient(4, {2, 3, 4}, {1, 2}).summary()


def test_dnb_bad_index():
    with pytest.raises(UsageError):
        double_normal_gr(2, {3}, set())


# ---------------------------------------------------------------- weighted normal bundles

def test_wnb_example():
    gr = weighted_normal_order2(2, {1, 2}, {1})
    assert gr.graded_dims == {(1,): 1, (2,): 1}
    sq = weighted_normal_order2(2, {1, 2}, {1}, method="subquotient", oracle=True)
    assert (sq.graded_dims, sq.span_dims) == (gr.graded_dims, gr.span_dims)
    assert sq.exact_sequence_ok and sq.linear_ranks == {(1,): 1, (2,): 1}


def test_wnb_order_one():
    sq = weighted_normal_order2(3, {1, 2}, {1, 2}, method="subquotient")
    assert sq.graded_dims == {(1,): 2, (2,): 0}


def test_wnb_twisted():
    C = chart_ring(chart_names(2), 1)
    tw = FiltrationDiffeo(chart_names(2), wnb_weights(2, {1, 2}, {1}), {"u2": C.var("u1") ** 2})
    sq = weighted_normal_order2(2, {1, 2}, {1}, twist=tw, method="subquotient")
    gr = weighted_normal_order2(2, {1, 2}, {1})
    assert (sq.graded_dims, sq.span_dims) == (gr.graded_dims, gr.span_dims)


def test_wnb_J_not_in_I():
    with pytest.raises(UsageError):
        weighted_normal_order2(2, {1}, {2})


def test_wnb_twist_mismatch():
    C = chart_ring(chart_names(2), 1)
    tw = FiltrationDiffeo(chart_names(2), [(0,), (0,)], {})
    with pytest.raises(UsageError):
        weighted_normal_order2(2, {1, 2}, {1}, twist=tw, method="subquotient")


@pytest.mark.parametrize("m,I1,I2", [(3, {1, 2}, {2, 3}), (4, {1}, {1, 2, 3}), (2, set(), {1}), (5, {1, 2, 3}, {1, 2, 3})])
def test_excess_is_computed_from_dimensions(m, I1, I2):
    from gq.geom.normal import excess_rank
    for rep in (double_normal_gr(m, I1, I2), double_normal_subquotient(m, I1, I2)):
        assert rep.excess == excess_rank(m, rep.base_dim, rep.sides) == len(I1 & I2) == rep.core
    assert excess_rank(3, 0, (1, 1)) == 1
