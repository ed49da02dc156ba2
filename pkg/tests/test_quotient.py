from gmpy2 import mpq
from hypothesis import given, settings, strategies as st
import pytest

from conftest import F, P, ring
from gq import random_instances as ri
from gq.errors import UsageError
from gq.grading import maximal_indices
from gq.nilpotent import GradedSubalgebra
from gq.polyalg import WeightedPolyRing
from gq.quotient import (PolyMorphism, brute_force_dims, brute_force_invariants, compose_check,
                         invariant_span, invariant_span_dims, linear_approximation,
                         split_sequence, staged_quotient)


def heis(R):
    return GradedSubalgebra(R, [F(R, "d(x) + y*d(z)"), F(R, "d(y) + x*d(z)")])


def test_translation_quotient(R1):
    q = staged_quotient(R1, GradedSubalgebra(R1, [F(R1, "d(x1)")]))
    Q = q.quotient_ring
    assert list(zip(Q.names, Q.weights)) == [("x2'", (1,)), ("y'", (2,))]
    assert q.pullbacks == {"x2'": P(R1, "x2"), "y'": P(R1, "y")}
    assert q.kernel_dims() == {(1,): 1}
    assert invariant_span_dims(q, (4,)) == brute_force_dims(R1, q.h, (4,))


def test_dvb_quotient(Rdvb):
    q = staged_quotient(Rdvb, heis(Rdvb))
    assert q.quotient_dims() == {(1, 1): 1}
    assert q.pullbacks == {"z''": P(Rdvb, "z - x*y")}
    assert [(s.index, s.rank) for s in q.stages] == [((1, 0), 1), ((0, 1), 1)]


def test_zero_quotient_is_identity(R1):
    q = staged_quotient(R1, GradedSubalgebra(R1, []))
    assert q.quotient_ring.names == R1.names
    assert all(q.pullbacks[nm] == R1.var(nm) for nm in R1.names)
    assert q.stages == []


def test_tower_eliminates_top_weight_first():
    R = ring("u1:1 u2:2 u3:3")
    q = staged_quotient(R, GradedSubalgebra.full(R))
    assert q.quotient_ring.names == ()
    assert [s.index for s in q.stages] == [(3,), (2,), (1,)]
    assert q.kernel_dims() == {(1,): 1, (2,): 1, (3,): 1}


def test_quotient_refuses_failing_condition(R1):
    h = GradedSubalgebra(R1, [F(R1, "d(x1)"), F(R1, "x1*d(y)"), F(R1, "d(y)")])
    with pytest.raises(UsageError):
        staged_quotient(R1, h)


def test_brute_force_examples(R1, Rdvb):
    inv = brute_force_invariants(R1, GradedSubalgebra(R1, [F(R1, "d(x1)")]), (2,))
    assert [str(p) for p in inv[(1,)]] == ["x2"]
    assert len(inv[(2,)]) == 2
    assert brute_force_dims(R1, GradedSubalgebra(R1, []), (2,)) == {(1,): 2, (2,): 4}
    inv = brute_force_invariants(Rdvb, heis(Rdvb), (1, 1))
    assert inv[(1, 0)] == [] and inv[(0, 1)] == []
    (p,) = inv[(1, 1)]
    assert p * (1 / p.terms[(0, 0, 1)]) == P(Rdvb, "z - x*y")


def test_linear_approximation(Rdvb, R1):
    q = staged_quotient(Rdvb, heis(Rdvb))
    lin = linear_approximation(q)
    assert lin[(1, 1)] == [[1]] and lin[(1, 0)] == [] and lin[(0, 1)] == []
    ident = staged_quotient(R1, GradedSubalgebra(R1, []))
    assert linear_approximation(ident) == {(1,): [[1, 0], [0, 1]], (2,): [[1]]}
    T = ring("t:1")
    m = PolyMorphism(ring("x1:1 x2:1"), T, {"t": P(ring("x1:1 x2:1"), "2*x1 + 3*x2")})
    assert linear_approximation(m) == {(1,): [[2, 3]]}


def test_split_examples(Rdvb, R1):
    q = staged_quotient(Rdvb, heis(Rdvb))
    j = split_sequence(q)
    Q = q.quotient_ring
    assert j == {"x": Q.zero(), "y": Q.zero(), "z": Q.var("z''")}
    assert compose_check(q, j)
    ident = staged_quotient(R1, GradedSubalgebra(R1, []))
    assert split_sequence(ident) == {nm: ident.quotient_ring.var(nm) for nm in R1.names}
    S = ring("x1:1 x2:1")
    T = ring("t:1")
    m = PolyMorphism(S, T, {"t": P(S, "x1 + x2")})
    assert split_sequence(m) == {"x1": T.var("t"), "x2": T.zero()}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_staged_matches_oracle(seed):
    rng = ri.rng_for(seed, 0, "hyp-oracle")
    R, h = ri.random_valid_pair(rng)
    q = staged_quotient(R, h)
    dmax = (3,) * R.n
    assert invariant_span_dims(q, dmax) == brute_force_dims(R, h, dmax)
    assert compose_check(q, split_sequence(q))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_stage_order_independent(seed):
    rng = ri.rng_for(seed, 0, "hyp-order")
    R, h = ri.random_valid_pair(rng)
    q1 = staged_quotient(R, h)
    q2 = staged_quotient(R, h, selector=lambda S: min(maximal_indices(S)))
    for k in invariant_span_dims(q1, (3,) * R.n):
        assert invariant_span(q1, k) == invariant_span(q2, k)
