from gmpy2 import mpq
from hypothesis import given, settings, strategies as st
import pytest

from gq.errors import UsageError
from gq.grading import (Subspace, box, leq_partial, maximal_indices, rref,
                        select_maximal, subspace_algebra)


def test_leq_partial_examples():
    assert leq_partial((1, 0), (1, 1))
    assert not leq_partial((1, 0), (0, 1)) and not leq_partial((0, 1), (1, 0))
    assert leq_partial((2,), (2,))


def test_leq_partial_length_mismatch():
    with pytest.raises(UsageError):
        leq_partial((1,), (1, 0))


def test_maximal_indices_examples():
    assert maximal_indices({(1, 0), (0, 1), (1, 1)}) == {(1, 1)}
    assert maximal_indices({(1, 0), (0, 1)}) == {(1, 0), (0, 1)}
    assert select_maximal({(1, 0), (0, 1)}) == (1, 0)
    assert maximal_indices({(2,), (1,)}) == {(2,)}
    with pytest.raises(UsageError):
        maximal_indices(set())


def test_subspace_examples():
    U, W = Subspace.span([[1, 0]], 2), Subspace.span([[0, 1]], 2)
    assert U.intersect(W).dim == 0
    assert (Subspace.span([[1, 1]], 2) + Subspace.span([[1, -1]], 2)) == Subspace.full(2)
    assert U.complement_in(Subspace.full(2)) == W


def test_subspace_algebra_ops():
    U, W = Subspace.span([[1, 0, 0], [0, 1, 0]], 3), Subspace.span([[0, 1, 0], [0, 0, 1]], 3)
    assert subspace_algebra("sum", U, W).dim == 3
    assert subspace_algebra("intersect", U, W) == Subspace.span([[0, 1, 0]], 3)
    assert subspace_algebra("quotient-dims", U, W) == 1
    with pytest.raises(UsageError):
        subspace_algebra("sum", U, Subspace.full(2))


def test_rref_is_canonical():
    rows, piv = rref([[2, 4], [1, 2], [0, 3]], 2)
    assert piv == (0, 1) or list(piv) == [0, 1]
    assert [list(r) for r in rows] == [[1, 0], [0, 1]]


vec = st.lists(st.integers(-3, 3), min_size=4, max_size=4)
spaces = st.lists(vec, max_size=4).map(lambda vs: Subspace.span(vs, 4))


@settings(max_examples=150, deadline=None)
@given(spaces, spaces)
def test_dimension_formula(U, W):
    assert (U + W).dim + U.intersect(W).dim == U.dim + W.dim


@settings(max_examples=150, deadline=None)
@given(spaces, spaces)
def test_complement_is_direct(U, W):
    I = U.intersect(W)
    C = I.complement_in(U)
    assert C.intersect(I).dim == 0 and (C + I) == U


@settings(max_examples=100, deadline=None)
@given(spaces, vec)
def test_reduce_membership(U, v):
    r = U.reduce(v)
    assert U.contains([a - b for a, b in zip(v, r)])
    assert U.contains(v) == (not any(r))


def test_box_order():
    assert list(box((1, 1))) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert mpq(1, 2) + mpq(1, 2) == 1
