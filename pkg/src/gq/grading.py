"""Multi-index bookkeeping and exact graded linear algebra over Q.

Vectors are tuples of ``mpq``.  A :class:`Subspace` always stores its basis
in reduced row echelon form, so two equal subspaces have identical
representations and every derived quantity (complements, coordinates) is
deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import UsageError

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)

MultiIndex = tuple  # tuple[int, ...], entries >= 0
Degree = tuple  # tuple[int, ...], signed


def to_q(x) -> mpq:
    """Coerce ints, Fractions, strings like '3/2' and mpq to mpq."""
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(x.strip())
    return mpq(x)


def fmt_q(x) -> str:
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------- multi-indices

def _check_same_length(i, j):
    if len(i) != len(j):
        raise UsageError(f"multi-index length mismatch: {i} vs {j}")


def leq_partial(i: Sequence[int], j: Sequence[int]) -> bool:
    """Componentwise order: ``i <= j`` iff every entry of i is <= that of j."""
    _check_same_length(i, j)
    return all(a <= b for a, b in zip(i, j))


def add(i, j):
    _check_same_length(i, j)
    return tuple(a + b for a, b in zip(i, j))


def sub(i, j):
    _check_same_length(i, j)
    return tuple(a - b for a, b in zip(i, j))


def neg(i):
    return tuple(-a for a in i)


def is_zero(k) -> bool:
    return all(a == 0 for a in k)


def is_nonnegative(k) -> bool:
    return all(a >= 0 for a in k)


def is_strictly_negative(k) -> bool:
    """``k <= 0`` componentwise and ``k != 0``."""
    return all(a <= 0 for a in k) and not is_zero(k)


def maximal_indices(S: Iterable[Sequence[int]]) -> set:
    """All elements of S not strictly dominated by another element of S."""
    S = {tuple(s) for s in S}
    if not S:
        raise UsageError("maximal_indices of an empty set")
    return {i for i in S if not any(j != i and leq_partial(i, j) for j in S)}


def select_maximal(S: Iterable[Sequence[int]]) -> tuple:
    """Deterministic choice: the lexicographically largest maximal index."""
    return max(maximal_indices(S))


def box(upper: Sequence[int]):
    """All multi-indices ``0 <= k <= upper`` in lexicographic order."""
    out = [()]
    for u in upper:
        out = [k + (a,) for k in out for a in range(u + 1)]
    return out


# ---------------------------------------------------------------- linear algebra

def rref(rows: Iterable[Sequence], ncols: int):
    """Reduced row echelon form; returns (rows, pivot columns).

    Zero rows are dropped.  Pivots are chosen left to right, which is the
    "pivot rule" used throughout the package.
    """
    m = [list(map(mpq, r)) for r in rows]
    for r in m:
        if len(r) != ncols:
            raise UsageError(f"vector of length {len(r)} in a {ncols}-dim space")
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(m)):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        prow = m[rank]
        inv = 1 / prow[col]
        if inv != 1:
            prow = [x * inv for x in prow]
            m[rank] = prow
        for r in range(len(m)):
            if r != rank:
                f = m[r][col]
                if f != 0:
                    row = m[r]
                    m[r] = [a - f * b for a, b in zip(row, prow)]
        pivots.append(col)
        rank += 1
        if rank == len(m):
            break
    return [tuple(r) for r in m[:rank]], tuple(pivots)


def nullspace(rows: Sequence[Sequence], ncols: int):
    """Basis of {v : A v = 0}, one vector per free column, in RREF order."""
    R, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for r, p in zip(R, piv):
            v[p] = -r[f]
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^dim, stored as an RREF basis."""

    dim_ambient: int
    rows: tuple = ()
    pivots: tuple = ()

    @classmethod
    def span(cls, vectors: Iterable[Sequence], dim_ambient: int) -> "Subspace":
        rows, piv = rref(vectors, dim_ambient)
        return cls(dim_ambient, tuple(rows), piv)

    @classmethod
    def zero(cls, dim_ambient: int) -> "Subspace":
        return cls(dim_ambient)

    @classmethod
    def full(cls, dim_ambient: int) -> "Subspace":
        rows = [tuple(ONE if i == j else ZERO for j in range(dim_ambient))
                for i in range(dim_ambient)]
        return cls(dim_ambient, tuple(rows), tuple(range(dim_ambient)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    def _check(self, other: "Subspace"):
        if self.dim_ambient != other.dim_ambient:
            raise UsageError(
                f"ambient mismatch: {self.dim_ambient} vs {other.dim_ambient}")

    def reduce(self, v: Sequence) -> tuple:
        """Remainder of v after eliminating the pivot entries."""
        v = [mpq(x) for x in v]
        for r, p in zip(self.rows, self.pivots):
            f = v[p]
            if f != 0:
                v = [a - f * b for a, b in zip(v, r)]
        return tuple(v)

    def contains(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def coordinates(self, v: Sequence) -> tuple:
        """Coefficients of v in the RREF basis (v must lie in the span)."""
        if not self.contains(v):
            raise UsageError("vector not in subspace")
        return tuple(mpq(v[p]) for p in self.pivots)

    def __contains__(self, v):
        return self.contains(v)

    def issubspace(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains(r) for r in self.rows)

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.rows + other.rows, self.dim_ambient)

    def intersect(self, other: "Subspace") -> "Subspace":
        # Zassenhaus: rows [u | u] and [w | 0]; zero left halves give U ∩ W.
        self._check(other)
        n = self.dim_ambient
        if not self.rows or not other.rows:
            return Subspace.zero(n)
        zero = (ZERO,) * n
        stacked = [tuple(u) + tuple(u) for u in self.rows]
        stacked += [tuple(w) + zero for w in other.rows]
        R, piv = rref(stacked, 2 * n)
        inter = [r[n:] for r, p in zip(R, piv) if p >= n]
        return Subspace.span(inter, n)

    def complement_in(self, ambient: "Subspace") -> "Subspace":
        """Pivot-rule complement of (self ∩ ambient) inside ambient.

        Walks the RREF rows of ``ambient`` in order and keeps those that are
        independent of what has been collected so far.
        """
        self._check(ambient)
        current = self.intersect(ambient)
        kept = []
        for r in ambient.rows:
            if not current.contains(r):
                kept.append(r)
                current = Subspace.span(current.rows + (r,), self.dim_ambient)
        return Subspace.span(kept, self.dim_ambient)


def subspace_algebra(op: str, U, W):
    """Degreewise sum / intersect / complement / quotient-dims.

    Works on single :class:`Subspace` values or on graded ones, i.e. mappings
    ``degree -> Subspace``.  For ``complement`` the result is the pivot-rule
    complement of U ∩ W inside U; ``quotient-dims`` returns dim(U / U∩W).
    """
    if isinstance(U, Subspace) and isinstance(W, Subspace):
        return _op_single(op, U, W)
    if not isinstance(U, Mapping) or not isinstance(W, Mapping):
        raise UsageError("subspace_algebra needs two Subspaces or two graded subspaces")
    out = {}
    for k in sorted(set(U) | set(W)):
        u = U.get(k)
        w = W.get(k)
        if u is None and w is None:
            continue
        if u is None:
            u = Subspace.zero(w.dim_ambient)
        if w is None:
            w = Subspace.zero(u.dim_ambient)
        out[k] = _op_single(op, u, w)
    return out


def _op_single(op, U: Subspace, W: Subspace):
    if op == "sum":
        return U + W
    if op == "intersect":
        return U.intersect(W)
    if op == "complement":
        return W.complement_in(U)
    if op == "quotient-dims":
        return U.dim - U.intersect(W).dim
    raise UsageError(f"unknown subspace operation {op!r}")
