"""The nilpotent Lie algebra g = V(E)^{<0} and its group of substitutions.

Everything here assumes a ring without base variables (finite slots).
Callers with base coordinates specialise them first (see ``geom``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import UsageError
from .grading import (Subspace, box, is_strictly_negative, is_zero, leq_partial,
                      neg, sub)
from .polyalg import (Derivation, Polynomial, WeightedPolyRing, bracket,
                      graded_piece, restrict_to_base_at)

# ---------------------------------------------------------------- subalgebras


def negative_degrees(ring: WeightedPolyRing) -> list:
    """Degrees k with −r ≤ k ≤ 0, k ≠ 0 and V^k ≠ 0 (r = max weight)."""
    r = ring.max_weight()
    out = []
    for i in box(r):
        if is_zero(i):
            continue
        k = neg(i)
        if ring.slot_basis(k):
            out.append(k)
    return sorted(out, reverse=True)


def _canonical_fields(ring, k, fields) -> list:
    vecs = [X.to_vector(k) for X in fields]
    S = Subspace.span(vecs, len(ring.slot_basis(k)))
    return [Derivation.from_vector(ring, k, r) for r in S.rows]


class GradedSubalgebra:
    """A graded subspace of g given by homogeneous negative-degree fields.

    The constructor splits generators into homogeneous parts, checks that
    every part has strictly negative degree and stores per-degree RREF
    bases.  Closure under bracket is *not* imposed; see :func:`check_closed`
    and :func:`lie_closure`.
    """

    def __init__(self, ring: WeightedPolyRing, generators: Iterable[Derivation] = ()):
        self.ring = ring
        by_degree: dict = {}
        for X in generators:
            if X.ring != ring:
                raise UsageError("generator lives in a different ring")
            for d, part in X.homogeneous_parts().items():
                if not is_strictly_negative(d):
                    raise UsageError(
                        f"generator {X} has a component of degree {d}, which is not strictly negative")
                by_degree.setdefault(d, []).append(part)
        self.spaces = {}
        self.basis = {}
        for d in sorted(by_degree, reverse=True):
            vecs = [X.to_vector(d) for X in by_degree[d]]
            S = Subspace.span(vecs, len(ring.slot_basis(d)))
            if S.dim:
                self.spaces[d] = S
                self.basis[d] = [Derivation.from_vector(ring, d, r) for r in S.rows]

    @classmethod
    def from_spaces(cls, ring, spaces: dict) -> "GradedSubalgebra":
        h = cls(ring)
        for d in sorted(spaces, reverse=True):
            S = spaces[d]
            if S.dim:
                h.spaces[d] = S
                h.basis[d] = [Derivation.from_vector(ring, d, r) for r in S.rows]
        return h

    @classmethod
    def full(cls, ring) -> "GradedSubalgebra":
        """All of g = V(E)^{<0}."""
        spaces = {k: Subspace.full(len(ring.slot_basis(k))) for k in negative_degrees(ring)}
        return cls.from_spaces(ring, spaces)

    def degrees(self) -> list:
        return list(self.spaces)

    def support(self) -> set:
        """Multi-indices i with h^{-i} ≠ 0."""
        return {neg(d) for d in self.spaces}

    def dims(self) -> dict:
        return {neg(d): S.dim for d, S in self.spaces.items()}

    def dim(self) -> int:
        return sum(S.dim for S in self.spaces.values())

    def ordered_degrees(self) -> list:
        """Degrees sorted by their multi-index −d, lexicographically descending."""
        return sorted(self.basis, key=neg, reverse=True)

    def basis_list(self) -> list:
        """Basis ordered by degree (see ``ordered_degrees``), then basis index."""
        return [X for d in self.ordered_degrees() for X in self.basis[d]]

    def space(self, k) -> Subspace:
        k = tuple(k)
        if k in self.spaces:
            return self.spaces[k]
        return Subspace.zero(len(self.ring.slot_basis(k)))

    def contains(self, X: Derivation) -> bool:
        for d, part in X.homogeneous_parts().items():
            if d not in self.spaces or not self.spaces[d].contains(part.to_vector(d)):
                return False
        return True

    def is_zero(self) -> bool:
        return not self.spaces

    def __eq__(self, other):
        return (isinstance(other, GradedSubalgebra) and self.ring == other.ring
                and self.spaces == other.spaces)

    def issubalgebra_of(self, other: "GradedSubalgebra") -> bool:
        return all(other.space(d).contains(r) for d, S in self.spaces.items() for r in S.rows)

    def __add__(self, other: "GradedSubalgebra") -> "GradedSubalgebra":
        return GradedSubalgebra(self.ring, self.basis_list() + other.basis_list())

    def __repr__(self):
        dims = ", ".join(f"{d}:{S.dim}" for d, S in self.spaces.items())
        return f"GradedSubalgebra({dims})"


@dataclass
class ClosureReport:
    closed: bool
    witness: tuple | None = None  # (X, Y, [X, Y])

    def __bool__(self):
        return self.closed


def check_closed(h: GradedSubalgebra) -> ClosureReport:
    """Is the degreewise span closed under bracket?  Witness on failure."""
    B = h.basis_list()
    for a in range(len(B)):
        for b in range(a + 1, len(B)):
            Z = bracket(B[a], B[b])
            if Z and not h.contains(Z):
                return ClosureReport(False, (B[a], B[b], Z))
    return ClosureReport(True)


def lie_closure(ring: WeightedPolyRing, generators: Iterable[Derivation]) -> GradedSubalgebra:
    """Smallest graded subalgebra containing the generators."""
    h = GradedSubalgebra(ring, generators)
    while True:
        B = h.basis_list()
        new = []
        for a in range(len(B)):
            for b in range(a + 1, len(B)):
                Z = bracket(B[a], B[b])
                if Z and not h.contains(Z):
                    new.append(Z)
        if not new:
            return h
        h = GradedSubalgebra(ring, B + new)


# ---------------------------------------------------------------- quotient condition

def augmentation_slot(ring, k) -> Subspace:
    """g⁺ ∩ V^k: the slot vectors whose monomial is non-constant."""
    basis = ring.slot_basis(k)
    rows = []
    for j, (v, e) in enumerate(basis):
        if any(e):
            rows.append(tuple(1 if t == j else 0 for t in range(len(basis))))
    return Subspace.span(rows, len(basis))


@dataclass
class ConditionReport:
    """Outcome of the quotient criterion, degree by degree."""

    holds: bool
    failures: list = field(default_factory=list)  # (degree, lhs, rhs)
    ring: WeightedPolyRing | None = None

    def __bool__(self):
        return self.holds

    @property
    def witness(self):
        return self.failures[0] if self.failures else None


def _condition_sides(h: GradedSubalgebra):
    ring = h.ring
    gens = h.basis_list()
    for k in negative_degrees(ring):
        lhs = h.space(k).intersect(augmentation_slot(ring, k))
        rhs = graded_piece(gens, "augmentation", k, ring=ring)
        yield k, lhs, rhs


def check_condition(h: GradedSubalgebra, assume_closed: bool = False) -> ConditionReport:
    """h ∩ P⁺g = P⁺h ∩ g in every negative degree.

    ``assume_closed`` skips the bracket check for callers that just ran it.
    """
    cl = ClosureReport(True) if assume_closed else check_closed(h)
    if not cl:
        raise UsageError(f"check_condition: subalgebra is not closed, [{cl.witness[0]}, "
                         f"{cl.witness[1]}] = {cl.witness[2]}")
    failures = [(k, lhs, rhs) for k, lhs, rhs in _condition_sides(h) if lhs != rhs]
    return ConditionReport(not failures, failures, h.ring)


def check_weak_condition(k: GradedSubalgebra) -> ConditionReport:
    """k ∩ P⁺g ⊆ P⁺k ∩ g in every negative degree."""
    failures = [(d, lhs, rhs) for d, lhs, rhs in _condition_sides(k) if not lhs.issubspace(rhs)]
    return ConditionReport(not failures, failures, k.ring)


def saturate(k: GradedSubalgebra) -> GradedSubalgebra:
    """h = P(E)·k ∩ g, computed degreewise."""
    ring = k.ring
    gens = k.basis_list()
    if not gens:
        return k
    spaces = {d: graded_piece(gens, "all", d, ring=ring) for d in negative_degrees(ring)}
    return GradedSubalgebra.from_spaces(ring, spaces)


# ---------------------------------------------------------------- group elements

class GroupElement:
    """Substitution automorphism ``x_v -> images[v]`` of a weighted ring.

    Composition ``a ∘ b`` is composition of pullback operators on
    functions: ``(a ∘ b)*(f) = a*(b*(f))``.  With this convention
    ``exp(X) ∘ exp(Y) = exp(bch(X, Y))``.  On points, ``(a ∘ b)·p = b·(a·p)``.
    """

    __slots__ = ("ring", "images", "log")

    def __init__(self, ring: WeightedPolyRing, images: dict, log: Derivation | None = None):
        self.ring = ring
        self.images = {v: images.get(v, ring.var(v)) for v in range(len(ring.names))}
        self.log = log

    @classmethod
    def identity(cls, ring):
        return cls(ring, {}, Derivation.zero(ring))

    def pullback(self, f: Polynomial) -> Polynomial:
        return f.subs(self.images, self.ring)

    def compose(self, other: "GroupElement") -> "GroupElement":
        if other.ring != self.ring:
            raise UsageError("composing group elements of different rings")
        return GroupElement(self.ring, {v: self.pullback(p) for v, p in other.images.items()})

    __matmul__ = compose

    def inverse(self) -> "GroupElement":
        if self.log is None:
            raise UsageError("inverse needs the logarithm")
        return exp_automorphism(-self.log)

    def act(self, point: Sequence) -> tuple:
        """Image of a point (coordinates in ring order)."""
        return tuple(self.images[v].evaluate(point) for v in range(len(self.ring.names)))

    def is_identity(self) -> bool:
        return all(p == self.ring.var(v) for v, p in self.images.items())

    def is_triangular(self) -> bool:
        """σ(x_v) − x_v only has components of weight strictly below wt(x_v)."""
        for v, p in self.images.items():
            wv = self.ring.weights[v]
            for w in (p - self.ring.var(v)).weight_decompose():
                if w == wv or not leq_partial(w, wv):
                    return False
        return True

    def __eq__(self, other):
        return (isinstance(other, GroupElement) and self.ring == other.ring
                and self.images == other.images)

    def __repr__(self):
        body = ", ".join(f"{self.ring.names[v]} -> {p}" for v, p in self.images.items()
                         if p != self.ring.var(v))
        return f"GroupElement({body or 'id'})"


def _require_negative(X: Derivation):
    for d in X.degrees():
        if not is_strictly_negative(d):
            raise UsageError(f"{X} has a component of degree {d}; need strictly negative degrees")


def exp_series(X: Derivation, f: Polynomial, limit: int = 10_000) -> Polynomial:
    """Σ_k X^k(f)/k!; terminates when X strictly lowers weight."""
    total = f
    term = f
    k = 0
    while True:
        k += 1
        term = X(term)
        if term.is_zero():
            return total
        if k > limit:
            raise UsageError("exponential series does not terminate")
        term = term / k
        total = total + term


def exp_automorphism(X: Derivation) -> GroupElement:
    """Exact exponential of a negative-degree field as a substitution."""
    _require_negative(X)
    ring = X.ring
    return GroupElement(ring, {v: exp_series(X, ring.var(v)) for v in range(len(ring.names))}, X)


@lru_cache(maxsize=None)
def _dynkin_words(N: int) -> tuple:
    """Coefficients of right-nested bracket words in log(e^X e^Y), length ≤ N.

    Letters: 0 for X, 1 for Y.  Dynkin's formula.
    """
    coeff: dict = {}
    pairs = [(r, s) for r in range(N + 1) for s in range(N + 1) if 1 <= r + s <= N]

    def rec(k, total, word, denom, seqs):
        # seqs is a list of (r, s); called for every prefix with at least one pair
        if seqs:
            c = Fraction((-1) ** (k - 1), k) / (total * denom)
            coeff[word] = coeff.get(word, Fraction(0)) + c
        for r, s in pairs:
            if total + r + s > N:
                continue
            rec(k + 1, total + r + s, word + (0,) * r + (1,) * s,
                denom * factorial(r) * factorial(s), seqs + [(r, s)])

    rec(0, 0, (), 1, [])
    return tuple((w, c) for w, c in sorted(coeff.items()) if c != 0)


def nilpotency_bound(ring: WeightedPolyRing) -> int:
    """Brackets of more than this many negative fields vanish."""
    return max([sum(w) for w in ring.weights] + [1])


def bch(X: Derivation, Y: Derivation) -> Derivation:
    """Z with exp(Z) = exp(X) ∘ exp(Y), via the finite Dynkin series."""
    X._check(Y)
    _require_negative(X)
    _require_negative(Y)
    N = nilpotency_bound(X.ring)
    letters = (X, Y)
    memo = {}

    def nested(word):
        if word in memo:
            return memo[word]
        if len(word) == 1:
            out = letters[word[0]]
        else:
            inner = nested(word[1:])
            out = bracket(letters[word[0]], inner) if inner else inner
        memo[word] = out
        return out

    Z = Derivation.zero(X.ring)
    for word, c in _dynkin_words(N):
        B = nested(word)
        if B:
            Z = Z + B * mpq(c.numerator, c.denominator)
    return Z


# ---------------------------------------------------------------- orbit of the base

@dataclass
class KernelDescription:
    """Graded dims of E' = H·M plus an explicit parametrization."""

    dims: dict  # multi-index -> rank
    slice_fields: list  # basis of S ⊂ h complementary to h⁺, parameter order
    parameter_ring: WeightedPolyRing
    parametrization: dict  # variable name -> Polynomial in parameters


def complement_of_augmentation(h: GradedSubalgebra) -> dict:
    """Per degree, the pivot-rule complement S of h⁺ = h ∩ g⁺ inside h."""
    out = {}
    for d, S in h.spaces.items():
        plus = S.intersect(augmentation_slot(h.ring, d))
        comp = plus.complement_in(S)
        if comp.dim:
            out[d] = [Derivation.from_vector(h.ring, d, r) for r in comp.rows]
    return out


def orbit_through_origin(h: GradedSubalgebra, check: bool = True) -> KernelDescription:
    """The kernel E' = H·M as graded dims and a polynomial parametrization.

    The parametrization is the ordered product exp(s_1 Y_1)···exp(s_d Y_d)
    applied to the origin, Y_a running over the complement S of h⁺ in
    decreasing degree order.
    """
    if check:
        rep = check_condition(h)
        if not rep:
            raise UsageError(f"orbit_through_origin: condition fails in degree {rep.witness[0]}")
    ring = h.ring
    S = complement_of_augmentation(h)
    fields = [(d, Y) for d in sorted(S, key=neg, reverse=True) for Y in S[d]]
    dims = {}
    for d, Ys in S.items():
        dims[neg(d)] = len(Ys)
    params = WeightedPolyRing([(f"s{a + 1}", neg(d)) for a, (d, _) in enumerate(fields)]) \
        if fields else WeightedPolyRing.empty(ring.n)
    point = {v: params.zero() for v in range(len(ring.names))}
    for a in reversed(range(len(fields))):
        Y = fields[a][1]
        s = params.var(a)
        new = {}
        for v in range(len(ring.names)):
            acc = params.zero()
            term = ring.var(v)
            k = 0
            spow = params.one()
            while not term.is_zero():
                acc = acc + spow * term.subs(point, params) / factorial(k)
                term = Y(term)
                k += 1
                spow = spow * s
            new[v] = acc
        point = new
    param = {ring.names[v]: p for v, p in point.items()}
    return KernelDescription(dims, [Y for _, Y in fields], params, param)


def evaluation_rank(h: GradedSubalgebra, i) -> int:
    """Rank of evaluation at the origin on h^{-i}."""
    d = neg(tuple(i))
    if d not in h.basis:
        return 0
    vecs = [restrict_to_base_at(X, i) for X in h.basis[d]]
    return Subspace.span(vecs, len(h.ring.vars_of_weight(i))).dim
