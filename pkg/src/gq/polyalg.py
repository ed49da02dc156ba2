"""Weighted polynomial rings, polynomials and polynomial vector fields.

A :class:`WeightedPolyRing` is the fiberwise model P(E) of a multigraded
bundle: each variable carries a weight in N^n.  Weight-zero variables are
"base" coordinates; they are allowed but make homogeneous slots infinite,
so slot enumeration refuses them.

Polynomials are dictionaries ``exponent tuple -> mpq``.  Derivations are
dictionaries ``variable index -> Polynomial`` standing for Σ p_v ∂/∂x_v.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import UnsupportedError, UsageError
from .grading import (ZERO, Subspace, add, fmt_q, is_nonnegative, is_zero,
                      neg, sub, to_q)


class WeightedPolyRing:
    """Polynomial ring over Q with multigraded variables."""

    __slots__ = ("names", "weights", "n", "_index", "_hash")

    def __init__(self, variables: Iterable[tuple[str, Sequence[int]]]):
        variables = list(variables)
        names = tuple(v[0] for v in variables)
        weights = tuple(tuple(int(a) for a in v[1]) for v in variables)
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate variable names in {names}")
        ns = {len(w) for w in weights}
        if len(ns) > 1:
            raise UsageError("all weights must have the same length")
        for w in weights:
            if not is_nonnegative(w):
                raise UsageError(f"negative weight {w}")
        self.names = names
        self.weights = weights
        self.n = ns.pop() if ns else 1
        self._index = {nm: i for i, nm in enumerate(names)}
        self._hash = hash((names, weights))

    @classmethod
    def empty(cls, n: int) -> "WeightedPolyRing":
        r = cls([])
        r.n = n
        return r

    # identity -----------------------------------------------------------
    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, WeightedPolyRing) and self.names == other.names
                and self.weights == other.weights and self.n == other.n)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{nm}:{_fmt_weight(w)}" for nm, w in zip(self.names, self.weights))
        return f"WeightedPolyRing({body})"

    def __len__(self):
        return len(self.names)

    # variables ----------------------------------------------------------
    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UsageError(f"unknown variable {name!r}") from None

    def var(self, name_or_index) -> "Polynomial":
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        e = [0] * len(self.names)
        e[i] = 1
        return Polynomial(self, {tuple(e): mpq(1)})

    def gens(self):
        return [self.var(i) for i in range(len(self.names))]

    def const(self, c) -> "Polynomial":
        c = to_q(c)
        if c == 0:
            return Polynomial(self, {})
        return Polynomial(self, {(0,) * len(self.names): c})

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    @property
    def zero_weight(self):
        return (0,) * self.n

    @property
    def base_indices(self):
        return tuple(i for i, w in enumerate(self.weights) if is_zero(w))

    @property
    def has_base(self) -> bool:
        return bool(self.base_indices)

    def vars_of_weight(self, w) -> tuple:
        w = tuple(w)
        return tuple(i for i, wi in enumerate(self.weights) if wi == w)

    def weight_support(self) -> list:
        return sorted({w for w in self.weights if not is_zero(w)})

    def max_weight(self) -> tuple:
        """Componentwise maximum of the variable weights."""
        if not self.weights:
            return self.zero_weight
        return tuple(max(w[a] for w in self.weights) for a in range(self.n))

    def monomial_weight(self, e) -> tuple:
        out = [0] * self.n
        for ei, w in zip(e, self.weights):
            if ei:
                for a in range(self.n):
                    out[a] += ei * w[a]
        return tuple(out)

    # slot enumeration ------------------------------------------------------
    def _require_no_base(self):
        if self.has_base:
            raise UnsupportedError(
                "homogeneous slots are infinite-dimensional when base variables are present")

    def monomials_of_weight(self, k) -> tuple:
        """Exponent vectors of weight exactly k, in the ring's monomial order."""
        self._require_no_base()
        return _monomials_of_weight(self.weights, tuple(k))

    def slot_basis(self, k) -> tuple:
        """Basis (var index, exponent) of the derivation slot V^k."""
        self._require_no_base()
        return _slot_basis(self.weights, tuple(k))

    def sort_key(self, e):
        """Graded lexicographic key: total weight first, then variable order."""
        return (sum(self.monomial_weight(e)), tuple(-x for x in e))

    def rename(self, mapping: Mapping[str, str]) -> "WeightedPolyRing":
        return WeightedPolyRing([(mapping.get(nm, nm), w) for nm, w in zip(self.names, self.weights)])


@lru_cache(maxsize=None)
def _monomials_of_weight(weights: tuple, k: tuple) -> tuple:
    n = len(k)
    nv = len(weights)
    out = []

    def rec(i, remaining, current):
        if i == nv:
            if is_zero(remaining):
                out.append(tuple(current))
            return
        w = weights[i]
        e = 0
        rem = remaining
        while is_nonnegative(rem):
            current.append(e)
            rec(i + 1, rem, current)
            current.pop()
            if is_zero(w):
                break
            e += 1
            rem = tuple(rem[a] - w[a] for a in range(n))

    rec(0, k, [])
    # fixed order: larger exponents on earlier variables first
    out.sort(key=lambda e: tuple(-x for x in e))
    return tuple(out)


@lru_cache(maxsize=None)
def _slot_basis(weights: tuple, k: tuple) -> tuple:
    out = []
    for v, w in enumerate(weights):
        m = add(k, w)
        if not is_nonnegative(m):
            continue
        for e in _monomials_of_weight(weights, m):
            out.append((v, e))
    return tuple(out)


def _fmt_weight(w):
    return str(w[0]) if len(w) == 1 else "(" + ",".join(map(str, w)) + ")"


# ====================================================================== Polynomial

class Polynomial:
    """Polynomial with exact rational coefficients over a WeightedPolyRing."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: WeightedPolyRing, terms: Mapping[tuple, mpq] | None = None):
        self.ring = ring
        self.terms = {e: c for e, c in (terms or {}).items() if c != 0}

    # construction helpers -------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring is not self.ring and other.ring != self.ring:
                raise UsageError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        return self.ring.const(other)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, ZERO) + c
        return Polynomial(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Derivation):
            return other.__rmul__(self)
        if not isinstance(other, Polynomial):
            c = to_q(other)
            if c == 0:
                return Polynomial(self.ring, {})
            return Polynomial(self.ring, {e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, ZERO) + c1 * c2
        return Polynomial(self.ring, t)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = to_q(c)
        return self * (1 / c)

    def __pow__(self, k: int):
        if k < 0:
            raise UsageError("negative power")
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self.terms == self.ring.const(other).terms
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # calculus -------------------------------------------------------------
    def diff(self, i) -> "Polynomial":
        if isinstance(i, str):
            i = self.ring.index(i)
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                e2 = tuple(e2)
                t[e2] = t.get(e2, ZERO) + c * e[i]
        return Polynomial(self.ring, t)

    def subs(self, images: Mapping[int, "Polynomial"], target: WeightedPolyRing | None = None) -> "Polynomial":
        """Substitute ``x_i -> images[i]``; unmapped variables must exist in target.

        ``target`` defaults to the ring of the images (or self.ring when no
        images are given).  Variables absent from ``images`` are carried over
        by name.
        """
        if target is None:
            target = next((p.ring for p in images.values()), self.ring)
        img = {}
        for i in range(len(self.ring.names)):
            if i in images:
                p = images[i]
                img[i] = p if isinstance(p, Polynomial) else target.const(p)
            else:
                img[i] = None
        powers = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                if img[i] is None:
                    powers[key] = target.var(self.ring.names[i]) ** k
                else:
                    powers[key] = img[i] ** k
            return powers[key]

        out = target.zero()
        acc = {}
        for e, c in self.terms.items():
            term = target.const(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            for e2, c2 in term.terms.items():
                acc[e2] = acc.get(e2, ZERO) + c2
        out = Polynomial(target, acc)
        return out

    def subs_names(self, images: Mapping[str, object], target=None) -> "Polynomial":
        return self.subs({self.ring.index(k): v for k, v in images.items()}, target)

    def evaluate(self, point: Mapping[int, object] | Sequence):
        """Value at a point; ``point`` is a sequence or index -> value map."""
        if not isinstance(point, Mapping):
            point = dict(enumerate(point))
        total = ZERO
        for e, c in self.terms.items():
            v = c
            for i, k in enumerate(e):
                if k:
                    v = v * to_q(point[i]) ** k
            total += v
        return total

    # grading --------------------------------------------------------------
    def weight_decompose(self) -> dict:
        out = {}
        for e, c in self.terms.items():
            w = self.ring.monomial_weight(e)
            out.setdefault(w, {})[e] = c
        return {w: Polynomial(self.ring, t) for w, t in sorted(out.items())}

    def is_homogeneous(self) -> bool:
        return len({self.ring.monomial_weight(e) for e in self.terms}) <= 1

    def weight(self):
        """Weight of a nonzero homogeneous polynomial."""
        ws = {self.ring.monomial_weight(e) for e in self.terms}
        if len(ws) != 1:
            raise UsageError("weight() of a zero or non-homogeneous polynomial")
        return ws.pop()

    def constant_term(self) -> mpq:
        return self.terms.get((0,) * len(self.ring.names), ZERO)

    def in_augmentation(self) -> bool:
        """Every monomial contains a positive-weight variable."""
        return all(not is_zero(self.ring.monomial_weight(e)) for e in self.terms)

    def linear_coefficient(self, i) -> mpq:
        e = [0] * len(self.ring.names)
        e[i] = 1
        return self.terms.get(tuple(e), ZERO)

    def variables(self) -> set:
        return {i for e in self.terms for i, k in enumerate(e) if k}

    def coefficient_vector(self, monomials: Sequence[tuple]) -> tuple:
        return tuple(self.terms.get(e, ZERO) for e in monomials)

    def change_ring(self, target: WeightedPolyRing) -> "Polynomial":
        """Reinterpret in a ring containing all used variables by name."""
        pos = [target.index(nm) for nm in self.ring.names]
        t = {}
        nt = len(target.names)
        for e, c in self.terms.items():
            e2 = [0] * nt
            for i, k in enumerate(e):
                if k:
                    e2[pos[i]] = k
            t[tuple(e2)] = c
        return Polynomial(target, t)

    # printing -------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda ec: self.ring.sort_key(ec[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                nm if k == 1 else f"{nm}^{k}"
                for nm, k in zip(self.ring.names, e) if k)
            if not mono:
                s = fmt_q(abs(c))
            elif abs(c) == 1:
                s = mono
            else:
                s = f"{fmt_q(abs(c))}*{mono}"
            parts.append(("-" if c < 0 else "+", s))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, s in parts[1:]:
            out += f" {sign} {s}"
        return out

    def __repr__(self):
        return f"Polynomial({self})"


def weight_decompose(f: Polynomial) -> dict:
    """Map degree -> homogeneous component (zero components omitted)."""
    return f.weight_decompose()


def dim_component(R: WeightedPolyRing, k) -> int:
    """Number of monomials of weight k (= dim P^k)."""
    return len(R.monomials_of_weight(k))


# ====================================================================== Derivation

class Derivation:
    """Polynomial vector field Σ p_v ∂/∂x_v on a WeightedPolyRing."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: WeightedPolyRing, coeffs: Mapping[int, Polynomial] | None = None):
        self.ring = ring
        clean = {}
        for v, p in (coeffs or {}).items():
            if isinstance(v, str):
                v = ring.index(v)
            if not isinstance(p, Polynomial):
                p = ring.const(p)
            elif p.ring is not ring and p.ring != ring:
                raise UsageError("coefficient lives in a different ring")
            if p.terms:
                clean[v] = p
        self.coeffs = dict(sorted(clean.items()))

    @classmethod
    def partial(cls, ring: WeightedPolyRing, name_or_index, coeff=None) -> "Derivation":
        i = name_or_index if isinstance(name_or_index, int) else ring.index(name_or_index)
        return cls(ring, {i: ring.one() if coeff is None else coeff})

    @classmethod
    def zero(cls, ring):
        return cls(ring, {})

    def _check(self, other: "Derivation"):
        if not isinstance(other, Derivation) or other.ring != self.ring:
            raise UsageError("derivations live in different rings")

    def __call__(self, f: Polynomial) -> Polynomial:
        if f.ring is not self.ring and f.ring != self.ring:
            raise UsageError("derivation applied to a polynomial of another ring")
        acc = {}
        for v, p in self.coeffs.items():
            d = f.diff(v)
            if d.terms:
                for e, c in (p * d).terms.items():
                    acc[e] = acc.get(e, ZERO) + c
        return Polynomial(self.ring, acc)

    def __add__(self, other):
        self._check(other)
        c = dict(self.coeffs)
        for v, p in other.coeffs.items():
            c[v] = c[v] + p if v in c else p
        return Derivation(self.ring, c)

    def __neg__(self):
        return Derivation(self.ring, {v: -p for v, p in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, Polynomial):
            return self.__rmul__(c)
        c = to_q(c)
        return Derivation(self.ring, {v: p * c for v, p in self.coeffs.items()})

    def __rmul__(self, c):
        if isinstance(c, Polynomial):
            if c.ring != self.ring:
                raise UsageError("ring mismatch in p*X")
            return Derivation(self.ring, {v: c * p for v, p in self.coeffs.items()})
        return self.__mul__(c)

    def __eq__(self, other):
        return (isinstance(other, Derivation) and self.ring == other.ring
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.ring, tuple((v, p) for v, p in self.coeffs.items())))

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    # grading --------------------------------------------------------------
    def homogeneous_parts(self) -> dict:
        """Map degree -> homogeneous Derivation; deg(p ∂_v) = deg p - wt(x_v)."""
        parts = {}
        for v, p in self.coeffs.items():
            wv = self.ring.weights[v]
            for e, c in p.terms.items():
                d = sub(self.ring.monomial_weight(e), wv)
                parts.setdefault(d, {}).setdefault(v, {})[e] = c
        return {d: Derivation(self.ring, {v: Polynomial(self.ring, t) for v, t in cs.items()})
                for d, cs in sorted(parts.items())}

    def degrees(self) -> set:
        out = set()
        for v, p in self.coeffs.items():
            wv = self.ring.weights[v]
            for e in p.terms:
                out.add(sub(self.ring.monomial_weight(e), wv))
        return out

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self):
        ds = self.degrees()
        if len(ds) != 1:
            raise UsageError("degree() of a zero or non-homogeneous derivation")
        return ds.pop()

    def in_augmentation(self) -> bool:
        """All coefficients lie in P⁺ (the field vanishes along the base)."""
        return all(p.in_augmentation() for p in self.coeffs.values())

    # slot coordinates -----------------------------------------------------
    def to_vector(self, k) -> tuple:
        """Coordinates in the slot basis of V^k (must be homogeneous of degree k)."""
        basis = self.ring.slot_basis(k)
        pos = _slot_positions(self.ring.weights, tuple(k))
        vec = [ZERO] * len(basis)
        for v, p in self.coeffs.items():
            for e, c in p.terms.items():
                j = pos.get((v, e))
                if j is None:
                    raise UsageError(f"derivation {self} has a term outside V^{k}")
                vec[j] = c
        return tuple(vec)

    @classmethod
    def from_vector(cls, ring: WeightedPolyRing, k, vec: Sequence) -> "Derivation":
        basis = ring.slot_basis(k)
        acc = {}
        for (v, e), c in zip(basis, vec):
            if c != 0:
                acc.setdefault(v, {})[e] = mpq(c)
        return cls(ring, {v: Polynomial(ring, t) for v, t in acc.items()})

    def subs(self, images, target: WeightedPolyRing, var_map: Mapping[int, int]) -> "Derivation":
        """Substitute in coefficients and relabel ∂ directions via ``var_map``.

        Components whose direction is missing from ``var_map`` are dropped;
        callers check beforehand that they vanish where required.
        """
        out = {}
        for v, p in self.coeffs.items():
            if v in var_map:
                out[var_map[v]] = p.subs(images, target)
        return Derivation(target, out)

    def __str__(self):
        if not self.coeffs:
            return "0"
        pieces = []
        for v, p in self.coeffs.items():
            d = f"d({self.ring.names[v]})"
            terms = p.sorted_terms()
            if len(terms) == 1:
                (e, c), = terms
                mono = Polynomial(self.ring, {e: abs(c)})
                if mono == self.ring.one():
                    s = d
                else:
                    s = f"{mono}*{d}"
                pieces.append(("-" if c < 0 else "+", s))
            else:
                pieces.append(("+", f"({p})*{d}"))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, s in pieces[1:]:
            out += f" {sign} {s}"
        return out

    def __repr__(self):
        return f"Derivation({self})"


@lru_cache(maxsize=None)
def _slot_positions(weights, k):
    return {key: j for j, key in enumerate(_slot_basis(weights, k))}


def bracket(X: Derivation, Y: Derivation) -> Derivation:
    """Lie bracket [X, Y] = X∘Y − Y∘X."""
    X._check(Y)
    ring = X.ring
    out = {}
    for v in set(X.coeffs) | set(Y.coeffs):
        c = ring.zero()
        if v in Y.coeffs:
            c = c + X(Y.coeffs[v])
        if v in X.coeffs:
            c = c - Y(X.coeffs[v])
        out[v] = c
    return Derivation(ring, out)


def restrict_to_base(X: Derivation) -> tuple:
    """Value along the base of a homogeneous field of degree −i, i ∈ N^n \\ {0}.

    Returns the constant terms of the coefficients of ∂/∂x_v over the
    variables of weight exactly i, in ring order (see ``vars_of_weight``).
    """
    if X.is_zero():
        raise UsageError("restrict_to_base needs a nonzero homogeneous field; "
                         "use restrict_to_base_at for zero fields")
    if not X.is_homogeneous():
        raise UsageError("restrict_to_base: derivation is not homogeneous")
    return restrict_to_base_at(X, neg(X.degree()))


def restrict_to_base_at(X: Derivation, i) -> tuple:
    i = tuple(i)
    if not is_nonnegative(i) or is_zero(i):
        raise UsageError(f"restrict_to_base: degree {neg(i)} is not strictly negative")
    out = []
    for v in X.ring.vars_of_weight(i):
        p = X.coeffs.get(v)
        out.append(p.constant_term() if p is not None else ZERO)
    return tuple(out)


def graded_piece(generators: Iterable[Derivation], multipliers: str, degree,
                 ring: WeightedPolyRing | None = None) -> Subspace:
    """Span of p·X inside V^degree, X a generator, p homogeneous.

    ``multipliers='all'`` lets p range over P, ``'augmentation'`` over P⁺
    (deg p ≠ 0).  Non-homogeneous generators are split into their parts.
    """
    if multipliers not in ("all", "augmentation"):
        raise UsageError(f"multipliers must be 'all' or 'augmentation', not {multipliers!r}")
    generators = list(generators)
    if ring is None:
        if not generators:
            raise UsageError("graded_piece needs a ring when there are no generators")
        ring = generators[0].ring
    degree = tuple(degree)
    basis = ring.slot_basis(degree)
    vecs = []
    for X in generators:
        for d, part in X.homogeneous_parts().items():
            m = sub(degree, d)
            if not is_nonnegative(m):
                continue
            if multipliers == "augmentation" and is_zero(m):
                continue
            for e in ring.monomials_of_weight(m):
                mono = Polynomial(ring, {e: mpq(1)})
                vecs.append((mono * part).to_vector(degree))
    return Subspace.span(vecs, len(basis))
