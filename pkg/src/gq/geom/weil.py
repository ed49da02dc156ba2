"""Weil algebras A_{r_1}⊗…⊗A_{r_n} = Q[ε_1..ε_n]/(ε_a^{r_a+1}).

Coefficients may be rationals or Polynomials; only +, * and truthiness
are used, so jets with symbolic entries work unchanged.
"""
from __future__ import annotations

from itertools import product
from typing import Mapping, Sequence

from gmpy2 import mpq

from ..errors import UsageError
from ..grading import to_q


class WeilAlgebra:
    def __init__(self, orders: Sequence[int]):
        orders = tuple(int(r) for r in orders)
        if not orders or min(orders) < 0:
            raise UsageError("Weil algebra orders must be a non-empty tuple of non-negative ints")
        self.orders = orders
        self.basis = tuple(product(*(range(r + 1) for r in orders)))

    @property
    def n(self):
        return len(self.orders)

    def dim(self) -> int:
        out = 1
        for r in self.orders:
            out *= r + 1
        return out

    def __eq__(self, other):
        return isinstance(other, WeilAlgebra) and self.orders == other.orders

    def __hash__(self):
        return hash(self.orders)

    def element(self, coeffs: Mapping) -> "WeilElement":
        return WeilElement(self, coeffs)

    def scalar(self, c) -> "WeilElement":
        return WeilElement(self, {(0,) * self.n: c})

    def eps(self, a: int) -> "WeilElement":
        e = [0] * self.n
        e[a] = 1
        return WeilElement(self, {tuple(e): mpq(1)})

    def __repr__(self):
        return f"WeilAlgebra{self.orders}"


def _scalar(c):
    return c if hasattr(c, "ring") else to_q(c)


class WeilElement:
    __slots__ = ("alg", "c")

    def __init__(self, alg: WeilAlgebra, coeffs: Mapping):
        self.alg = alg
        out = {}
        for e, v in coeffs.items():
            e = tuple(e)
            if len(e) != alg.n:
                raise UsageError(f"exponent {e} has the wrong length")
            if any(k > r for k, r in zip(e, alg.orders)):
                continue
            v = _scalar(v)
            if v:
                out[e] = v
        self.c = out

    def coeff(self, e):
        return self.c.get(tuple(e), 0)

    def _other(self, o):
        if isinstance(o, WeilElement):
            if o.alg != self.alg:
                raise UsageError("Weil algebras differ")
            return o
        return self.alg.scalar(o)

    def __add__(self, o):
        o = self._other(o)
        out = dict(self.c)
        for e, v in o.c.items():
            out[e] = out[e] + v if e in out else v
        return WeilElement(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return WeilElement(self.alg, {e: -v for e, v in self.c.items()})

    def __sub__(self, o):
        return self + (-self._other(o))

    def __mul__(self, o):
        if not isinstance(o, WeilElement):
            o = _scalar(o)
            return WeilElement(self.alg, {e: v * o for e, v in self.c.items()})
        o = self._other(o)
        out = {}
        orders = self.alg.orders
        for e1, v1 in self.c.items():
            for e2, v2 in o.c.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if any(k > r for k, r in zip(e, orders)):
                    continue
                p = v1 * v2
                out[e] = out[e] + p if e in out else p
        return WeilElement(self.alg, out)

    def __rmul__(self, o):
        return self * o

    def __pow__(self, k: int):
        out = self.alg.scalar(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        if not isinstance(o, WeilElement):
            o = self.alg.scalar(o)
        return self.alg == o.alg and (self - o).c == {}

    def __repr__(self):
        return "WeilElement(" + ", ".join(f"{e}: {v}" for e, v in sorted(self.c.items())) + ")"


def jet_evaluate(f, point: Sequence[WeilElement] | Mapping[int, WeilElement]) -> WeilElement:
    """Image of a polynomial f under the algebra morphism u_k ↦ point[k]."""
    if not isinstance(point, Mapping):
        point = dict(enumerate(point))
    if not point:
        raise UsageError("jet point has no coordinates")
    alg = next(iter(point.values())).alg
    out = alg.scalar(0)
    powers = {}
    for e, c in f.terms.items():
        term = alg.scalar(c)
        for i, k in enumerate(e):
            if k:
                key = (i, k)
                if key not in powers:
                    powers[key] = point[i] ** k
                term = term * powers[key]
        out = out + term
    return out


def symmetrize_element(x: WeilElement) -> WeilElement:
    """A_r → A_1^{⊗r}, ε ↦ ε_1 + … + ε_r."""
    if x.alg.n != 1:
        raise UsageError("symmetrize expects an element of A_r")
    r = x.alg.orders[0]
    target = WeilAlgebra((1,) * r) if r else WeilAlgebra((0,))
    s = target.scalar(0)
    for a in range(r):
        s = s + target.eps(a)
    out = target.scalar(0)
    for (k,), v in x.c.items():
        out = out + (s ** k) * v
    return out


def symmetrize_jet(point: Sequence[Sequence]) -> list:
    """A point of T_rM (per coordinate: value, then ε^1..ε^r coefficients)
    sent to T^rM, as per coordinate dicts {multi-index in {0,1}^r: value}."""
    out = []
    for coords in point:
        coords = list(coords)
        r = len(coords) - 1
        if r < 1:
            raise UsageError("jet needs order r ≥ 1")
        A = WeilAlgebra((r,))
        x = A.element({(k,): c for k, c in enumerate(coords)})
        y = symmetrize_element(x)
        out.append({e: y.coeff(e) for e in y.alg.basis})
    return out
