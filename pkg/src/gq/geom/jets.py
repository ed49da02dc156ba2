"""Jet coordinates on a chart and the lift calculus.

For Weil orders r = (r_1..r_n) the jet ring has one variable u^{(j)} per
chart coordinate u and multi-index j ≤ r, of weight j.  Names: ``u`` for
j = 0, otherwise ``u_`` followed by the digits of j (``u1_2`` on T₂M,
``u1_10`` / ``u1_01`` / ``u1_11`` on TTM).

f^{(j)} is the ε^j coefficient of the universal evaluation, and the lift
X^{(-i)} sends u_k^{(j)} to (X^k)^{(j-i)}, or to 0 unless j - i ≥ 0.
"""
from __future__ import annotations

from functools import cached_property
from typing import Sequence

from gmpy2 import mpq

from ..errors import UsageError
from ..grading import is_nonnegative, is_zero, sub
from ..polyalg import Derivation, Polynomial, WeightedPolyRing
from .weil import WeilAlgebra, jet_evaluate


def chart_ring(names: Sequence[str], n: int = 1) -> WeightedPolyRing:
    return WeightedPolyRing([(nm, (0,) * n) for nm in names])


def jet_name(base: str, j) -> str:
    if is_zero(j):
        return base
    return base + "_" + "".join(str(a) for a in j)


class JetSpace:
    """T_{r_1…r_n} of a chart: rings, universal point and lifts."""

    def __init__(self, names: Sequence[str], orders: Sequence[int]):
        self.names = tuple(names)
        self.weil = WeilAlgebra(orders)
        self.n = self.weil.n
        self.chart = chart_ring(self.names, self.n)
        self.ring = WeightedPolyRing(
            [(jet_name(nm, j), j) for j in self.weil.basis for nm in self.names])

    @property
    def m(self):
        return len(self.names)

    def var(self, k: int, j) -> Polynomial:
        return self.ring.var(jet_name(self.names[k], tuple(j)))

    def var_index(self, k: int, j) -> int:
        return self.ring.index(jet_name(self.names[k], tuple(j)))

    @cached_property
    def universal(self):
        return [self.weil.element({j: self.var(k, j) for j in self.weil.basis})
                for k in range(self.m)]

    def _chart_poly(self, f: Polynomial) -> Polynomial:
        if f.ring != self.chart:
            if set(f.ring.names) <= set(self.names) and all(is_zero(w) for w in f.ring.weights):
                f = f.change_ring(self.chart)
            else:
                raise UsageError("function does not live on this chart")
        return f

    def function_lifts(self, f: Polynomial) -> dict:
        """All f^{(j)} at once."""
        f = self._chart_poly(f)
        val = jet_evaluate(f, self.universal)
        out = {}
        for j in self.weil.basis:
            c = val.coeff(j)
            out[j] = c if isinstance(c, Polynomial) else self.ring.const(c)
        return out

    def lift_function(self, f: Polynomial, j) -> Polynomial:
        j = tuple(j)
        if j not in self.weil.basis:
            raise UsageError(f"lift index {j} outside the Weil orders {self.weil.orders}")
        return self.function_lifts(f)[j]

    def lift_field(self, X: Derivation, i) -> Derivation:
        """X^{(-i)}."""
        i = tuple(i)
        if i not in self.weil.basis:
            raise UsageError(f"lift index {i} outside the Weil orders {self.weil.orders}")
        if X.ring != self.chart:
            X = Derivation(self.chart, {self.chart.index(X.ring.names[v]): p.change_ring(self.chart)
                                        for v, p in X.coeffs.items()})
        coeffs = {}
        for k, p in X.coeffs.items():
            lifts = self.function_lifts(p)
            for j in self.weil.basis:
                d = sub(j, i)
                if is_nonnegative(d):
                    coeffs[self.var_index(k, j)] = lifts[d]
        return Derivation(self.ring, coeffs)


def _pattern_index(pattern, n, kind):
    if isinstance(pattern, str):
        if len(pattern) != n or set(pattern) - {"v", "t"}:
            raise UsageError(f"bad lift pattern {pattern!r} for {n} tangent factor(s)")
        if kind == "function":
            return tuple(0 if ch == "v" else 1 for ch in pattern)
        return tuple(1 if ch == "v" else 0 for ch in pattern)
    if isinstance(pattern, int):
        pattern = (pattern,)
    pattern = tuple(pattern)
    if len(pattern) != n:
        raise UsageError(f"lift index {pattern} has the wrong length")
    return pattern


def lift(obj, pattern, space: JetSpace):
    """Lift of a function or vector field.

    ``pattern`` is either a word in {v, t} (one letter per tangent factor)
    or a multi-index.  For functions the letter v means the pullback and t
    the differential, so f_v = f^{(0)} and f_t = f^{(1)}; for fields v is
    the vertical lift X^{(-1)} and t the tangent lift X^{(0)}.  A
    multi-index i means f^{(i)} for functions and X^{(-i)} for fields.
    """
    if isinstance(obj, Polynomial):
        return space.lift_function(obj, _pattern_index(pattern, space.n, "function"))
    if isinstance(obj, Derivation):
        return space.lift_field(obj, _pattern_index(pattern, space.n, "field"))
    raise UsageError("can only lift polynomials and derivations")


# ---------------------------------------------------------------- filtration twists

class FiltrationDiffeo:
    """φ: u_i ↦ u_i + p_i, each monomial of p_i of weight ≥ wt(u_i).

    Weights are the filtration weights of the construction (one multi-index
    per chart coordinate).  The inverse is computed exactly when the
    dependency graph of the corrections is acyclic.
    """

    def __init__(self, names: Sequence[str], weights: Sequence, corrections: dict):
        self.names = tuple(names)
        self.weights = tuple(tuple(w) for w in weights)
        self.n = len(self.weights[0]) if self.weights else 1
        self.chart = chart_ring(self.names, self.n)
        self.filtered = WeightedPolyRing(list(zip(self.names, self.weights)))
        corr = {}
        for key, p in corrections.items():
            i = key if isinstance(key, int) else self.chart.index(key)
            if not isinstance(p, Polynomial):
                raise UsageError("twist corrections must be polynomials")
            corr[i] = p.change_ring(self.chart)
        self.corrections = corr
        self._validate()
        self.forward = {i: self.chart.var(i) + corr.get(i, self.chart.zero())
                        for i in range(len(self.names))}
        self.inverse = self._invert()

    def _validate(self):
        for i, p in self.corrections.items():
            w = self.weights[i]
            for e, c in p.terms.items():
                mw = self.filtered.monomial_weight(e)
                if not all(a >= b for a, b in zip(mw, w)):
                    mono = Polynomial(self.chart, {e: c})
                    raise UsageError(
                        f"twist of {self.names[i]} violates the filtration: monomial {mono} "
                        f"has weight {mw}, needs ≥ {w}")
                if sum(e) == 1 and e[i] == 1:
                    raise UsageError(f"twist of {self.names[i]} changes its linear part")

    def _invert(self):
        m = len(self.names)
        deps = {i: self.corrections.get(i, self.chart.zero()).variables() for i in range(m)}
        order, state = [], {}

        def visit(i, stack):
            if state.get(i) == 1:
                raise UsageError(f"twist has cyclic dependencies through {self.names[i]}")
            if state.get(i) == 2:
                return
            state[i] = 1
            for j in deps[i]:
                if j != i:
                    visit(j, stack)
                elif self.corrections[i].diff(i):
                    # u_i appearing in its own correction (nonlinearly) is cyclic
                    raise UsageError(f"twist of {self.names[i]} depends on {self.names[i]}")
            state[i] = 2
            order.append(i)

        for i in range(m):
            visit(i, [])
        psi = {}
        for i in order:
            # ψ_i = u_i − p_i(ψ), p_i only uses earlier coordinates
            p = self.corrections.get(i)
            psi[i] = self.chart.var(i) - (p.subs(psi, self.chart) if p is not None else 0)
        for i in range(m):
            if self.forward[i].subs(psi, self.chart) != self.chart.var(i):
                raise UsageError("twist inverse check failed")
        return psi

    def is_identity(self) -> bool:
        return not any(self.corrections.values())

    def push_forward(self, X: Derivation) -> Derivation:
        """(φ_* X)^i = (X φ_i)∘ψ."""
        if X.ring != self.chart:
            X = Derivation(self.chart, {self.chart.index(X.ring.names[v]): p.change_ring(self.chart)
                                        for v, p in X.coeffs.items()})
        return Derivation(self.chart, {i: X(self.forward[i]).subs(self.inverse, self.chart)
                                       for i in range(len(self.names))})

    def coordinate_field(self, k: int) -> Derivation:
        """φ_* ∂/∂u_k."""
        return self.push_forward(Derivation.partial(self.chart, k))

    @classmethod
    def identity(cls, names, weights):
        return cls(names, weights, {})

    def describe(self) -> dict:
        return {self.names[i]: str(p) for i, p in sorted(self.corrections.items()) if p}
