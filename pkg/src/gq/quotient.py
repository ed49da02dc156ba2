"""Quotients E/exp(h) computed in stages, plus oracles and splittings."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from gmpy2 import mpq

from .errors import InternalInvariantError, UsageError
from .grading import (ONE, ZERO, Subspace, box, is_zero, leq_partial, neg,
                      nullspace, rref, select_maximal)
from .nilpotent import (GradedSubalgebra, KernelDescription, check_closed,
                        check_condition, exp_series, orbit_through_origin)
from .polyalg import (Derivation, Polynomial, WeightedPolyRing, bracket,
                      restrict_to_base_at)


@dataclass
class StageLog:
    index: tuple  # the maximal multi-index i eliminated at this stage
    rank: int  # dim h^{-i}
    eliminated: list  # names of the slice coordinates ξ (stage ring names)


@dataclass
class PolyMorphism:
    """A weight-preserving polynomial map E → E″ given by pullbacks."""

    source: WeightedPolyRing
    target: WeightedPolyRing
    pullbacks: dict  # target variable name -> Polynomial over source


@dataclass
class QuotientResult:
    source: WeightedPolyRing
    h: GradedSubalgebra
    quotient_ring: WeightedPolyRing
    pullbacks: dict  # quotient variable name -> Polynomial over source
    kernel: KernelDescription | None
    stages: list = field(default_factory=list)

    def morphism(self) -> PolyMorphism:
        return PolyMorphism(self.source, self.quotient_ring, self.pullbacks)

    def quotient_dims(self) -> dict:
        return _weight_counts(self.quotient_ring)

    def source_dims(self) -> dict:
        return _weight_counts(self.source)

    def kernel_dims(self) -> dict:
        return dict(self.kernel.dims) if self.kernel else {}


def _weight_counts(R: WeightedPolyRing) -> dict:
    out: dict = {}
    for w in R.weights:
        if not is_zero(w):
            out[w] = out.get(w, 0) + 1
    return dict(sorted(out.items()))


def _primed(name: str) -> str:
    return name + "'"


def _ext_ring(R: WeightedPolyRing, count: int):
    names = set(R.names)
    params = []
    j = 0
    while len(params) < count:
        j += 1
        nm = f"t_{j}"
        if nm not in names:
            params.append(nm)
    zero = (0,) * R.n
    return WeightedPolyRing(list(zip(R.names, R.weights)) + [(p, zero) for p in params]), params


def _one_stage(R: WeightedPolyRing, h: GradedSubalgebra, i: tuple):
    """Quotient by the central slice exp(h^{-i}).

    Returns (new ring, invariants {new name: poly over R}, pushed fields, log).
    """
    d = neg(i)
    K = h.basis[d]
    for X in K:
        for Y in h.basis_list():
            if bracket(X, Y):
                raise InternalInvariantError(
                    f"h^{d} is not central: [{X}, {Y}] = {bracket(X, Y)}")
    wvars = R.vars_of_weight(i)
    W = [restrict_to_base_at(X, i) for X in K]
    rk = len(K)
    # [W | 1] in RREF gives the basis change X'_b = Σ C_ba X_a with pivot-rule images
    aug = [tuple(w) + tuple(ONE if a == b else ZERO for b in range(rk)) for a, w in enumerate(W)]
    rows, piv = rref(aug, len(wvars) + rk)
    if len(rows) != rk or any(p >= len(wvars) for p in piv):
        raise InternalInvariantError(
            f"evaluation at the origin is not injective on h^{d} (rank {len(rows)} < {rk})")
    Kp = []
    for row in rows:
        C = row[len(wvars):]
        X = Derivation.zero(R)
        for a, c in enumerate(C):
            if c:
                X = X + K[a] * c
        Kp.append(X)
    xi = [wvars[p] for p in piv]
    for b, X in enumerate(Kp):
        for c, v in enumerate(xi):
            expect = ONE if b == c else ZERO
            if X(R.var(v)) != R.const(expect):
                raise InternalInvariantError("slice coordinates are not dual to h^{-i}")

    Rt, tnames = _ext_ring(R, rk)
    emb = {v: Rt.var(v) for v in range(len(R.names))}
    T = Derivation.zero(Rt)
    for b, X in enumerate(Kp):
        Xt = Derivation(Rt, {v: p.subs(emb, Rt) for v, p in X.coeffs.items()})
        T = T + Rt.var(tnames[b]) * Xt
    # t_b = -ξ_b on the way back to R
    back = {Rt.index(tnames[b]): -R.var(xi[b]) for b in range(rk)}
    back.update({v: R.var(v) for v in range(len(R.names))})
    for b, v in enumerate(xi):
        moved = exp_series(T, Rt.var(v))
        if moved != Rt.var(v) + Rt.var(tnames[b]):
            raise InternalInvariantError(f"stage action is not a translation on {R.names[v]}")
    retained = [v for v in range(len(R.names)) if v not in set(xi)]
    new_ring = WeightedPolyRing([(_primed(R.names[v]), R.weights[v]) for v in retained])
    inv = {}
    for v in retained:
        Iv = exp_series(T, Rt.var(v)).subs(back, R)
        inv[new_ring.names[retained.index(v)]] = Iv
    # slice restriction R -> new ring: ξ -> 0, x_v -> x̄_v
    slice_map = {v: new_ring.zero() for v in xi}
    slice_map.update({v: new_ring.var(j) for j, v in enumerate(retained)})
    pushed = []
    for Y in h.basis_list():
        coeffs = {}
        for j, v in enumerate(retained):
            Iv = inv[new_ring.names[j]]
            c = Y(Iv)
            for X in K:
                if X(c):
                    raise InternalInvariantError("pushed coefficient is not invariant")
            coeffs[j] = c.subs(slice_map, new_ring)
        Y1 = Derivation(new_ring, coeffs)
        if Y1:
            pushed.append(Y1)
    for Iv in inv.values():
        for X in K:
            if X(Iv):
                raise InternalInvariantError(f"{Iv} is not invariant under {X}")
    log = StageLog(tuple(i), rk, [R.names[v] for v in xi])
    return new_ring, inv, pushed, log


def staged_quotient(R: WeightedPolyRing, h: GradedSubalgebra,
                    selector: Callable = select_maximal, check: bool = True) -> QuotientResult:
    """Quotient of E by exp(h), eliminating one maximal slot per stage."""
    if h.ring != R:
        raise UsageError("subalgebra lives in a different ring")
    if check:
        cl = check_closed(h)
        if not cl:
            raise UsageError(f"h is not closed under bracket: [{cl.witness[0]}, {cl.witness[1]}] "
                             f"= {cl.witness[2]}")
        rep = check_condition(h)
        if not rep:
            k, lhs, rhs = rep.witness
            raise UsageError(f"quotient condition fails in degree {k}: "
                             f"dim LHS {lhs.dim}, dim RHS {rhs.dim}")
    kernel = orbit_through_origin(h, check=False)
    ring = R
    cur = h
    pull = {nm: R.var(nm) for nm in R.names}  # stage ring name -> source polynomial
    stages = []
    while not cur.is_zero():
        i = tuple(selector(cur.support()))
        new_ring, inv, pushed, log = _one_stage(ring, cur, i)
        stages.append(log)
        src = {ring.index(nm): p for nm, p in pull.items()}
        pull = {nm: Iv.subs(src, R) for nm, Iv in inv.items()}
        ring = new_ring
        cur = GradedSubalgebra(ring, pushed)
        if not check_closed(cur):
            raise InternalInvariantError(f"pushed subalgebra not closed after stage {log}",
                                         stages)
        if not check_condition(cur, assume_closed=True):
            raise InternalInvariantError(f"quotient condition lost after stage {log}", stages)
    for nm, p in pull.items():
        for X in h.basis_list():
            if X(p):
                raise InternalInvariantError(f"pullback of {nm} is not h-invariant", stages)
        w = ring.weights[ring.index(nm)]
        if not p.is_homogeneous() or p.weight() != w:
            raise InternalInvariantError(f"pullback of {nm} is not homogeneous of weight {w}")
    return QuotientResult(R, h, ring, pull, kernel, stages)


# ---------------------------------------------------------------- oracles

def brute_force_invariants(R: WeightedPolyRing, h, dmax) -> dict:
    """Per weight k ≤ dmax (k ≠ 0): a basis of h-invariant polynomials in P^k.

    Plain linear algebra: the kernel of f ↦ (X_a f)_a on P^k.
    """
    gens = h.basis_list() if isinstance(h, GradedSubalgebra) else list(h)
    out = {}
    for k in box(tuple(dmax)):
        if is_zero(k):
            continue
        monos = R.monomials_of_weight(k)
        if not monos:
            continue
        rows_index: dict = {}
        cols = []
        for e in monos:
            m = Polynomial(R, {e: ONE})
            col = {}
            for a, X in enumerate(gens):
                for e2, c in X(m).terms.items():
                    col[(a, e2)] = c
                    rows_index.setdefault((a, e2), len(rows_index))
            cols.append(col)
        mat = [[ZERO] * len(monos) for _ in rows_index]
        for j, col in enumerate(cols):
            for key, c in col.items():
                mat[rows_index[key]][j] = c
        basis = nullspace(mat, len(monos))
        out[k] = [Polynomial(R, {e: c for e, c in zip(monos, v) if c}) for v in basis]
    return out


def brute_force_dims(R, h, dmax) -> dict:
    return {k: len(v) for k, v in brute_force_invariants(R, h, dmax).items()}


def invariant_span(result: QuotientResult, k) -> Subspace:
    """Span in P^k of all products of quotient pullbacks of total weight k."""
    R = result.source
    Q = result.quotient_ring
    monos = R.monomials_of_weight(k)
    pulls = [result.pullbacks[nm] for nm in Q.names]
    vecs = []
    for e in Q.monomials_of_weight(k):
        p = R.one()
        for v, a in enumerate(e):
            if a:
                p = p * pulls[v] ** a
        vecs.append(p.coefficient_vector(monos))
    return Subspace.span(vecs, len(monos))


def invariant_span_dims(result: QuotientResult, dmax) -> dict:
    out = {}
    for k in box(tuple(dmax)):
        if is_zero(k) or not result.source.monomials_of_weight(k):
            continue
        out[k] = invariant_span(result, k).dim
    return out


# ---------------------------------------------------------------- linear data

def _as_morphism(m) -> PolyMorphism:
    if isinstance(m, QuotientResult):
        return m.morphism()
    if isinstance(m, PolyMorphism):
        return m
    raise UsageError("expected a QuotientResult or PolyMorphism")


def linear_approximation(morphism) -> dict:
    """Per weight i: matrix (target vars × source vars of weight i) of linear parts."""
    m = _as_morphism(morphism)
    S, T = m.source, m.target
    for nm in T.names:
        w = T.weights[T.index(nm)]
        p = m.pullbacks[nm]
        if p and (not p.is_homogeneous() or p.weight() != w):
            raise UsageError(f"pullback of {nm} is not homogeneous of weight {w}")
    out = {}
    weights = sorted({w for w in S.weights + T.weights if not is_zero(w)})
    for w in weights:
        tv = T.vars_of_weight(w)
        sv = S.vars_of_weight(w)
        out[w] = [[m.pullbacks[T.names[t]].linear_coefficient(s) for s in sv] for t in tv]
    return out


def _right_inverse(L: list, ncols: int) -> list:
    """Pivot-rule right inverse S (ncols × r) of a full-row-rank r × ncols matrix."""
    r = len(L)
    if r == 0:
        return [[] for _ in range(ncols)]
    aug = [tuple(L[a]) + tuple(ONE if a == b else ZERO for b in range(r)) for a in range(r)]
    rows, piv = rref(aug, ncols + r)
    if len(rows) != r or any(p >= ncols for p in piv):
        raise InternalInvariantError("linear part of the projection is not surjective")
    # rows = E [L | 1] with E L in RREF; S = columns at pivots of E
    S = [[ZERO] * r for _ in range(ncols)]
    for row, p in zip(rows, piv):
        E = row[ncols:]
        for b in range(r):
            S[p][b] = E[b]
    return S


def split_sequence(morphism, h: GradedSubalgebra | None = None) -> dict:
    """A section j of π with π∘j = id, returned as {source name: poly over target}.

    Weights are handled from low to high: in weight i the pullback reads
    π*(x̄) = L x^{(i)} + N(lower), and j^{(i)} = s(x̄^{(i)} − N(j_lower)) with
    s the pivot-rule right inverse of L.
    """
    m = _as_morphism(morphism)
    if h is None and isinstance(morphism, QuotientResult):
        h = morphism.h
    if h is not None:
        for nm, p in m.pullbacks.items():
            for X in h.basis_list():
                if X(p):
                    raise UsageError(f"pullback of {nm} is not invariant under {X}")
    S, T = m.source, m.target
    if S.has_base or T.has_base:
        raise UsageError("split_sequence expects rings without base variables")
    lin = linear_approximation(m)
    weights = sorted(lin, key=lambda w: (sum(w), w))
    j: dict = {}
    for w in weights:
        sv = S.vars_of_weight(w)
        tv = T.vars_of_weight(w)
        sinv = _right_inverse(lin[w], len(sv))
        rhs = []
        for t in tv:
            p = m.pullbacks[T.names[t]]
            linear = Polynomial(S, {e: c for e, c in p.terms.items()
                                    if sum(e) == 1 and any(e[s] for s in sv)})
            N = p - linear
            for v in N.variables():
                if v not in j:
                    raise InternalInvariantError(
                        f"nonlinear part of {T.names[t]} uses {S.names[v]} of weight ≥ {w}")
            rhs.append(T.var(t) - N.subs(j, T))
        for a, s in enumerate(sv):
            val = T.zero()
            for b in range(len(tv)):
                if sinv[a][b]:
                    val = val + rhs[b] * sinv[a][b]
            j[s] = val
    for v in range(len(S.names)):
        j.setdefault(v, T.zero())
    for nm, p in m.pullbacks.items():
        if p.subs(j, T) != T.var(nm):
            raise InternalInvariantError(f"π∘j ≠ id on {nm}")
    return {S.names[v]: p for v, p in sorted(j.items())}


def compose_check(morphism, section: dict) -> bool:
    """π∘j = id as an exact substitution identity."""
    m = _as_morphism(morphism)
    images = {m.source.index(nm): p for nm, p in section.items()}
    return all(p.subs(images, m.target) == m.target.var(nm) for nm, p in m.pullbacks.items())
