"""Double normal bundles and order-2 weighted normal bundles in flat charts.

Submanifolds are coordinate subspaces N_I = {u_i = 0, i ∈ I}.  Each bundle
is computed twice: from the weight assignment (the associated graded
model) and as a subquotient of a jet bundle by exp(h), h generated by
lifts of (optionally twisted) coordinate fields.  Base coordinates are
specialised at a few fixed rational points and the fiberwise quotient is
computed at each.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from gmpy2 import mpq

from ..errors import InternalInvariantError, UsageError
from ..grading import box, is_zero
from ..nilpotent import GradedSubalgebra, check_closed, check_condition
from ..polyalg import Derivation, Polynomial, WeightedPolyRing, dim_component
from ..quotient import (QuotientResult, brute_force_dims, invariant_span_dims,
                        linear_approximation, staged_quotient)
from .jets import FiltrationDiffeo, JetSpace, chart_ring

SAMPLE_COUNT = 3


def chart_names(m: int) -> list:
    return [f"u{k + 1}" for k in range(m)]


def _index_set(I, m, label="index set") -> frozenset:
    I = frozenset(int(i) for i in I)
    bad = [i for i in I if not 1 <= i <= m]
    if bad:
        raise UsageError(f"{label} entries {sorted(bad)} outside 1..{m}")
    return I


def sample_points(base: Sequence[int]) -> list:
    """Deterministic rational values for the base coordinates."""
    if not base:
        return [{}]
    pts = []
    for s in range(SAMPLE_COUNT):
        if s == 0:
            vals = [mpq(0)] * len(base)
        elif s == 1:
            vals = [mpq(t + 1) for t in range(len(base))]
        else:
            vals = [mpq((-1) ** t, t + 2) for t in range(len(base))]
        pts.append(dict(zip(base, vals)))
    return pts


class FiberRestriction:
    """Restriction of jet-ring objects to a subbundle, at a base point."""

    def __init__(self, space: JetSpace, zero_vars: set, base_vars: Sequence[int]):
        R = space.ring
        self.space = space
        self.zero_vars = set(zero_vars)
        self.base_vars = list(base_vars)
        self.fiber_vars = [v for v in range(len(R.names))
                           if v not in self.zero_vars and v not in set(base_vars)]
        self.ring = WeightedPolyRing([(R.names[v], R.weights[v]) for v in self.fiber_vars])

    def images(self, base_values: dict) -> dict:
        F = self.ring
        img = {v: F.zero() for v in self.zero_vars}
        img.update({v: F.const(base_values[v]) for v in self.base_vars})
        img.update({v: F.var(j) for j, v in enumerate(self.fiber_vars)})
        return img

    def function(self, f: Polynomial, base_values: dict) -> Polynomial:
        return f.subs(self.images(base_values), self.ring)

    def field(self, X: Derivation, base_values: dict) -> Derivation:
        img = self.images(base_values)
        for v, p in X.coeffs.items():
            if v in self.fiber_vars:
                continue
            if p.subs(img, self.ring):
                raise UsageError(f"{X} is not tangent to the subbundle "
                                 f"(component along {self.space.ring.names[v]})")
        var_map = {v: j for j, v in enumerate(self.fiber_vars)}
        return X.subs(img, self.ring, var_map)


@dataclass
class SampleRun:
    base_values: dict
    h: GradedSubalgebra
    result: QuotientResult


def _quotient_samples(restr: FiberRestriction, build, span_bound) -> list:
    runs = []
    for pt in sample_points(restr.base_vars):
        gens = build(pt)
        h = GradedSubalgebra(restr.ring, gens)
        cl = check_closed(h)
        if not cl:
            raise InternalInvariantError(f"h is not closed: [{cl.witness[0]}, {cl.witness[1]}]")
        if not check_condition(h, assume_closed=True):
            raise InternalInvariantError("h violates the quotient condition")
        runs.append(SampleRun(pt, h, staged_quotient(restr.ring, h, check=False)))
    return runs


def _agree(runs, key):
    vals = [key(r) for r in runs]
    if any(v != vals[0] for v in vals[1:]):
        raise InternalInvariantError(f"base samples disagree: {vals}")
    return vals[0]


def _weight_counts(R: WeightedPolyRing) -> dict:
    out = {}
    for w in R.weights:
        if not is_zero(w):
            out[w] = out.get(w, 0) + 1
    return dict(sorted(out.items()))


def _span_dims_of_ring(R: WeightedPolyRing, bound) -> dict:
    return {k: dim_component(R, k) for k in box(bound) if not is_zero(k)}


# ================================================================ double normal

DNB_BOUND = (2, 2)


@dataclass
class DNBReport:
    """Double normal bundle data.

    Axis 1 of every bidegree is the ν(N₁, N) side (the constraint on the
    first tangent factor), axis 2 the ν(N₂, N) side.
    """

    m: int
    I1: tuple
    I2: tuple
    sides: tuple  # (rank ν(N₁,N), rank ν(N₂,N))
    core: int
    base_dim: int
    excess: int
    graded_dims: dict
    span_dims: dict
    method: str
    twist: dict = field(default_factory=dict)
    samples: list = field(default_factory=list)

    def summary(self):
        return (self.sides, self.core, self.base_dim, self.excess, self.graded_dims, self.span_dims)


def _swap(d: dict) -> dict:
    return dict(sorted(((k[1], k[0]), v) for k, v in d.items()))


def excess_rank(m: int, base_dim: int, sides) -> int:
    """rank TM|_N / (TN₁ + TN₂) = m − dim N₁ − dim N₂ + dim N."""
    n1, n2 = base_dim + sides[0], base_dim + sides[1]
    return m - n1 - n2 + base_dim


def flip(report: DNBReport) -> DNBReport:
    """Exchange the two vector bundle structures."""
    return replace(report, I1=report.I2, I2=report.I1,
                   sides=(report.sides[1], report.sides[0]),
                   graded_dims=_swap(report.graded_dims), span_dims=_swap(report.span_dims))


def dnb_weights(m, I1, I2) -> list:
    return [(1 if k + 1 in I1 else 0, 1 if k + 1 in I2 else 0) for k in range(m)]


def gr_ring(m, I1, I2) -> WeightedPolyRing:
    """Fiber of the bigraded model: u_k with weight (k∈I₁, k∈I₂), base dropped."""
    w = dnb_weights(m, I1, I2)
    return WeightedPolyRing([(nm, wk) for nm, wk in zip(chart_names(m), w) if not is_zero(wk)])


def double_normal_gr(m: int, I1, I2) -> DNBReport:
    I1 = _index_set(I1, m, "I1")
    I2 = _index_set(I2, m, "I2")
    R = gr_ring(m, I1, I2)
    # in R, weight (1,0) coordinates are fiber coordinates of ν(N₂,N); swap into report axes
    dims = _swap(_weight_counts(R))
    dims = {k: dims.get(k, 0) for k in ((0, 1), (1, 0), (1, 1))}
    spans = _swap(_span_dims_of_ring(R, DNB_BOUND))
    sides = (dims[(1, 0)], dims[(0, 1)])
    base_dim = m - len(R.names)
    return DNBReport(m, tuple(sorted(I1)), tuple(sorted(I2)), sides, dims[(1, 1)],
                     base_dim, excess_rank(m, base_dim, sides), dims, spans, "gr")


def double_normal_subquotient(m: int, I1, I2, twist: FiltrationDiffeo | None = None,
                              oracle: bool = False) -> DNBReport:
    """D ⊆ TTM over N, divided by exp(h), fiberwise at sampled base points."""
    I1 = _index_set(I1, m, "I1")
    I2 = _index_set(I2, m, "I2")
    names = chart_names(m)
    weights = dnb_weights(m, I1, I2)
    if twist is None:
        twist = FiltrationDiffeo.identity(names, weights)
    elif tuple(twist.names) != tuple(names) or tuple(twist.weights) != tuple(weights):
        raise UsageError("twist is not defined for this filtration")
    S = JetSpace(names, (1, 1))
    ks = range(m)
    zero = {S.var_index(k, (0, 0)) for k in ks if k + 1 in I1 | I2}
    zero |= {S.var_index(k, (1, 0)) for k in ks if k + 1 in I1}
    zero |= {S.var_index(k, (0, 1)) for k in ks if k + 1 in I2}
    base = [S.var_index(k, (0, 0)) for k in ks if k + 1 not in I1 | I2]
    restr = FiberRestriction(S, zero, base)
    fields = [twist.coordinate_field(k) for k in ks]
    core_lifts = [S.lift_field(fields[k], (1, 1)) for k in ks if k + 1 not in I1 & I2]
    side_lifts = [S.lift_field(fields[k], i) for k in ks if k + 1 not in I1 | I2
                  for i in ((1, 0), (0, 1))]
    F = restr.ring
    lin = [F.var(j) for j, w in enumerate(F.weights) if w in ((1, 0), (0, 1))]

    def build(pt):
        core = [restr.field(X, pt) for X in core_lifts]
        side = [restr.field(X, pt) for X in side_lifts]
        return core + side + [f * X for f in lin for X in core]

    runs = _quotient_samples(restr, build, DNB_BOUND)
    dims = _agree(runs, lambda r: _weight_counts(r.result.quotient_ring))
    spans = _agree(runs, lambda r: invariant_span_dims(r.result, DNB_BOUND))
    if oracle:
        bf = _agree(runs, lambda r: brute_force_dims(F, r.h, DNB_BOUND))
        if bf != spans:
            raise InternalInvariantError(f"staged spans {spans} differ from oracle {bf}")
    full = {k: v for k, v in _span_dims_of_ring(F, DNB_BOUND).items()}
    spans = {k: spans.get(k, 0) for k in full}
    sides = (dims.get((1, 0), 0), dims.get((0, 1), 0))
    return DNBReport(m, tuple(sorted(I1)), tuple(sorted(I2)), sides, dims.get((1, 1), 0),
                     len(base), excess_rank(m, len(base), sides),
                     {k: dims.get(k, 0) for k in ((0, 1), (1, 0), (1, 1))},
                     spans, "subquotient", twist.describe(), runs)


# ================================================================ weighted normal, order 2

WNB_BOUND = (4,)


@dataclass
class WNBReport:
    m: int
    I: tuple
    J: tuple
    graded_dims: dict  # (1,) -> dim F, (2,) -> dim ν/F
    span_dims: dict
    method: str
    kernel_dims: dict = field(default_factory=dict)
    total_dims: dict = field(default_factory=dict)
    linear_ranks: dict = field(default_factory=dict)
    exact_sequence_ok: bool | None = None
    twist: dict = field(default_factory=dict)
    samples: list = field(default_factory=list)


def wnb_weights(m, I, J) -> list:
    return [(0,) if k + 1 not in I else ((1,) if k + 1 in J else (2,)) for k in range(m)]


def _check_IJ(m, I, J):
    I = _index_set(I, m, "I")
    J = _index_set(J, m, "J")
    if not J <= I:
        raise UsageError(f"J = {sorted(J)} is not contained in I = {sorted(I)}")
    return I, J


def weighted_normal_order2(m: int, I, J, twist: FiltrationDiffeo | None = None,
                           method: str = "gr", oracle: bool = False) -> WNBReport:
    I, J = _check_IJ(m, I, J)
    names = chart_names(m)
    weights = wnb_weights(m, I, J)
    if method == "gr":
        R = WeightedPolyRing([(nm, w) for nm, w in zip(names, weights) if not is_zero(w)])
        dims = {(1,): len(J), (2,): len(I - J)}
        return WNBReport(m, tuple(sorted(I)), tuple(sorted(J)), dims,
                         _span_dims_of_ring(R, WNB_BOUND), "gr")
    if method != "subquotient":
        raise UsageError(f"unknown method {method!r}")
    if twist is None:
        twist = FiltrationDiffeo.identity(names, weights)
    elif tuple(twist.names) != tuple(names) or tuple(twist.weights) != tuple(weights):
        raise UsageError("twist is not defined for this filtration")
    S = JetSpace(names, (2,))
    ks = range(m)
    IJ = I - J
    zero = {S.var_index(k, (0,)) for k in ks if k + 1 in I}
    zero |= {S.var_index(k, (1,)) for k in ks if k + 1 in IJ}
    base = [S.var_index(k, (0,)) for k in ks if k + 1 not in I]
    restr = FiberRestriction(S, zero, base)
    fields = [twist.coordinate_field(k) for k in ks]
    top = [S.lift_field(fields[k], (2,)) for k in ks if k + 1 not in IJ]
    mid = [S.lift_field(fields[k], (1,)) for k in ks if k + 1 not in I]
    F = restr.ring
    lin = [F.var(j) for j, w in enumerate(F.weights) if w == (1,)]

    def build(pt):
        t = [restr.field(X, pt) for X in top]
        return t + [restr.field(X, pt) for X in mid] + [f * X for f in lin for X in t]

    runs = _quotient_samples(restr, build, WNB_BOUND)
    dims = _agree(runs, lambda r: _weight_counts(r.result.quotient_ring))
    spans = _agree(runs, lambda r: invariant_span_dims(r.result, WNB_BOUND))
    if oracle:
        bf = _agree(runs, lambda r: brute_force_dims(F, r.h, WNB_BOUND))
        if bf != spans:
            raise InternalInvariantError(f"staged spans {spans} differ from oracle {bf}")
    spans = {k: spans.get(k, 0) for k in _span_dims_of_ring(F, WNB_BOUND)}
    kernel = _agree(runs, lambda r: r.result.kernel_dims())
    total = _weight_counts(F)
    dims = {k: dims.get(k, 0) for k in ((1,), (2,))}
    kernel = {k: kernel.get(k, 0) for k in ((1,), (2,))}
    total = {k: total.get(k, 0) for k in ((1,), (2,))}
    lin_ranks = _agree(runs, lambda r: {w: _rank(M) for w, M in linear_approximation(r.result).items()})
    lin_ranks = {k: lin_ranks.get(k, 0) for k in ((1,), (2,))}
    expected_kernel = {(1,): m - len(I), (2,): m - len(IJ)}
    exact = (kernel == expected_kernel
             and all(total[k] == kernel[k] + dims[k] for k in total)
             and lin_ranks == dims)
    return WNBReport(m, tuple(sorted(I)), tuple(sorted(J)), dims, spans, "subquotient",
                     kernel, total, lin_ranks, exact, twist.describe(), runs)


def _rank(M) -> int:
    from ..grading import rref
    if not M:
        return 0
    return len(rref(M, len(M[0]))[0])
