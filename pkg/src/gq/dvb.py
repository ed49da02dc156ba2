"""Double vector bundles in linear coordinates.

A fiber with ranks (a, b, c) is the ring with x_1..x_a of weight (1,0),
y_1..y_b of weight (0,1) and z_1..z_c of weight (1,1).  g has three
slots: the fat bundles Â = g^{(-1,0)}, B̂ = g^{(0,-1)} and the core C.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import UsageError
from .grading import ZERO, Subspace, to_q
from .nilpotent import (GradedSubalgebra, check_closed, exp_automorphism,
                        lie_closure, saturate)
from .polyalg import Derivation, Polynomial, WeightedPolyRing, bracket
from .quotient import (QuotientResult, invariant_span, split_sequence,
                       staged_quotient)

DEG_A = (-1, 0)
DEG_B = (0, -1)
DEG_C = (-1, -1)


class DVBFiber:
    def __init__(self, a: int, b: int, c: int):
        if min(a, b, c) < 0:
            raise UsageError("ranks must be non-negative")
        self.a, self.b, self.c = a, b, c
        self.ring = WeightedPolyRing(
            [(f"x{i + 1}", (1, 0)) for i in range(a)]
            + [(f"y{j + 1}", (0, 1)) for j in range(b)]
            + [(f"z{k + 1}", (1, 1)) for k in range(c)])
        self.xs = list(range(a))
        self.ys = list(range(a, a + b))
        self.zs = list(range(a + b, a + b + c))

    def __eq__(self, other):
        return isinstance(other, DVBFiber) and (self.a, self.b, self.c) == (other.a, other.b, other.c)

    def ranks(self):
        return (self.a, self.b, self.c)

    def slot_dims(self) -> dict:
        return {DEG_A: len(self.ring.slot_basis(DEG_A)),
                DEG_B: len(self.ring.slot_basis(DEG_B)),
                DEG_C: len(self.ring.slot_basis(DEG_C))}

    # -- constructors of fields --------------------------------------------
    def _hom_z(self, mat, src_vars) -> Derivation:
        R = self.ring
        coeffs = {}
        for k, z in enumerate(self.zs):
            p = R.zero()
            for j, v in enumerate(src_vars):
                c = to_q(mat[k][j])
                if c:
                    p = p + R.var(v) * c
            coeffs[z] = p
        return Derivation(R, coeffs)

    def fat_a(self, side, omega=None) -> Derivation:
        """a·∂x + (ω y)·∂z with ω a c×b matrix."""
        R = self.ring
        X = Derivation(R, {x: R.const(to_q(s)) for x, s in zip(self.xs, side)})
        if omega is not None:
            X = X + self._hom_z(omega, self.ys)
        return X

    def fat_b(self, side, nu=None) -> Derivation:
        """b·∂y + (ν x)·∂z with ν a c×a matrix."""
        R = self.ring
        X = Derivation(R, {y: R.const(to_q(s)) for y, s in zip(self.ys, side)})
        if nu is not None:
            X = X + self._hom_z(nu, self.xs)
        return X

    def core(self, cvec) -> Derivation:
        R = self.ring
        return Derivation(R, {z: R.const(to_q(s)) for z, s in zip(self.zs, cvec)})

    def core_vector(self, X: Derivation) -> tuple:
        return tuple(X.coeffs[z].constant_term() if z in X.coeffs else ZERO for z in self.zs)

    def decompose_fat(self, X: Derivation):
        """(side vector, hom matrix) of a fat element; slot inferred from degree."""
        if X.is_zero():
            raise UsageError("zero field has no slot")
        d = X.degree()
        if d == DEG_A:
            side_vars, src = self.xs, self.ys
        elif d == DEG_B:
            side_vars, src = self.ys, self.xs
        else:
            raise UsageError(f"degree {d} is not a fat slot")
        side = tuple(X.coeffs[v].constant_term() if v in X.coeffs else ZERO for v in side_vars)
        mat = [[X.coeffs[z].linear_coefficient(v) if z in X.coeffs else ZERO for v in src]
               for z in self.zs]
        return side, mat

    # -- canonical subspaces -----------------------------------------------
    def i_hat_a(self, Cp: Subspace) -> list:
        """i_Â(B*⊗C′): fields y_j·∂(c′)."""
        R = self.ring
        return [Derivation(R, {z: R.var(y) * c for z, c in zip(self.zs, cv)})
                for y in self.ys for cv in Cp.rows]

    def i_hat_b(self, Cp: Subspace) -> list:
        R = self.ring
        return [Derivation(R, {z: R.var(x) * c for z, c in zip(self.zs, cv)})
                for x in self.xs for cv in Cp.rows]

    def core_fields(self, Cp: Subspace) -> list:
        return [self.core(cv) for cv in Cp.rows]

    def full_core(self) -> Subspace:
        return Subspace.full(self.c)

    def slot_space(self, fields, degree) -> Subspace:
        return Subspace.span([X.to_vector(degree) for X in fields],
                             len(self.ring.slot_basis(degree)))

    def dim_P11(self) -> int:
        return len(self.ring.monomials_of_weight((1, 1)))


# ---------------------------------------------------------------- pairing / group

def warp(D: DVBFiber, ahat: Derivation, bhat: Derivation) -> tuple:
    """⟨â, b̂⟩ ∈ C: the bracket [â, b̂] read off along the base."""
    for X, d in ((ahat, DEG_A), (bhat, DEG_B)):
        if X and X.degree() != d:
            raise UsageError(f"expected a field of degree {d}, got {X.degree()}")
    return D.core_vector(bracket(ahat, bhat))


@dataclass(frozen=True)
class HeisenbergElement:
    """Triple (â, b̂, c) with â, b̂ given as fields and c as a core vector."""

    ahat: Derivation
    bhat: Derivation
    c: tuple


def heisenberg_mul(D: DVBFiber, g1: HeisenbergElement, g2: HeisenbergElement) -> HeisenbergElement:
    w12 = warp(D, g1.ahat, g2.bhat)
    w21 = warp(D, g2.ahat, g1.bhat)
    c = tuple(a + b + p - q for a, b, p, q in zip(g1.c, g2.c, w12, w21))
    return HeisenbergElement(g1.ahat + g2.ahat, g1.bhat + g2.bhat, c)


def heisenberg_inverse(g: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(-g.ahat, -g.bhat, tuple(-x for x in g.c))


def group_element(D: DVBFiber, g: HeisenbergElement):
    """Ψ(â, b̂, c) = exp(â + b̂ + ½c).

    This identification reproduces the triple group law under operator
    composition of substitutions.
    """
    half = D.core(tuple(mpq(x) / 2 for x in g.c))
    return exp_automorphism(g.ahat + g.bhat + half)


def summand_action(D: DVBFiber, kind: str, data, point):
    """The three summand actions on (a, b, c) in linear coordinates.

    kind 'a': data = (a1, ω); kind 'b': data = (b1, ν); kind 'c': data = c1.
    """
    a, b, c = (tuple(map(to_q, p)) for p in point)
    if kind == "a":
        a1, om = data
        return (tuple(x + to_q(y) for x, y in zip(a, a1)), b,
                tuple(c[k] + sum((to_q(om[k][j]) * b[j] for j in range(D.b)), ZERO) for k in range(D.c)))
    if kind == "b":
        b1, nu = data
        return (a, tuple(x + to_q(y) for x, y in zip(b, b1)),
                tuple(c[k] + sum((to_q(nu[k][i]) * a[i] for i in range(D.a)), ZERO) for k in range(D.c)))
    if kind == "c":
        return (a, b, tuple(x + to_q(y) for x, y in zip(c, data)))
    raise UsageError(f"unknown summand {kind!r}")


def dvb_action(D: DVBFiber, g: HeisenbergElement, point):
    """Action of Ψ(g) on a point given as (a, b, c)."""
    flat = tuple(map(to_q, point[0])) + tuple(map(to_q, point[1])) + tuple(map(to_q, point[2]))
    out = group_element(D, g).act(flat)
    return (out[:D.a], out[D.a:D.a + D.b], out[D.a + D.b:])


# ---------------------------------------------------------------- subalgebra specs

@dataclass
class DVBSubalgebraSpec:
    fiber: DVBFiber
    ahat: list  # fields of degree (-1,0)
    bhat: list  # fields of degree (0,-1)
    cprime: Subspace  # subspace of Q^c

    def __post_init__(self):
        for X in self.ahat:
            if X and X.degree() != DEG_A:
                raise UsageError(f"Â′ generator {X} has degree {X.degree()}")
        for X in self.bhat:
            if X and X.degree() != DEG_B:
                raise UsageError(f"B̂′ generator {X} has degree {X.degree()}")
        if self.cprime.dim_ambient != self.fiber.c:
            raise UsageError("C′ lives in the wrong space")

    @classmethod
    def from_subalgebra(cls, D: DVBFiber, h: GradedSubalgebra) -> "DVBSubalgebraSpec":
        cvecs = [D.core_vector(X) for X in h.basis.get(DEG_C, [])]
        return cls(D, list(h.basis.get(DEG_A, [])), list(h.basis.get(DEG_B, [])),
                   Subspace.span(cvecs, D.c))

    def subalgebra(self) -> GradedSubalgebra:
        return GradedSubalgebra(self.fiber.ring,
                                self.ahat + self.bhat + self.fiber.core_fields(self.cprime))

    def A_space(self) -> Subspace:
        return self.fiber.slot_space(self.ahat, DEG_A)

    def B_space(self) -> Subspace:
        return self.fiber.slot_space(self.bhat, DEG_B)

    def side_images(self):
        """A′, B′ ⊆ A, B: the base values of Â′, B̂′."""
        D = self.fiber
        A = Subspace.span([D.decompose_fat(X)[0] for X in self.ahat if X], D.a)
        B = Subspace.span([D.decompose_fat(X)[0] for X in self.bhat if X], D.b)
        return A, B


@dataclass
class Quot2Report:
    fat_a_ok: bool
    fat_b_ok: bool
    closed: bool
    gc_criterion: bool
    reason: str = ""
    witness: object = None

    @property
    def fat_conditions(self) -> bool:
        return self.fat_a_ok and self.fat_b_ok

    @property
    def valid(self) -> bool:
        return self.fat_a_ok and self.fat_b_ok and self.closed

    def __bool__(self):
        return self.valid


def g_c_prime(D: DVBFiber, Cp: Subspace) -> GradedSubalgebra:
    """g_{C′} = i_Â(B*⊗C′) ⊕ i_B̂(A*⊗C′) ⊕ C′: fields tangent to C′."""
    return GradedSubalgebra(D.ring, D.i_hat_a(Cp) + D.i_hat_b(Cp) + D.core_fields(Cp))


def gc_criterion(spec: DVBSubalgebraSpec) -> bool:
    """h ∩ g_C = g_{C′} with C′ the core part of h, slot by slot."""
    D = spec.fiber
    h = spec.subalgebra()
    gC = g_c_prime(D, D.full_core())
    gCp = g_c_prime(D, spec.cprime)
    for d in (DEG_A, DEG_B, DEG_C):
        if h.space(d).intersect(gC.space(d)) != gCp.space(d):
            return False
    return True


def check_quot2(spec: DVBSubalgebraSpec) -> Quot2Report:
    """The two fat conditions, bracket closure, and the g_{C′} cross-check.

    Closure is checked on its own: the fat conditions do not imply it
    (Â′ = ⟨∂x⟩, B̂′ = ⟨∂y + x∂z⟩, C′ = 0 satisfies both but brackets to ∂z).
    """
    D = spec.fiber
    full = D.full_core()
    A = spec.A_space()
    B = spec.B_space()
    iA = D.slot_space(D.i_hat_a(spec.cprime), DEG_A)
    iB = D.slot_space(D.i_hat_b(spec.cprime), DEG_B)
    fa = A.intersect(D.slot_space(D.i_hat_a(full), DEG_A)) == iA
    fb = B.intersect(D.slot_space(D.i_hat_b(full), DEG_B)) == iB
    cl = check_closed(spec.subalgebra())
    reasons = []
    if not fa:
        reasons.append("Â′ ∩ i_Â(B*⊗C) ≠ i_Â(B*⊗C′)")
    if not fb:
        reasons.append("B̂′ ∩ i_B̂(A*⊗C) ≠ i_B̂(A*⊗C′)")
    if not cl:
        reasons.append(f"not closed: [{cl.witness[0]}, {cl.witness[1]}] = {cl.witness[2]}")
    return Quot2Report(fa, fb, cl.closed, gc_criterion(spec), "; ".join(reasons),
                       None if cl else cl.witness)


@dataclass
class DVBQuotientReport:
    ranks: tuple  # (a″, b″, c″)
    side_ranks_removed: tuple  # (dim A′, dim B′, dim C′)
    result: QuotientResult


def _ranks_of(R: WeightedPolyRing) -> tuple:
    return (len(R.vars_of_weight((1, 0))), len(R.vars_of_weight((0, 1))),
            len(R.vars_of_weight((1, 1))))


def quotient_dvb(spec: DVBSubalgebraSpec) -> DVBQuotientReport:
    rep = check_quot2(spec)
    if not rep:
        raise UsageError(f"invalid DVB subalgebra: {rep.reason}")
    D = spec.fiber
    res = staged_quotient(D.ring, spec.subalgebra())
    A1, B1 = spec.side_images()
    return DVBQuotientReport(_ranks_of(res.quotient_ring), (A1.dim, B1.dim, spec.cprime.dim), res)


# ---------------------------------------------------------------- wide subbundles

@dataclass
class WideData:
    """A wide double subvector bundle.

    Vertical (``side='B'``): D₁ = {(a, b, ν_b(a) + c): b ∈ B₁, c ∈ C₁}, with
    ``twist`` mapping each RREF basis row of B₁ to ν_b (c×a matrix).
    Horizontal (``side='A'``) is the mirror image.
    """

    fiber: DVBFiber
    side: str
    sub: Subspace  # B₁ (or A₂)
    core: Subspace  # C₁ (or C₂)
    twist: list = field(default_factory=list)  # one matrix per row of ``sub``

    def __post_init__(self):
        if self.side not in ("A", "B"):
            raise UsageError("side must be 'A' or 'B'")
        if not self.twist:
            other = self.fiber.a if self.side == "B" else self.fiber.b
            self.twist = [[[ZERO] * other for _ in range(self.fiber.c)] for _ in self.sub.rows]
        if len(self.twist) != self.sub.dim:
            raise UsageError("one twist matrix per basis vector of the side subspace")

    def subalgebra(self) -> GradedSubalgebra:
        """h for the wide quotient: core, hom parts into it, and the twisted fat lifts."""
        D = self.fiber
        if self.side == "B":
            gens = D.core_fields(self.core) + D.i_hat_a(self.core) + D.i_hat_b(self.core)
            gens += [D.fat_b(v, nu) for v, nu in zip(self.sub.rows, self.twist)]
        else:
            gens = D.core_fields(self.core) + D.i_hat_b(self.core) + D.i_hat_a(self.core)
            gens += [D.fat_a(v, om) for v, om in zip(self.sub.rows, self.twist)]
        return GradedSubalgebra(D.ring, gens)

    def normalized(self, Cp: Subspace) -> "WideData":
        """Flow-out under the core action of C′: core becomes C₁ + C′."""
        return WideData(self.fiber, self.side, self.sub, self.core + Cp, self.twist)

    def canonical(self):
        """Hashable normal form: twists reduced modulo Hom(·, core)."""
        D = self.fiber
        other = D.a if self.side == "B" else D.b
        homs = Subspace.span(
            [tuple(cv[k] if j == col else ZERO for k in range(D.c) for j in range(other))
             for cv in self.core.rows for col in range(other)],
            D.c * other)
        tw = tuple(homs.reduce([m[k][j] for k in range(D.c) for j in range(other)])
                   for m in self.twist)
        return (self.side, self.sub.rows, self.core.rows, tw)

    def same_bundle(self, other: "WideData") -> bool:
        return self.canonical() == other.canonical()

    def contains_point(self, point) -> bool:
        """Membership of a point (a, b, c) in the subbundle."""
        D = self.fiber
        a, b, c = (tuple(map(to_q, p)) for p in point)
        side_pt, other_pt = (b, a) if self.side == "B" else (a, b)
        if not self.sub.contains(side_pt):
            return False
        coords = self.sub.coordinates(side_pt)
        twisted = [sum((co * to_q(m[k][j]) * other_pt[j] for co, m in zip(coords, self.twist)
                        for j in range(len(other_pt))), ZERO) for k in range(D.c)]
        return self.core.contains(tuple(x - t for x, t in zip(c, twisted)))


def wide_quotient(W: WideData) -> DVBQuotientReport:
    """D/_v D₁ (side 'B') or D/_h D₂ (side 'A')."""
    D = W.fiber
    h = W.subalgebra()
    res = staged_quotient(D.ring, h)
    removed = (0, W.sub.dim, W.core.dim) if W.side == "B" else (W.sub.dim, 0, W.core.dim)
    return DVBQuotientReport(_ranks_of(res.quotient_ring), removed, res)


# ---------------------------------------------------------------- decomposition into wide subbundles

def pike_decompose(spec: DVBSubalgebraSpec):
    """D₁ = B̂′·A and D₂ = Â′·B as wide subbundle data, both with core C′."""
    rep = check_quot2(spec)
    if not rep:
        raise UsageError(f"invalid DVB subalgebra: {rep.reason}")
    D = spec.fiber
    A1, B1 = spec.side_images()
    return (_wide_from_fat(D, "B", spec.bhat, B1, spec.cprime),
            _wide_from_fat(D, "A", spec.ahat, A1, spec.cprime))


def _wide_from_fat(D, side, fats, sub, core) -> WideData:
    # express each RREF row of the side image as a combination of the fat fields
    pairs = [D.decompose_fat(X) for X in fats if X]
    nside = D.b if side == "B" else D.a
    nother = D.a if side == "B" else D.b
    twist = []
    if pairs:
        aug = [tuple(s) + tuple(mpq(1) if i == j else ZERO for j in range(len(pairs)))
               for i, (s, _) in enumerate(pairs)]
        S = Subspace.span(aug, nside + len(pairs))
        rows = [r for r, p in zip(S.rows, S.pivots) if p < nside]
        for r in rows:
            comb = r[nside:]
            m = [[sum((co * pr[1][k][j] for co, pr in zip(comb, pairs)), ZERO)
                  for j in range(nother)] for k in range(D.c)]
            twist.append(m)
    return WideData(D, side, sub, core, twist)


def push_forward(result: QuotientResult, fields) -> list:
    """Fields on E descending to E″ = E/H, written in quotient coordinates.

    Requires each Y(π*x̄) to be invariant (true when h is an ideal of the
    algebra containing the fields).
    """
    Q = result.quotient_ring
    j = split_sequence(result)
    jmap = {result.source.index(nm): p for nm, p in j.items()}
    qimg = {Q.index(nm): p for nm, p in result.pullbacks.items()}
    out = []
    for Y in fields:
        coeffs = {}
        for nm, p in result.pullbacks.items():
            F = Y(p)
            G = F.subs(jmap, Q)
            if G.subs(qimg, result.source) != F:
                raise UsageError(f"{Y} does not descend to the quotient")
            coeffs[Q.index(nm)] = G
        Y1 = Derivation(Q, coeffs)
        if Y1:
            out.append(Y1)
    return out


def iterated_quotient(R: WeightedPolyRing, h: GradedSubalgebra, first: GradedSubalgebra) -> QuotientResult:
    """E/H computed as (E/H₁)/(H/H₁) for an ideal h₁ ⊆ h."""
    if not first.issubalgebra_of(h):
        raise UsageError("first-stage algebra is not contained in h")
    for X in first.basis_list():
        for Y in h.basis_list():
            if not first.contains(bracket(X, Y)):
                raise UsageError("first-stage algebra is not an ideal of h")
    q1 = staged_quotient(R, first)
    pushed = push_forward(q1, h.basis_list())
    h2 = GradedSubalgebra(q1.quotient_ring, pushed)
    q2 = staged_quotient(q1.quotient_ring, h2)
    base = {q1.quotient_ring.index(nm): p for nm, p in q1.pullbacks.items()}
    pull = {nm: p.subs(base, R) for nm, p in q2.pullbacks.items()}
    return QuotientResult(R, h, q2.quotient_ring, pull, None, q1.stages + q2.stages)


@dataclass
class PikeReport:
    vertical_first: bool
    horizontal_first: bool
    d1: WideData
    d2: WideData
    degrees_checked: list
    direct: QuotientResult | None = None

    @property
    def ok(self) -> bool:
        return self.vertical_first and self.horizontal_first

    def __bool__(self):
        return self.ok


def _spans_equal(r1: QuotientResult, r2: QuotientResult, degrees) -> bool:
    return all(invariant_span(r1, k) == invariant_span(r2, k) for k in degrees)


PIKE_DEGREES = [(i, j) for i in range(3) for j in range(3) if (i, j) != (0, 0)]


def pike_verify(spec: DVBSubalgebraSpec, d1: WideData | None = None,
                d2: WideData | None = None) -> PikeReport:
    """Both iterated quotients agree with the direct one (spans up to (2,2))."""
    if d1 is None or d2 is None:
        d1, d2 = pike_decompose(spec)
    D = spec.fiber
    h = spec.subalgebra()
    direct = staged_quotient(D.ring, h)
    degs = [k for k in PIKE_DEGREES if D.ring.monomials_of_weight(k)]
    v = iterated_quotient(D.ring, h, d1.subalgebra())
    hz = iterated_quotient(D.ring, h, d2.subalgebra())
    return PikeReport(_spans_equal(direct, v, degs), _spans_equal(direct, hz, degs), d1, d2, degs, direct)


def pike_uniqueness(spec: DVBSubalgebraSpec, c1: Subspace, c2: Subspace) -> bool:
    """Part (c): cores C₁, C₂ with C₁ + C₂ = C′ give the same quotient, and
    their flow-outs under exp(C′) are the canonical pair with C₁ = C₂ = C′."""
    if c1 + c2 != spec.cprime:
        raise UsageError("C₁ + C₂ must equal C′")
    d1, d2 = pike_decompose(spec)
    e1 = WideData(d1.fiber, "B", d1.sub, c1, d1.twist)
    e2 = WideData(d2.fiber, "A", d2.sub, c2, d2.twist)
    D = spec.fiber
    h = spec.subalgebra()
    regen = saturate(lie_closure(D.ring, e1.subalgebra().basis_list() + e2.subalgebra().basis_list()))
    return (regen == h
            and e1.normalized(spec.cprime).same_bundle(d1)
            and e2.normalized(spec.cprime).same_bundle(d2))
