"""Seeded generators for the randomized suites.

Bounded families: at most 6 variables, weights ≤ (2,2), coefficients in
{−3..3}.  Everything is driven by a ``random.Random`` so a (seed, case)
pair always yields the same instance.
"""
from __future__ import annotations

import random
from itertools import combinations

from gmpy2 import mpq

from .dvb import DVBFiber, DVBSubalgebraSpec, warp
from .grading import Subspace, box, is_zero
from .nilpotent import (GradedSubalgebra, check_condition,
                        check_weak_condition, lie_closure, negative_degrees,
                        saturate)
from .polyalg import Derivation, Polynomial, WeightedPolyRing

COEFFS = [-3, -2, -1, 1, 2, 3]


def rng_for(seed: int, case: int, salt: str = "") -> random.Random:
    return random.Random(f"{seed}:{case}:{salt}")


def random_ring(rng: random.Random, max_vars: int = 6, n: int | None = None) -> WeightedPolyRing:
    n = n or rng.choice([1, 2])
    cap = (2,) * n
    weights = [w for w in box(cap) if not is_zero(w)]
    k = rng.randint(1, max_vars)
    ws = sorted(rng.choice(weights) for _ in range(k))
    return WeightedPolyRing([(f"x{i + 1}", w) for i, w in enumerate(ws)])


def random_homogeneous(rng, R: WeightedPolyRing, degree, terms: int = 3) -> Derivation:
    basis = R.slot_basis(degree)
    vec = [0] * len(basis)
    for j in rng.sample(range(len(basis)), min(len(basis), rng.randint(1, terms))):
        vec[j] = rng.choice(COEFFS)
    return Derivation.from_vector(R, degree, vec)


def random_negative_field(rng, R: WeightedPolyRing, parts: int | None = None) -> Derivation:
    degs = negative_degrees(R)
    if not degs:
        return Derivation.zero(R)
    X = Derivation.zero(R)
    for d in rng.sample(degs, min(len(degs), parts or rng.randint(1, 2))):
        X = X + random_homogeneous(rng, R, d)
    return X


def random_subalgebra(rng, R: WeightedPolyRing, max_gens: int = 3) -> GradedSubalgebra:
    degs = negative_degrees(R)
    gens = [random_homogeneous(rng, R, rng.choice(degs), terms=2)
            for _ in range(rng.randint(1, max_gens))] if degs else []
    return lie_closure(R, gens)


def random_valid_pair(rng, max_vars: int = 6, tries: int = 200):
    """A ring and a subalgebra satisfying the quotient condition.

    Random subalgebras that only satisfy the weak condition are saturated;
    others are discarded and redrawn.
    """
    for _ in range(tries):
        R = random_ring(rng, max_vars)
        h = random_subalgebra(rng, R)
        if check_condition(h):
            return R, h
        if check_weak_condition(h):
            s = saturate(h)
            if check_condition(s):
                return R, s
    raise RuntimeError("no valid instance found")


# ---------------------------------------------------------------- DVB specs

def random_core_subspace(rng, c: int) -> Subspace:
    k = rng.randint(0, c)
    vecs = [[rng.choice(COEFFS + [0]) for _ in range(c)] for _ in range(k)]
    return Subspace.span(vecs, c)


def _random_matrix(rng, rows, cols):
    return [[rng.choice(COEFFS + [0, 0]) for _ in range(cols)] for _ in range(rows)]


def random_dvb_spec(rng, max_rank: int = 3, valid: bool = True) -> DVBSubalgebraSpec:
    """A random spec; with ``valid`` the fat conditions and closure are enforced."""
    a, b, c = (rng.randint(0, max_rank) for _ in range(3))
    if a + b + c == 0:
        a = 1
    D = DVBFiber(a, b, c)
    Cp = random_core_subspace(rng, c)

    def lifts(nside, nother, make):
        k = rng.randint(0, nside)
        sides = Subspace.span([[rng.choice(COEFFS + [0]) for _ in range(nside)] for _ in range(k)], nside)
        return [make(row, _random_matrix(rng, c, nother)) for row in sides.rows]

    A_ext = lifts(a, b, D.fat_a)
    B_ext = lifts(b, a, D.fat_b)
    if not valid:
        extra_a = [D.fat_a([0] * a, _random_matrix(rng, c, b)) for _ in range(rng.randint(0, 1))]
        extra_b = [D.fat_b([0] * b, _random_matrix(rng, c, a)) for _ in range(rng.randint(0, 1))]
        return DVBSubalgebraSpec(D, [X for X in A_ext + extra_a + D.i_hat_a(Cp) if X and rng.random() < 0.85],
                                 [X for X in B_ext + extra_b + D.i_hat_b(Cp) if X and rng.random() < 0.85], Cp)
    # enlarge C′ until the warps of the side lifts land in it
    while True:
        ws = [warp(D, X, Y) for X in A_ext for Y in B_ext]
        C2 = Cp + Subspace.span(ws, c) if c else Cp
        if C2 == Cp:
            break
        Cp = C2
    return DVBSubalgebraSpec(D, A_ext + D.i_hat_a(Cp), B_ext + D.i_hat_b(Cp), Cp)


def random_split(rng, Cp: Subspace):
    """C₁, C₂ with C₁ + C₂ = C′."""
    rows = list(Cp.rows)
    c1 = [r for r in rows if rng.random() < 0.6]
    c2 = [r for r in rows if r not in c1 or rng.random() < 0.3]
    return Subspace.span(c1, Cp.dim_ambient), Subspace.span(c2, Cp.dim_ambient)


# ---------------------------------------------------------------- twists

def random_twist(rng, names, weights, max_terms: int = 2):
    """Filtration-preserving φ: u_i ↦ u_i + Σ c·u_a·u_b with a, b < i."""
    from .geom.jets import FiltrationDiffeo, chart_ring

    n = len(weights[0])
    R = chart_ring(names, n)
    corrections = {}
    for i, wi in enumerate(weights):
        cands = []
        for a, b in [(a, b) for a in range(i) for b in range(a, i)]:
            w = tuple(x + y for x, y in zip(weights[a], weights[b]))
            if all(x >= y for x, y in zip(w, wi)):
                cands.append((a, b))
        if not cands:
            continue
        p = R.zero()
        for a, b in rng.sample(cands, min(len(cands), rng.randint(0, max_terms))):
            p = p + R.var(a) * R.var(b) * rng.choice(COEFFS)
        if p:
            corrections[i] = p
    return FiltrationDiffeo(names, weights, corrections)


def subsets(m: int):
    items = list(range(1, m + 1))
    for k in range(m + 1):
        for c in combinations(items, k):
            yield frozenset(c)
