"""Randomized property suites shared by the test suite and ``gq verify``.

Each suite takes a seed and a case count and returns a :class:`SuiteResult`
with pass/fail counts and the first few failure messages.  Suites never
raise on a property failure; unexpected exceptions are counted as failures
with their message.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product

from gmpy2 import mpq

from .dvb import (DVBFiber, DVBSubalgebraSpec, HeisenbergElement, check_quot2,
                  group_element, heisenberg_mul, pike_uniqueness, pike_verify,
                  quotient_dvb)
from .errors import GQError
from .geom.jets import JetSpace, chart_ring
from .geom.normal import (double_normal_gr, double_normal_subquotient, dnb_weights,
                          flip, weighted_normal_order2, wnb_weights, chart_names)
from .geom.weil import WeilAlgebra, jet_evaluate, symmetrize_element
from .grading import Subspace, is_zero, maximal_indices, neg, rref
from .nilpotent import (GradedSubalgebra, bch, check_condition,
                        check_weak_condition, exp_automorphism, saturate)
from .polyalg import Derivation, Polynomial, WeightedPolyRing, bracket
from .quotient import (brute_force_dims, compose_check, invariant_span, invariant_span_dims,
                       linear_approximation, split_sequence, staged_quotient)
from . import random_instances as ri

MAX_FAILURES_KEPT = 5


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    passed: int = 0
    failed: int = 0
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    split_passed: int = 0
    split_failed: int = 0
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.split_failed == 0

    def record(self, ok: bool, msg: str = ""):
        self.cases += 1
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < MAX_FAILURES_KEPT:
                self.failures.append(msg)

    def bump(self, key, k=1):
        self.stats[key] = self.stats.get(key, 0) + k

    def check_split(self, result):
        """π∘j = id, and the linear part of j is a right inverse of π's."""
        try:
            j = split_sequence(result)
            ok = compose_check(result, j) and _linear_right_inverse(result, j)
            msg = "π∘j ≠ id"
        except GQError as exc:
            ok, msg = False, str(exc)
        if not ok and len(self.failures) < MAX_FAILURES_KEPT:
            self.failures.append(f"split: {msg}")
        if ok:
            self.split_passed += 1
        else:
            self.split_failed += 1

    def as_dict(self) -> dict:
        return {"name": self.name, "cases": self.cases, "passed": self.passed,
                "failed": self.failed, "failures": list(self.failures),
                "stats": dict(sorted(self.stats.items())),
                "split_passed": self.split_passed, "split_failed": self.split_failed}


def _linear_right_inverse(result, j: dict) -> bool:
    S, T = result.source, result.quotient_ring
    piL = linear_approximation(result)
    for w, M in piL.items():
        sv = S.vars_of_weight(w)
        tv = T.vars_of_weight(w)
        J = [[j[S.names[s]].linear_coefficient(t) for t in tv] for s in sv]
        for a in range(len(tv)):
            for b in range(len(tv)):
                val = sum((M[a][k] * J[k][b] for k in range(len(sv))), mpq(0))
                if val != (1 if a == b else 0):
                    return False
    return True


def _guard(res: SuiteResult, label, fn):
    try:
        ok, msg = fn()
    except GQError as exc:
        ok, msg = False, f"{type(exc).__name__}: {exc}"
    res.record(ok, f"{label}: {msg}" if msg else label)
    return ok


# ---------------------------------------------------------------- 1. exp / BCH

def suite_exp_bch(seed: int, cases: int = 200) -> SuiteResult:
    res = SuiteResult("exp-bch")
    t0 = time.time()
    for case in range(cases):
        rng = ri.rng_for(seed, case, "exp")
        R = ri.random_ring(rng)
        X = ri.random_negative_field(rng, R)
        Y = ri.random_negative_field(rng, R)

        def run():
            eX = exp_automorphism(X)
            if not eX.compose(exp_automorphism(-X)).is_identity():
                return False, f"exp(X)∘exp(−X) ≠ id for X = {X}"
            if not eX.is_triangular():
                return False, f"exp({X}) is not triangular"
            Z = bch(X, Y)
            if exp_automorphism(Z) != eX.compose(exp_automorphism(Y)):
                return False, f"exp(bch) ≠ exp∘exp for X = {X}, Y = {Y}"
            return True, ""

        _guard(res, f"case {case}", run)
    res.seconds = time.time() - t0
    return res


# ---------------------------------------------------------------- 2. condition theorem

def _balance(result) -> bool:
    src = result.source_dims()
    q = result.quotient_dims()
    k = result.kernel_dims()
    return all(src.get(w, 0) == q.get(w, 0) + k.get(w, 0) for w in set(src) | set(q) | set(k))


def suite_condition(seed: int, cases: int = 200) -> SuiteResult:
    res = SuiteResult("condition")
    t0 = time.time()
    for case in range(cases):
        rng = ri.rng_for(seed, case, "cond")
        R = ri.random_ring(rng)
        h = ri.random_subalgebra(rng, R)

        def run():
            rep = check_condition(h)
            if rep:
                res.bump("holds")
                q = staged_quotient(R, h)
                res.check_split(q)
                return _balance(q), "dims do not balance"
            k, lhs, rhs = rep.witness
            if lhs == rhs:
                return False, "failure reported without a witness"
            if not check_weak_condition(h):
                res.bump("unquotientable")
                return True, ""
            res.bump("saturated")
            s = saturate(h)
            if not check_condition(s):
                return False, "saturation does not satisfy the condition"
            if not h.issubalgebra_of(s):
                return False, "saturation is not monotone"
            q = staged_quotient(R, s)
            res.check_split(q)
            return _balance(q), "dims do not balance after saturation"

        _guard(res, f"case {case}", run)
    res.seconds = time.time() - t0
    return res


# ---------------------------------------------------------------- 3. oracle equivalence

def _lex_min_selector(S):
    return min(maximal_indices(S))


def suite_oracle(seed: int, cases: int = 100, bound: int = 3) -> SuiteResult:
    res = SuiteResult("oracle")
    t0 = time.time()
    for case in range(cases):
        rng = ri.rng_for(seed, case, "oracle")
        R, h = ri.random_valid_pair(rng)

        def run():
            q = staged_quotient(R, h)
            res.check_split(q)
            dmax = (bound,) * R.n
            staged = invariant_span_dims(q, dmax)
            oracle = brute_force_dims(R, h, dmax)
            if staged != oracle:
                return False, f"staged {staged} vs oracle {oracle}"
            for X in h.basis_list():
                for p in q.pullbacks.values():
                    if X(p):
                        return False, "pullback not invariant"
            if len(maximal_indices(h.support() or {(0,) * R.n})) > 1:
                res.bump("several maximal indices")
                q2 = staged_quotient(R, h, selector=_lex_min_selector)
                for k in staged:
                    if invariant_span(q, k) != invariant_span(q2, k):
                        return False, f"stage order changes the invariant span in degree {k}"
            return True, ""

        _guard(res, f"case {case}", run)
    res.seconds = time.time() - t0
    return res


# ---------------------------------------------------------------- 4. DVB

def _basis_triples(D: DVBFiber):
    R = D.ring
    zero = Derivation.zero(R)
    zc = (mpq(0),) * D.c
    out = []
    for d, kind in (((-1, 0), "a"), ((0, -1), "b")):
        for j in range(len(R.slot_basis(d))):
            vec = [0] * len(R.slot_basis(d))
            vec[j] = 1
            X = Derivation.from_vector(R, d, vec)
            out.append(HeisenbergElement(X, zero, zc) if kind == "a" else HeisenbergElement(zero, X, zc))
    for k in range(D.c):
        out.append(HeisenbergElement(zero, zero, tuple(mpq(1 if i == k else 0) for i in range(D.c))))
    return out


def group_law_check(D: DVBFiber) -> tuple:
    els = _basis_triples(D)
    G = [group_element(D, g) for g in els]
    bad = 0
    for i, g1 in enumerate(els):
        for j, g2 in enumerate(els):
            if group_element(D, heisenberg_mul(D, g1, g2)) != G[i].compose(G[j]):
                bad += 1
    return len(els) ** 2, bad


def suite_dvb(seed: int, cases: int = 100, max_rank: int = 3) -> SuiteResult:
    res = SuiteResult("dvb")
    t0 = time.time()
    for a, b, c in product(range(max_rank + 1), repeat=3):
        D = DVBFiber(a, b, c)
        _guard(res, f"group law ({a},{b},{c})",
               lambda: (lambda n_bad: (n_bad[1] == 0, f"{n_bad[1]} of {n_bad[0]} pairs disagree"))(
                   group_law_check(D)))
    for a, b, c in product(range(5), repeat=3):
        D = DVBFiber(a, b, c)
        _guard(res, f"dim P^(1,1) ({a},{b},{c})",
               lambda: (D.dim_P11() == a * b + c, f"{D.dim_P11()} ≠ {a * b + c}"))
    for case in range(cases):
        rng = ri.rng_for(seed, case, "dvb-any")
        spec = ri.random_dvb_spec(rng, max_rank, valid=rng.random() < 0.4)

        def run_equiv():
            rep = check_quot2(spec)
            res.bump("fat conditions hold" if rep.fat_conditions else "fat conditions fail")
            return rep.fat_conditions == rep.gc_criterion, "fat conditions vs g_C′ criterion"

        _guard(res, f"equivalence case {case}", run_equiv)
    for case in range(cases):
        rng = ri.rng_for(seed, case, "dvb-valid")
        spec = ri.random_dvb_spec(rng, max_rank, valid=True)

        def run_ranks():
            rep = quotient_dvb(spec)
            res.check_split(rep.result)
            D = spec.fiber
            A1, B1 = spec.side_images()
            want = (D.a - A1.dim, D.b - B1.dim, D.c - spec.cprime.dim)
            return rep.ranks == want, f"ranks {rep.ranks} ≠ {want}"

        _guard(res, f"ranks case {case}", run_ranks)
    res.seconds = time.time() - t0
    return res


# ---------------------------------------------------------------- 5. decomposition

def suite_pike(seed: int, cases: int = 100, max_rank: int = 3) -> SuiteResult:
    res = SuiteResult("pike")
    t0 = time.time()
    for case in range(cases):
        rng = ri.rng_for(seed, case, "pike")
        spec = ri.random_dvb_spec(rng, max_rank, valid=True)
        c1, c2 = ri.random_split(rng, spec.cprime)

        def run():
            rep = pike_verify(spec)
            res.check_split(rep.direct)
            if not rep.ok:
                return False, f"iterated quotients differ (v {rep.vertical_first}, h {rep.horizontal_first})"
            if rep.d1.core != spec.cprime or rep.d2.core != spec.cprime:
                return False, "canonical decomposition does not have C₁ = C₂ = C′"
            if not pike_uniqueness(spec, c1, c2):
                return False, "normalised flow-outs differ from the canonical pair"
            return True, ""

        _guard(res, f"case {case}", run)
    res.seconds = time.time() - t0
    return res


# ---------------------------------------------------------------- 6. lifts

def _random_poly(rng, R, max_deg=3, terms=3):
    p = R.zero()
    for _ in range(rng.randint(1, terms)):
        e = [0] * len(R.names)
        for _ in range(rng.randint(0, max_deg)):
            e[rng.randrange(len(R.names))] += 1
        p = p + Polynomial(R, {tuple(e): mpq(rng.choice(ri.COEFFS))})
    return p


def _random_chart_field(rng, R, max_deg=3):
    return Derivation(R, {v: _random_poly(rng, R, max_deg, 2)
                          for v in rng.sample(range(len(R.names)), rng.randint(1, len(R.names)))})


def lift_identities(rng, m: int):
    """Yields (label, ok) for every identity on one random (f, g, X, Y)."""
    names = chart_names(m)
    T1 = JetSpace(names, (1,))
    T2 = JetSpace(names, (2,))
    TT = JetSpace(names, (1, 1))
    C = T1.chart
    f, g = _random_poly(rng, C), _random_poly(rng, C)
    X, Y = _random_chart_field(rng, C), _random_chart_field(rng, C)
    lf = lambda p, w, S=T1: S.lift_function(p, w)
    lX = lambda Z, w, S=T1: S.lift_field(Z, w)
    ft, fv = lf(f, (1,)), lf(f, (0,))
    Xt, Xv, Yt, Yv = lX(X, (0,)), lX(X, (1,)), lX(Y, (0,)), lX(Y, (1,))
    yield "(fX)_t = f_t X_v + f_v X_t", lX(f * X, (0,)) == ft * Xv + fv * Xt
    br_v = lX(bracket(X, Y), (1,))
    yield "[X,Y]_v = [X_t,Y_v]", br_v == bracket(Xt, Yv)
    yield "[X,Y]_v = [X_v,Y_t]", br_v == bracket(Xv, Yt)
    yield "[X,Y]_t = [X_t,Y_t]", lX(bracket(X, Y), (0,)) == bracket(Xt, Yt)
    yield "(Xf)_t = X_t f_t", lf(X(f), (1,)) == Xt(ft)
    yield "(fg)_t = f_t g_v + f_v g_t", lf(f * g, (1,)) == ft * lf(g, (0,)) + fv * lf(g, (1,))
    for S, idx in ((T2, [(0,), (1,), (2,)]), (TT, list(product((0, 1), repeat=2)))):
        lifts_f = S.function_lifts(f)
        lifts_Xf = S.function_lifts(X(f))
        for i in idx:
            Xi = S.lift_field(X, i)
            for j in idx:
                d = tuple(a - b for a, b in zip(j, i))
                rhs = lifts_Xf[d] if all(x >= 0 for x in d) else S.ring.zero()
                yield f"X^(-{i}) f^({j}) = (Xf)^({d})", Xi(lifts_f[j]) == rhs
    # jet evaluation: unital and multiplicative at a random rational jet
    for S in (T2, TT):
        pt = [S.weil.element({e: mpq(rng.choice(ri.COEFFS), rng.randint(1, 3)) for e in S.weil.basis})
              for _ in range(m)]
        yield f"jet_evaluate multiplicative on {S.weil.orders}", \
            jet_evaluate(f * g, pt) == jet_evaluate(f, pt) * jet_evaluate(g, pt)
        yield f"jet_evaluate unital on {S.weil.orders}", jet_evaluate(C.one(), pt) == S.weil.scalar(1)
    # symmetrisation is a flip-invariant algebra map
    A2 = WeilAlgebra((2,))
    p = A2.element({(k,): mpq(rng.choice(ri.COEFFS)) for k in range(3)})
    q = A2.element({(k,): mpq(rng.choice(ri.COEFFS)) for k in range(3)})
    sp = symmetrize_element(p)
    yield "symmetrize multiplicative", symmetrize_element(p * q) == sp * symmetrize_element(q)
    yield "symmetrize flip-invariant", all(sp.coeff((a, b)) == sp.coeff((b, a)) for a in (0, 1) for b in (0, 1))


def suite_lifts(seed: int, cases: int = 200, max_m: int = 4) -> SuiteResult:
    res = SuiteResult("lifts")
    t0 = time.time()
    for case in range(cases):
        rng = ri.rng_for(seed, case, "lifts")
        m = rng.randint(1, max_m)

        def run():
            bad = [label for label, ok in lift_identities(rng, m) if not ok]
            return not bad, ", ".join(bad)

        _guard(res, f"case {case} (m={m})", run)
    res.seconds = time.time() - t0
    return res


# ---------------------------------------------------------------- 7. double normal bundles

def dnb_configurations(max_m: int):
    for m in range(1, max_m + 1):
        for I1 in ri.subsets(m):
            for I2 in ri.subsets(m):
                yield m, I1, I2


def dnb_class(m, I1, I2):
    return (m, len(I1 - I2), len(I2 - I1), len(I1 & I2))


def _dnb_agree(gr, sq) -> str:
    if gr.summary() != sq.summary():
        return f"gr {gr.summary()} vs subquotient {sq.summary()}"
    return ""


def suite_dnb(seed: int, twists: int = 20, max_m: int = 5, twist_scope: str = "all") -> SuiteResult:
    """All configurations untwisted; ``twists`` seeded twists per configuration
    (``twist_scope='all'``) or per symmetry class (``'class'``)."""
    res = SuiteResult("double-normal")
    t0 = time.time()
    seen = set()
    for m, I1, I2 in dnb_configurations(max_m):
        label = f"m={m} I1={sorted(I1)} I2={sorted(I2)}"

        def run_plain():
            gr = double_normal_gr(m, I1, I2)
            sq = double_normal_subquotient(m, I1, I2)
            msg = _dnb_agree(gr, sq)
            if msg:
                return False, msg
            want = (len(I2 - I1), len(I1 - I2))
            if gr.sides != want or gr.core != len(I1 & I2) or gr.excess != gr.core:
                return False, "rank formula"
            if flip(sq).summary() != double_normal_subquotient(m, I2, I1).summary():
                return False, "flip symmetry (subquotient)"
            if flip(gr).summary() != double_normal_gr(m, I2, I1).summary():
                return False, "flip symmetry (gr)"
            if flip(flip(gr)) != gr:
                return False, "flip is not an involution"
            return True, ""

        _guard(res, label, run_plain)
        cls = dnb_class(m, I1, I2)
        if twist_scope not in ("all", "class"):
            raise ValueError(f"twist_scope must be 'all' or 'class', not {twist_scope!r}")
        if twist_scope == "class" and cls in seen:
            continue
        seen.add(cls)
        gr = double_normal_gr(m, I1, I2)
        for t in range(twists):
            rng = ri.rng_for(seed, t, f"dnb:{m}:{sorted(I1)}:{sorted(I2)}")
            tw = ri.random_twist(rng, chart_names(m), dnb_weights(m, I1, I2))

            def run_twist():
                sq = double_normal_subquotient(m, I1, I2, twist=tw)
                return not _dnb_agree(gr, sq), _dnb_agree(gr, sq)

            res.bump("twisted runs")
            _guard(res, f"{label} twist {t} {tw.describe()}", run_twist)
    res.stats["configurations"] = sum(1 for _ in dnb_configurations(max_m))
    res.stats["classes twisted"] = len(seen)
    res.seconds = time.time() - t0
    return res


# ---------------------------------------------------------------- 8. weighted normal bundles

def wnb_configurations(max_m: int):
    for m in range(1, max_m + 1):
        for I in ri.subsets(m):
            for J in ri.subsets(m):
                if J <= I:
                    yield m, I, J


def suite_wnb(seed: int, twists: int = 20, max_m: int = 4) -> SuiteResult:
    res = SuiteResult("weighted-normal")
    t0 = time.time()
    for m, I, J in wnb_configurations(max_m):
        gr = weighted_normal_order2(m, I, J, method="gr")
        label = f"m={m} I={sorted(I)} J={sorted(J)}"
        for t in range(twists + 1):
            if t == 0:
                tw = None
            else:
                rng = ri.rng_for(seed, t, f"wnb:{m}:{sorted(I)}:{sorted(J)}")
                tw = ri.random_twist(rng, chart_names(m), wnb_weights(m, I, J))

            def run():
                sq = weighted_normal_order2(m, I, J, twist=tw, method="subquotient")
                if (gr.graded_dims, gr.span_dims) != (sq.graded_dims, sq.span_dims):
                    return False, f"gr {gr.graded_dims}/{gr.span_dims} vs {sq.graded_dims}/{sq.span_dims}"
                if not sq.exact_sequence_ok:
                    return False, f"exact sequence dims {sq.kernel_dims} + {sq.graded_dims} vs {sq.total_dims}"
                if sq.linear_ranks != {(1,): len(J), (2,): len(I - J)}:
                    return False, f"linear approximation ranks {sq.linear_ranks}"
                return True, ""

            _guard(res, f"{label} twist {t}", run)
    res.seconds = time.time() - t0
    return res


SUITES = {
    "exp-bch": suite_exp_bch,
    "condition": suite_condition,
    "oracle": suite_oracle,
    "dvb": suite_dvb,
    "pike": suite_pike,
    "lifts": suite_lifts,
    "double-normal": suite_dnb,
    "weighted-normal": suite_wnb,
}
