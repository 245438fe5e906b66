"""End-to-end acceptance gate.

One test per criterion; each asserts the stated tolerance and, where the
criterion fixes a budget, the wall-clock limit.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from normbridge.constants import (NormIndexPair, corner_constant,
                                  embedding_norm, interpolation_upper)
from normbridge.decomp import (ANCHORED, ConstantProfile, TensorFunction,
                               convert, sign_flip_conjugate,
                               transform_matrix, witness_ratio)
from normbridge.density import (INF, BetaLike, ExpType, ParetoLike, Uniform)
from normbridge.growth import exponent_check, log_dims, sweep
from normbridge.oracle import bruteforce_corner, quad_metric, ratio_scan
from normbridge.weights import (DimensionDependentWeights, ExplicitWeights,
                                FiniteDiameterWeights, FiniteOrderWeights,
                                PODWeights, ProductWeights)

HALF = Fraction(1, 2)
ONE = Fraction(1)
CORNERS = [(1, 1), (1, INF), (INF, 1), (INF, INF)]


def structured_family(kind, d, exact):
    if kind == "product":
        if exact:
            return ProductWeights([Fraction(1, 2 ** j)
                                   for j in range(1, d + 1)])
        return ProductWeights([0.5 ** j for j in range(1, d + 1)])
    if kind == "pod":
        return PODWeights(d, 1, 2, ONE if exact else 1.0)
    if kind == "finite-order":
        return FiniteOrderWeights(d, HALF if exact else 0.5, 2)
    if kind == "finite-diameter":
        return FiniteDiameterWeights(d, HALF if exact else 0.5, 2)
    return DimensionDependentWeights(d)


def as_explicit(w):
    """Materialize any family so the brute-force gamma lookups are flat."""
    return ExplicitWeights(w.d, {m: w.gamma(m) for m in range(1 << w.d)
                                 if w.gamma(m) > 0})


def random_monotone(d, rng, exact):
    """Random downward-closed weights over a random lower set."""
    vals = {0: ONE if exact else 1.0}
    for mask in range(1, 1 << d):
        num = int(rng.integers(1, 64))
        vals[mask] = Fraction(num, 64) if exact else num / 64.0
    for mask in range(1, 1 << d):
        if rng.random() < 0.2:
            for sup in range(mask, 1 << d):
                if sup & mask == mask and sup in vals:
                    del vals[sup]
    return ExplicitWeights(d, vals)


def test_criterion_1_corner_exactness_vs_brute_force():
    start = time.monotonic()
    kinds = ("product", "pod", "finite-order", "finite-diameter",
             "dimension-dependent")
    # structured families: exact rationals up to d = 8, floats above
    for kind in kinds:
        for d in range(1, 13):
            exact = d <= 8
            w = structured_family(kind, d, exact)
            flat = as_explicit(w)
            m = HALF if exact else 0.5
            kappa = ONE if exact else 1.0
            for p, q in CORNERS:
                oracle = bruteforce_corner(flat, m, kappa, p, q)
                module = corner_constant(w, m, kappa, p, q)
                if exact:
                    assert oracle == module, (kind, d, p, q)
                else:
                    assert float(module) == pytest.approx(
                        float(oracle), rel=1e-12), (kind, d, p, q)
    # 50 random monotone explicit families across the dimension range
    rng = np.random.default_rng(2024)
    for i in range(50):
        d = 2 + i % 11  # cycles through 2..12
        exact = d <= 8
        w = random_monotone(d, rng, exact)
        m = HALF if exact else 0.5
        kappa = ONE if exact else 1.0
        for p, q in CORNERS:
            oracle = bruteforce_corner(w, m, kappa, p, q)
            module = corner_constant(w, m, kappa, p, q)
            if exact:
                assert oracle == module, (i, d, p, q)
            else:
                assert float(module) == pytest.approx(
                    float(oracle), rel=1e-12), (i, d, p, q)
    assert time.monotonic() - start < 60.0


def test_criterion_2_density_characterizations():
    ps = [1.0, 1.5, 2.0, 3.0, INF]
    mismatches = []
    for alpha in (-0.5, 0.0, 1.0, 2.0, 3.0, 4.0):
        for p in ps:
            got = BetaLike(alpha).check_conditions(p).eq2_holds
            want = (p == INF) or (p > alpha + 1.0) or \
                (p == 1.0 and alpha == 0.0)
            if got != want:
                mismatches.append(("beta", alpha, p))
            if not BetaLike(alpha, closed_end=False).check_conditions(
                    p).eq2_holds:
                mismatches.append(("beta-open", alpha, p))
    for alpha in (2.0, 3.0, 4.0):  # the family needs alpha > 1
        for p in ps:
            rep = ParetoLike(alpha).check_conditions(p)
            want = alpha > 2.0 and (p == INF or
                                    p > 1.0 + 1.0 / (alpha - 2.0))
            if rep.eq2_holds != want or not rep.eq1_holds:
                mismatches.append(("pareto", alpha, p))
    for a in (0.5, 1.0, 2.0):
        for p in ps:
            rep = ExpType(a, 1.0).check_conditions(p)
            want = a >= 1.0 or p > 1.0
            if rep.eq2_holds != want or not rep.eq1_holds:
                mismatches.append(("exp", a, p))
    assert mismatches == []


def test_criterion_3_known_scalars_and_quadrature_agreement():
    u = Uniform()
    assert u.mean_m() == pytest.approx(0.5, abs=1e-12)
    assert u.kappa() == pytest.approx(1.0, abs=1e-12)
    cases = [
        (u, "m", None, u.mean_m()),
        (u, "kappa", None, u.kappa()),
        (u, "B", 2.0, u.b_p(2.0)),
        (BetaLike(1.0), "m", None, BetaLike(1.0).mean_m()),
        (BetaLike(1.0), "kappa", None, BetaLike(1.0).kappa()),
        (BetaLike(2.0), "B", 4.0, BetaLike(2.0).b_p(4.0)),
        (ParetoLike(4.0), "m", None, ParetoLike(4.0).mean_m()),
        (ParetoLike(4.0), "B", 2.0, ParetoLike(4.0).b_p(2.0)),
        (ExpType(1.0, 2.0), "m", None, ExpType(1.0, 2.0).mean_m()),
        (ExpType(1.0, 2.0), "kappa", None, ExpType(1.0, 2.0).kappa()),
    ]
    for density, metric, p, want in cases:
        assert quad_metric(density, metric, p) == \
            pytest.approx(want, abs=1e-8), (density, metric, p)


def test_criterion_4_witness_convergence():
    w = ProductWeights([HALF, Fraction(1, 8), Fraction(1, 4)])
    u = Uniform()
    # the constant-profile witness is exact at the mean-driven corners
    assert witness_ratio("infinf", w, u) == \
        corner_constant(w, HALF, ONE, INF, INF)
    assert witness_ratio("inf1", w, u) == \
        corner_constant(w, HALF, ONE, INF, 1)
    for case, p, q in (("11", 1, 1), ("1inf", 1, INF)):
        target = float(corner_constant(w, HALF, ONE, p, q))
        gaps = []
        for n in (1, 10, 100, 1000):
            ratio = float(witness_ratio(case, w, u, n))
            gaps.append(target - ratio)
        assert all(g >= -1e-12 for g in gaps), case
        assert all(a >= b - 1e-12 for a, b in zip(gaps, gaps[1:])), case
        assert gaps[-1] < 0.01 * target, case


def test_criterion_5_binomial_inversion_round_trip():
    rng = np.random.default_rng(5)
    worst = 0.0
    for i in range(1000):
        d = int(rng.integers(1, 11))
        n_terms = int(rng.integers(1, min(8, 1 << d) + 1))
        masks = rng.choice(1 << d, size=n_terms, replace=False)
        exact = i % 5 == 0
        if exact:
            eta = {int(m): Fraction(int(rng.integers(-20, 21)), 7)
                   for m in masks}
            c = Fraction(int(rng.integers(-20, 21)), 10)
        else:
            eta = {int(m): float(rng.standard_normal()) for m in masks}
            c = float(rng.uniform(-2.0, 2.0))
        f = TensorFunction(d, eta, ConstantProfile(), ANCHORED)
        back = convert(convert(f, c), c)
        if exact:
            assert back.eta == {m: v for m, v in eta.items() if v != 0}
        else:
            keys = set(eta) | set(back.eta)
            err = max(abs(float(back.eta.get(k, 0.0))
                          - float(eta.get(k, 0.0))) for k in keys)
            worst = max(worst, err)
    assert worst <= 1e-10

    # rational transform matrix times its sign conjugate is the identity
    for w in (FiniteOrderWeights(10, HALF, 2),
              ProductWeights([Fraction(1, j + 2) for j in range(6)])):
        M, masks = transform_matrix(w, Fraction(1, 3))
        Minv = sign_flip_conjugate(M, masks)
        n = len(masks)
        for i in range(n):
            for j in range(n):
                want = 1 if i == j else 0
                assert sum(M[i][k] * Minv[k][j]
                           for k in range(n)) == want


def test_criterion_6_bound_sandwich():
    grid = [1.0, 4.0 / 3.0, 2.0, 4.0, INF]
    met = Uniform().metrics()
    families = [FiniteOrderWeights(8, 1.0, 2),
                ProductWeights([0.5 ** j for j in range(1, 9)]),
                DimensionDependentWeights(8)]
    for w in families:
        for p in grid:
            for q in grid:
                pq = NormIndexPair(p, q)
                res = embedding_norm(w, met, pq)
                assert float(res.lower) <= float(res.upper) * (1 + 1e-12), \
                    (w.kind, p, q)
                if pq.is_corner:
                    exact = float(corner_constant(w, 0.5, 1.0, p, q))
                    assert float(res.lower) == pytest.approx(exact, rel=1e-9)
                    assert float(res.upper) == pytest.approx(exact, rel=1e-9)


def test_criterion_7_growth_exponents():
    start = time.monotonic()
    met = Uniform().metrics()
    for q, tau_want in ((2.0, 1.0), (INF, 2.0)):
        tau_hat, tau_theory = exponent_check(
            "finite-order", NormIndexPair(2.0, q), {"omega": 1, "r": 2},
            log_dims(4096))
        assert tau_theory == tau_want
        assert tau_hat == pytest.approx(tau_want, abs=0.1)
    tau_hat, tau_theory = exponent_check(
        "finite-diameter", NormIndexPair(2.0, INF), {"omega": 1, "r": 3},
        log_dims(4096))
    assert tau_theory == 1.0
    assert tau_hat == pytest.approx(1.0, abs=0.1)

    rep = sweep("dimension-dependent", {}, met, NormIndexPair(1, 1),
                log_dims(10 ** 4))
    assert all(s.exact <= math.exp(1.0) for s in rep.samples)

    rep = sweep("product", {"seq": "1/j^2"}, met, NormIndexPair(1, 1),
                log_dims(10 ** 7))
    assert rep.classification == "uniform"
    assert time.monotonic() - start < 120.0


def test_criterion_8_ratio_scan_never_exceeds_upper():
    rng = np.random.default_rng(88)
    u = Uniform()
    met = u.metrics()
    for _ in range(20):
        d = int(rng.integers(1, 7))
        w = ProductWeights([float(g) for g in
                            rng.uniform(0.05, 1.0, size=d)])
        p = float(rng.choice([1.0, 1.5, 2.0, 4.0, INF]))
        q = float(rng.choice([1.0, 4.0 / 3.0, 2.0, INF]))
        pq = NormIndexPair(p, q)
        scan = ratio_scan(w, u, pq, trials=10 ** 4,
                          seed=int(rng.integers(10 ** 6)))
        upper = float(interpolation_upper(w, met.m, met.kappa, pq))
        assert scan <= upper * (1 + 1e-12), (d, p, q)
        # the scan also stays above the certified lower bound's floor 1
        assert scan >= 1.0 - 1e-12
