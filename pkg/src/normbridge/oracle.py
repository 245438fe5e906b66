"""Independent cross-checks: brute force, raw quadrature, random search.

Everything here deliberately avoids the closed forms and lattice transforms
of the main modules, so agreement between the two paths is meaningful
evidence rather than a tautology.  Clarity over speed throughout.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .constants import NON_MONOTONE_MSG, NormIndexPair, _corner_param
from .decomp import ConstantProfile
from .density import INF, Density
from .errors import CapacityError, InfeasibleError
from .lattice import popcount, submasks
from .weights import WeightFamily

BRUTE_MAX_D = 14
SCAN_MAX_D = 10


def bruteforce_corner(w: WeightFamily, m, kappa, p, q):
    """Literal O(3^d) evaluation of the corner maxima, no shortcuts.

    Rational inputs give exact rational results.
    """
    if w.d > BRUTE_MAX_D:
        raise CapacityError(f"brute force capped at d={BRUTE_MAX_D}")
    if not w.check_monotone():
        raise InfeasibleError(NON_MONOTONE_MSG)
    if q not in (1, INF):
        raise InfeasibleError(f"corner constant needs q in {{1, inf}}, got {q}")
    x = _corner_param(m, kappa, p)
    full = (1 << w.d) - 1
    best = None
    if q == INF:
        for u in range(1 << w.d):
            gu = w.gamma(u)
            if gu == 0:
                continue
            total = 0 * x
            for v in submasks(full ^ u):
                guv = w.gamma(u | v)
                if guv == 0:
                    continue
                total = total + x ** popcount(v) * _div(guv, gu)
            if best is None or total > best:
                best = total
    else:
        for v in range(1 << w.d):
            gv = w.gamma(v)
            if gv == 0:
                continue
            total = 0 * x
            for u in submasks(v):
                gu = w.gamma(u)
                if gu == 0:
                    continue
                total = total + x ** popcount(v ^ u) * _div(gv, gu)
            if best is None or total > best:
                best = total
    return best


def _div(a, b):
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a) / b
    return a / b


# ---------------------------------------------------------------------------
# Quadrature oracle for density metrics
# ---------------------------------------------------------------------------

def _grid(density: Density, n: int) -> np.ndarray:
    """Sample points covering the domain; unbounded domains are mapped
    through t = u/(1-u), so the grid thins out toward infinity."""
    hi = density.T
    if math.isinf(hi):
        u = np.linspace(0.0, 1.0, n, endpoint=False)
        return u / (1.0 - u)
    if not density.closed_end:
        hi = hi * (1.0 - 1e-12)
    return np.linspace(0.0, hi, n)


def _pdf_vals(density: Density, t: np.ndarray) -> np.ndarray:
    return np.array([density.pdf(float(s)) for s in t])


def _survival_grid(t: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Tail integrals of psi at the grid points, accumulated right to
    left; independent of any closed-form survival function.

    Each segment uses the exponential rule (exact when psi decays
    exponentially between nodes, second-order otherwise), falling back to
    the trapezoid where the values are equal or vanish."""
    p0, p1 = psi[:-1], psi[1:]
    dt = np.diff(t)
    trap = 0.5 * (p0 + p1) * dt
    with np.errstate(divide="ignore", invalid="ignore"):
        dlog = np.log(np.maximum(p0, 1e-300)) - \
            np.log(np.maximum(p1, 1e-300))
        expo = (p0 - p1) * dt / dlog
    use_expo = (p0 > 0) & (p1 > 0) & (np.abs(dlog) > 1e-12)
    seg = np.where(use_expo, expo, trap)
    out = np.zeros_like(t)
    out[:-1] = np.cumsum(seg[::-1])[::-1]
    return out


def _quad_once(density: Density, metric: str, p, n: int) -> float:
    t = _grid(density, n)
    psi = _pdf_vals(density, t)
    bar = _survival_grid(t, psi)
    if metric == "m":
        return float(np.trapezoid(bar, t))
    if metric == "kappa":
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(psi > 0, bar / np.maximum(psi, 1e-300), 0.0)
            # trust only points whose left segment resolves the decay of
            # psi, else coarse far-tail trapezoids inflate the ratio
            dlog = np.abs(np.diff(np.log(np.maximum(psi, 1e-300))))
        resolved = np.concatenate([[True], dlog <= 0.5])
        return float(np.max(np.where(resolved, ratio, 0.0)))
    if metric == "B":
        if p == 1:
            return _quad_once(density, "kappa", None, n)
        if p == INF:
            return float(np.trapezoid(bar, t))
        pp = p / (p - 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            integrand = np.where(
                psi > 0, bar ** pp * np.maximum(psi, 1e-300) ** (1.0 - pp),
                0.0)
        return float(np.trapezoid(integrand, t)) ** (1.0 / pp)
    raise InfeasibleError(f"unknown metric '{metric}'")


def quad_metric(density: Density, metric: str, p=None,
                tol: float = 1e-8) -> float:
    """Grid-quadrature value of m, kappa, or B(p), refined until stable.

    Truncation at the far end of an unbounded domain leaves increments that
    shrink geometrically under refinement; those are summed off by Richardson
    extrapolation on the measured ratio.  Divergent quantities, whose
    increments stop shrinking, come back as inf.
    """
    vals = []
    prev_est = None
    n = 4097
    for _ in range(8):
        v = _quad_once(density, metric, p, n)
        if not math.isfinite(v) or v > 1e12:
            return math.inf
        vals.append(v)
        if len(vals) >= 2 and \
                abs(vals[-1] - vals[-2]) <= max(tol, tol * abs(v)):
            return v
        if len(vals) >= 3:
            inc1 = vals[-2] - vals[-3]
            inc2 = vals[-1] - vals[-2]
            if abs(inc1) > 0 and abs(inc2) < 0.9 * abs(inc1):
                r = inc2 / inc1
                est = vals[-1] + inc2 * r / (1.0 - r)
                if prev_est is not None and \
                        abs(est - prev_est) <= max(tol, tol * abs(est)):
                    return est
                prev_est = est
        n = 2 * (n - 1) + 1
    if abs(vals[-1] - vals[-2]) > 0.9 * abs(vals[-2] - vals[-3]):
        return math.inf
    return vals[-1] if prev_est is None else prev_est


# ---------------------------------------------------------------------------
# Randomized ratio scan
# ---------------------------------------------------------------------------

def _transform_dense(masks, x: float) -> np.ndarray:
    n = len(masks)
    T = np.zeros((n, n))
    pos = {m: i for i, m in enumerate(masks)}
    for j, v in enumerate(masks):
        for u in submasks(v):
            i = pos.get(u)
            if i is not None:
                T[i, j] = x ** popcount(v ^ u)
    return T


def _qnorms(rows: np.ndarray, q: float) -> np.ndarray:
    a = np.abs(rows)
    if q == INF:
        return a.max(axis=1)
    return (a ** q).sum(axis=1) ** (1.0 / q)


def ratio_scan(w: WeightFamily, density: Density, pq: NormIndexPair,
               trials: int = 10000, seed: int = 0,
               include_witnesses: bool = True) -> float:
    """Empirical lower bound on the embedding norm from random tensor
    functions with a constant univariate factor.

    Every candidate is a genuine function of the space, so the maximal
    ratio never exceeds any valid upper bound.  Reproducible by seed.
    """
    if w.d > SCAN_MAX_D:
        raise CapacityError(f"ratio scan capped at d={SCAN_MAX_D}")
    if not w.check_monotone():
        raise InfeasibleError(NON_MONOTONE_MSG)
    profile = ConstantProfile()
    c = float(profile.coupling(density, pq.p))
    masks = w.support_masks()
    n = len(masks)
    gamma = np.array([float(w.gamma(u)) for u in masks])
    T = _transform_dense(masks, c)

    rng = np.random.default_rng(seed)
    etas = rng.standard_normal((trials, n))
    keep = rng.random((trials, n)) < rng.random((trials, 1))
    keep[:, rng.integers(0, n, trials)] = True
    etas = np.where(keep, etas, 0.0)
    if include_witnesses:
        signs = np.array([(-1) ** popcount(u) for u in masks], dtype=float)
        extra = [gamma, gamma * signs, np.eye(n)]
        etas = np.vstack([etas] + extra)

    converted = etas @ T.T
    src = _qnorms(etas / gamma, pq.q)
    dst = _qnorms(converted / gamma, pq.q)
    ok = src > 0
    if not ok.any():
        return 0.0
    return float(np.max(dst[ok] / src[ok]))
