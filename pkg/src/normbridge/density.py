"""Probability densities on D = [0,T) or [0,T] and their derived metrics.

A density psi comes with its survival function psibar(t) = int_t^T psi,
the scalar metrics

    m     = int_D psibar(t) dt            (the mean of psi),
    kappa = esssup_{t in D} psibar(t)/psi(t),
    B(p)  = || psibar / psi^(1/p) ||_{p'} (conjugate-norm of the tail ratio),

and the two integrability conditions that decide whether the anchored and
ANOVA constructions are well defined at a given index p.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize, special

from .errors import DomainError, UsageError

INF = math.inf

#: default absolute tolerance for adaptive quadrature
QUAD_TOL = 1e-10

#: psi values below this are treated as exact zeros in ratios
PSI_FLOOR = 1e-300


def conjugate(p: float) -> float:
    """Conjugate index p' with 1/p + 1/p' = 1."""
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def _check_index(p) -> float:
    p = float(p)
    if not (1.0 <= p):
        raise UsageError(f"index p must lie in [1, inf], got {p}")
    return p


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the two integrability checks at index p."""

    p: float
    eq1_holds: bool
    eq2_holds: bool
    reason: str


@dataclass(frozen=True)
class DensityMetrics:
    """Bundle of the scalar metrics of one density.

    b(1) = kappa and b(inf) = m by definition of the underlying norms.
    """

    m: float
    kappa: float
    b: Callable[[float], float]


def _tail_quad(f, lo: float, tol: float = QUAD_TOL) -> float:
    """Integrate f over [lo, inf) with divergence detection.

    Doubling intervals: if the per-interval increments keep growing (or stop
    shrinking) past the cutoff, the integral is reported as inf.
    """
    total, prev_piece = 0.0, None
    a = lo
    width = 1.0
    for _ in range(80):
        b = a + width
        piece, _ = integrate.quad(f, a, b, epsabs=tol, limit=200)
        total += piece
        if prev_piece is not None and piece > prev_piece * 0.9 and piece > tol:
            # increments no longer decaying: certify divergence once large
            if total > 1e12:
                return INF
        if abs(piece) < tol and b > lo + 64.0:
            return total
        prev_piece = piece
        a = b
        width *= 2.0
    return INF if total > 1e12 else total


class Density:
    """Base class; concrete families override the closed-form pieces."""

    T: float
    closed_end: bool

    # -- basic evaluations -------------------------------------------------

    def pdf(self, t: float) -> float:
        raise NotImplementedError

    def _survival_impl(self, t: float) -> float:
        raise NotImplementedError

    def in_domain(self, t: float) -> bool:
        if t < 0.0:
            return False
        return t <= self.T if self.closed_end else t < self.T

    def survival(self, t: float) -> float:
        if not self.in_domain(t):
            raise DomainError(f"t={t} outside domain [0,{self.T}"
                              + ("]" if self.closed_end else ")"))
        return self._survival_impl(t)

    def ratio(self, t: float) -> float:
        """psibar(t)/psi(t), with inf at zeros of psi."""
        p = self.pdf(t)
        s = self.survival(t)
        if p <= PSI_FLOOR:
            return 0.0 if s <= PSI_FLOOR else INF
        return s / p

    # -- scalar metrics ----------------------------------------------------

    def mean_m(self) -> float:
        raise NotImplementedError

    def kappa(self) -> float:
        raise NotImplementedError

    def b_p(self, p) -> float:
        p = _check_index(p)
        if p == 1.0:
            return self.kappa()
        if p == INF:
            return self.mean_m()
        pp = conjugate(p)

        def integrand(t):
            psi = self.pdf(t)
            if psi <= PSI_FLOOR:
                return INF
            return (self._survival_impl(t) / psi ** (1.0 / p)) ** pp

        if math.isinf(self.T):
            val = _tail_quad(integrand, 0.0)
        else:
            val, _ = integrate.quad(integrand, 0.0, self.T,
                                    epsabs=QUAD_TOL, limit=400)
        if not math.isfinite(val):
            return INF
        return val ** (1.0 / pp)

    def metrics(self) -> DensityMetrics:
        return DensityMetrics(m=self.mean_m(), kappa=self.kappa(), b=self.b_p)

    def exact_metrics(self) -> Optional[tuple[Fraction, Fraction]]:
        """(m, kappa) as exact rationals where the family admits them."""
        return None

    # -- integrability conditions -------------------------------------------

    def check_conditions(self, p) -> ConditionReport:
        raise NotImplementedError

    # -- level sets of psibar/psi (for witness sequences) --------------------

    def _scan_grid(self, n: int = 1024) -> np.ndarray:
        if math.isinf(self.T):
            u = np.linspace(0.0, 1.0, n, endpoint=False)
            return u / (1.0 - u)
        hi = self.T if self.closed_end else self.T * (1.0 - 1e-12)
        return np.linspace(0.0, hi, n)

    def level_set(self, threshold: float) -> tuple[float, float]:
        """Maximal interval around the argmax of psibar/psi on which the
        ratio stays >= threshold.  Assumes the ratio is piecewise monotone,
        which holds for every built-in family; verified by a dense scan."""
        grid = self._scan_grid()
        vals = np.array([self.ratio(t) for t in grid])
        i_max = int(np.argmax(vals))
        if vals[i_max] < threshold:
            raise DomainError(
                f"level {threshold} exceeds max ratio {vals[i_max]}")
        lo_i = i_max
        while lo_i > 0 and vals[lo_i - 1] >= threshold:
            lo_i -= 1
        hi_i = i_max
        while hi_i + 1 < len(vals) and vals[hi_i + 1] >= threshold:
            hi_i += 1

        def bisect(a, b, want_rising):
            # ratio crosses threshold between a and b
            for _ in range(80):
                mid = 0.5 * (a + b)
                if (self.ratio(mid) >= threshold) == want_rising:
                    b = mid
                else:
                    a = mid
            return 0.5 * (a + b)

        lo = grid[lo_i]
        if lo_i > 0:
            lo = bisect(grid[lo_i - 1], grid[lo_i], want_rising=True)
        hi = grid[hi_i]
        if hi_i + 1 < len(vals):
            hi = bisect(grid[hi_i + 1], grid[hi_i], want_rising=True)
        if hi <= lo:
            hi = min(grid[min(hi_i + 1, len(grid) - 1)], lo + 1e-9)
        return float(lo), float(hi)


class Uniform(Density):
    """psi = 1 on [0,1]."""

    T = 1.0
    closed_end = True

    def pdf(self, t):
        return 1.0

    def _survival_impl(self, t):
        return 1.0 - t

    def mean_m(self):
        return 0.5

    def kappa(self):
        return 1.0

    def exact_metrics(self):
        return Fraction(1, 2), Fraction(1)

    def check_conditions(self, p):
        p = _check_index(p)
        return ConditionReport(p, True, True, "constant density: both hold")

    def __repr__(self):
        return "Uniform()"


class BetaLike(Density):
    """psi(t) = (alpha+1) * (1-t)^alpha on [0,1] or [0,1), alpha > -1."""

    T = 1.0

    def __init__(self, alpha: float, closed_end: bool = True):
        if not alpha > -1:
            raise UsageError("BetaLike requires alpha > -1")
        self.alpha = float(alpha)
        self.closed_end = closed_end

    def pdf(self, t):
        return (self.alpha + 1.0) * (1.0 - t) ** self.alpha

    def _survival_impl(self, t):
        return (1.0 - t) ** (self.alpha + 1.0)

    def mean_m(self):
        return 1.0 / (self.alpha + 2.0)

    def kappa(self):
        # psibar/psi = (1-t)/(alpha+1), maximal at t = 0
        return 1.0 / (self.alpha + 1.0)

    def exact_metrics(self):
        a = Fraction(self.alpha).limit_denominator(10**6)
        if float(a) != self.alpha:
            return None
        return 1 / (a + 2), 1 / (a + 1)

    def check_conditions(self, p):
        p = _check_index(p)
        if not self.closed_end:
            return ConditionReport(
                p, True, True,
                "half-open domain [0,1): both conditions hold for every p")
        ok = (p == INF) or (p > self.alpha + 1.0) or \
             (p == 1.0 and self.alpha == 0.0)
        reason = ("both hold" if ok else
                  f"psi^(-1/p) fails p'-integrability near t=1: "
                  f"needs p > alpha+1 = {self.alpha + 1.0}"
                  " (or p = 1 with alpha = 0)")
        # on a compact domain the two conditions coincide
        return ConditionReport(p, ok, ok, reason)

    def __repr__(self):
        return f"BetaLike(alpha={self.alpha}, closed_end={self.closed_end})"


class ParetoLike(Density):
    """psi(t) = (alpha-1) * (1+t)^(-alpha) on [0,inf), alpha > 1."""

    T = INF
    closed_end = False

    def __init__(self, alpha: float):
        if not alpha > 1:
            raise UsageError("ParetoLike requires alpha > 1")
        self.alpha = float(alpha)

    def pdf(self, t):
        return (self.alpha - 1.0) * (1.0 + t) ** (-self.alpha)

    def _survival_impl(self, t):
        return (1.0 + t) ** (1.0 - self.alpha)

    def mean_m(self):
        if self.alpha <= 2.0:
            return INF
        return 1.0 / (self.alpha - 2.0)

    def kappa(self):
        # psibar/psi = (1+t)/(alpha-1) is unbounded
        return INF

    def b_p(self, p):
        p = _check_index(p)
        if p == 1.0:
            return INF
        if p == INF:
            return self.mean_m()
        pp = conjugate(p)
        # integrand ~ (1+t)^(e*p') with e = 1 - alpha + alpha/p
        e = 1.0 - self.alpha + self.alpha / p
        if e * pp >= -1.0:
            return INF
        scale = (self.alpha - 1.0) ** (-1.0 / p)
        return scale * (1.0 / (-(e * pp) - 1.0)) ** (1.0 / pp)

    def check_conditions(self, p):
        p = _check_index(p)
        eq2 = self.alpha > 2.0 and \
            (p == INF or p > 1.0 + 1.0 / (self.alpha - 2.0))
        reason = ("both hold" if eq2 else
                  "tail integral of psibar * psi^(-1/p) diverges: needs "
                  f"alpha > 2 and p > 1 + 1/(alpha-2)")
        return ConditionReport(p, True, eq2, reason)

    def __repr__(self):
        return f"ParetoLike(alpha={self.alpha})"


class ExpType(Density):
    """psi(t) = c * exp(-b t^a) on [0,inf), a,b > 0, c the normalizer."""

    T = INF
    closed_end = False

    def __init__(self, a: float, b: float):
        if not (a > 0 and b > 0):
            raise UsageError("ExpType requires a > 0 and b > 0")
        self.a = float(a)
        self.b = float(b)
        self.c = b ** (1.0 / a) / special.gamma(1.0 + 1.0 / a)

    def pdf(self, t):
        return self.c * math.exp(-self.b * t ** self.a)

    def _survival_impl(self, t):
        # int_t^inf exp(-b y^a) dy = Gamma(1/a, b t^a) / (a b^(1/a))
        s = 1.0 / self.a
        upper = special.gammaincc(s, self.b * t ** self.a) * special.gamma(s)
        return self.c * upper / (self.a * self.b ** s)

    def mean_m(self):
        return self.c * special.gamma(2.0 / self.a) / \
            (self.a * self.b ** (2.0 / self.a))

    def kappa(self):
        if self.a < 1.0:
            # ratio ~ t^(1-a)/(a b) grows without bound; scan-certified
            return INF
        if self.a == 1.0:
            return 1.0 / self.b
        # bounded maximization of psibar/psi on the mapped half line
        res = optimize.minimize_scalar(
            lambda u: -self.ratio(u / (1.0 - u)),
            bounds=(0.0, 1.0 - 1e-9), method="bounded",
            options={"xatol": 1e-12})
        grid_best = max(self.ratio(t) for t in self._scan_grid(2048))
        return max(-res.fun, grid_best)

    def check_conditions(self, p):
        p = _check_index(p)
        eq2 = self.a >= 1.0 or p > 1.0
        reason = ("both hold" if eq2 else
                  "at p = 1 the tail ratio psibar/psi ~ t^(1-a)/(ab) is "
                  "unbounded for a < 1")
        return ConditionReport(p, True, eq2, reason)

    def __repr__(self):
        return f"ExpType(a={self.a}, b={self.b})"


class TabulatedDensity(Density):
    """Piecewise-linear density from (t, psi) samples on [0, T]."""

    closed_end = True

    def __init__(self, ts, psis, normalization_tol: float = 1e-6):
        ts = np.asarray(ts, dtype=float)
        psis = np.asarray(psis, dtype=float)
        if ts.ndim != 1 or ts.shape != psis.shape or len(ts) < 2:
            raise UsageError("tabulated density needs matching 1-d arrays")
        if ts[0] != 0.0:
            raise UsageError("tabulated grid must start at t = 0")
        if np.any(np.diff(ts) <= 0):
            raise UsageError("tabulated grid must be strictly increasing")
        if np.any(psis < 0):
            raise UsageError("tabulated density must be nonnegative")
        self.ts = ts
        self.psis = psis
        self.T = float(ts[-1])
        # exact trapezoid masses per segment (psi is piecewise linear)
        seg = 0.5 * (psis[1:] + psis[:-1]) * np.diff(ts)
        total = float(seg.sum())
        if abs(total - 1.0) > normalization_tol:
            raise UsageError(
                f"tabulated density integrates to {total}, not 1")
        # survival at the nodes, exact
        self._node_survival = np.concatenate(
            [np.cumsum(seg[::-1])[::-1], [0.0]])

    @classmethod
    def from_csv(cls, path) -> "TabulatedDensity":
        ts, psis = [], []
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or len(header) < 2 or \
                    header[0].strip().lower() != "t":
                raise UsageError(
                    "density CSV needs a header row 't,psi'")
            for row in reader:
                if not row:
                    continue
                ts.append(float(row[0]))
                psis.append(float(row[1]))
        return cls(ts, psis)

    def pdf(self, t):
        return float(np.interp(t, self.ts, self.psis))

    def _survival_impl(self, t):
        i = int(np.searchsorted(self.ts, t, side="right")) - 1
        i = min(max(i, 0), len(self.ts) - 2)
        t0, t1 = self.ts[i], self.ts[i + 1]
        p0, p1 = self.psis[i], self.psis[i + 1]
        # exact integral of the linear piece from t to t1
        dt = t1 - t
        p_t = p0 + (p1 - p0) * (t - t0) / (t1 - t0)
        return float(self._node_survival[i + 1] + 0.5 * (p_t + p1) * dt)

    def mean_m(self):
        # int psibar = int over segments of a piecewise-quadratic, done
        # with Simpson on each segment (exact for quadratics)
        total = 0.0
        for i in range(len(self.ts) - 1):
            a, b = self.ts[i], self.ts[i + 1]
            mid = 0.5 * (a + b)
            total += (b - a) / 6.0 * (
                self._survival_impl(a) + 4.0 * self._survival_impl(mid)
                + self._survival_impl(b))
        return total

    def kappa(self):
        # grid maximization over nodes and midpoints, then refinement
        cand = np.unique(np.concatenate(
            [self.ts, 0.5 * (self.ts[1:] + self.ts[:-1])]))
        vals = [self.ratio(t) for t in cand]
        best = max(vals)
        if math.isinf(best):
            return INF
        i = int(np.argmax(vals))
        lo = cand[max(i - 1, 0)]
        hi = cand[min(i + 1, len(cand) - 1)]
        if hi > lo:
            res = optimize.minimize_scalar(
                lambda t: -self.ratio(t), bounds=(lo, hi), method="bounded",
                options={"xatol": 1e-12})
            best = max(best, -res.fun)
        return best

    def _converges(self, integrand_desc: str, integrand) -> tuple[bool, str]:
        """Doubling epsilon-exclusion test around zeros of psi."""
        zero_ts = [t for t, p in zip(self.ts, self.psis) if p <= PSI_FLOOR]
        if not zero_ts:
            return True, f"{integrand_desc}: density is positive on the grid"
        prev = None
        for k in range(4, 13):
            eps = 2.0 ** (-k)
            total = 0.0
            pieces = [(0.0, self.T)]
            for z in zero_ts:
                new = []
                for a, b in pieces:
                    if a < z - eps:
                        new.append((a, min(b, z - eps)))
                    if b > z + eps:
                        new.append((max(a, z + eps), b))
                pieces = new
            for a, b in pieces:
                if b > a:
                    val, _ = integrate.quad(integrand, a, b,
                                            epsabs=1e-8, limit=200)
                    total += val
            if prev is not None and total > 2.0 * prev and total > 1e6:
                return False, (f"{integrand_desc} diverges near zeros of psi "
                               f"at t in {zero_ts}")
            prev = total
        return True, f"{integrand_desc} converges under interval refinement"

    def check_conditions(self, p):
        p = _check_index(p)
        if p == INF:
            return ConditionReport(
                p, True, True,
                "p = inf on a bounded domain: psibar is integrable")
        pp = conjugate(p)

        def f1(t):
            psi = self.pdf(t)
            return INF if psi <= PSI_FLOOR else psi ** (-pp / p)

        def f2(t):
            psi = self.pdf(t)
            if psi <= PSI_FLOOR:
                return INF
            return (self._survival_impl(t) / psi ** (1.0 / p)) ** pp

        if p == 1.0:
            # p' = inf: eq1 needs 1/psi locally bounded, eq2 needs
            # psibar/psi bounded
            eq1 = all(x > PSI_FLOOR for x in self.psis)
            eq2 = eq1 and math.isfinite(self.kappa())
            reason = ("both hold" if eq2 else
                      "esssup of psibar/psi is infinite (psi vanishes)")
            return ConditionReport(p, eq1, eq2, reason)
        eq1, r1 = self._converges("integral of psi^(-p'/p)", f1)
        if not eq1:
            return ConditionReport(p, False, False, r1)
        eq2, r2 = self._converges("integral of (psibar*psi^(-1/p))^p'", f2)
        return ConditionReport(p, True, eq2, r2 if not eq2 else "both hold")

    def __repr__(self):
        return f"TabulatedDensity(nodes={len(self.ts)}, T={self.T})"
