"""Tensor-product decomposition calculus.

Functions f = sum_u eta_u * (component built from a univariate profile g)
admit both an anchored and an ANOVA decomposition; switching sides acts on
the coefficients alone:

    anchored -> ANOVA:   a_u = sum_{w in u^c} eta_{u+w} * c^|w|
    ANOVA -> anchored:   a_u = sum_{w in u^c} eta_{u+w} * (-c)^|w|

with the coupling scalar c = int g * psibar.  The two maps are mutual
inverses (binomial inversion).  The extremal witness functions that attain
or approach the corner constants live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .constants import LATTICE_MAX_D, NON_MONOTONE_MSG, corner_argmax
from .density import INF, QUAD_TOL, Density
from .errors import (CapacityError, InfeasibleError, MembershipError,
                     UsageError)
from .lattice import popcount, submasks, superset_weighted_sum
from .weights import WeightFamily

#: dense transform-matrix capacity (|support|^2 entries)
MATRIX_MAX_SUPPORT = 4096


# ---------------------------------------------------------------------------
# Univariate profiles
# ---------------------------------------------------------------------------

class Profile:
    """Univariate factor g of a tensor function."""

    def norm(self, p: float, density: Density) -> float:
        """|g| in the density-weighted L_p norm."""
        raise NotImplementedError

    def coupling(self, density: Density, p: float) -> float:
        """c = int g * psibar over the domain."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantProfile(Profile):
    """g = 1; unit norm for every p, coupling equal to the density mean."""

    def norm(self, p, density):
        return 1.0

    def coupling(self, density, p):
        return density.mean_m()

    def describe(self):
        return "constant"


@dataclass(frozen=True)
class LevelSetProfile(Profile):
    """g_n = G_n / psi with G_n the normalized indicator of the region
    where psibar/psi comes within 1/n of its supremum.  Unit L_1 norm;
    the coupling tends to that supremum as n grows."""

    n: int

    def _region(self, density: Density) -> tuple[float, float, float]:
        kappa = density.kappa()
        if not math.isfinite(kappa):
            raise InfeasibleError(
                "level-set witness needs a bounded tail ratio psibar/psi")
        lo, hi = density.level_set(kappa - 1.0 / self.n)
        return lo, hi, hi - lo

    def norm(self, p, density):
        lo, hi, lam = self._region(density)
        if p == 1:
            return 1.0
        if p == INF:
            return max(1.0 / (lam * density.pdf(t))
                       for t in np.linspace(lo, hi, 64))
        val, _ = integrate.quad(
            lambda t: (1.0 / (lam * density.pdf(t))) ** p * density.pdf(t),
            lo, hi, epsabs=QUAD_TOL, limit=200)
        return val ** (1.0 / p)

    def coupling(self, density, p):
        lo, hi, lam = self._region(density)
        val, _ = integrate.quad(
            lambda t: density.survival(t) / (lam * density.pdf(t))
            * 1.0, lo, hi, epsabs=QUAD_TOL, limit=200)
        return val

    def describe(self):
        return f"level-set(n={self.n})"


@dataclass(frozen=True)
class DualProfile(Profile):
    """Norm-one achiever of the coupling for p > 1: with h = psibar /
    psi^(1/p), take G = h^(p'-1) / |h|_{p'}^(p'-1) and g = G / psi^(1/p).
    Then |g|_{L_p,psi} = 1 and the coupling equals B_p."""

    p: float

    def __post_init__(self):
        if not self.p > 1:
            raise UsageError("dual profile needs p > 1")

    def norm(self, p, density):
        if p != self.p:
            raise UsageError(
                f"dual profile built for p={self.p}, evaluated at p={p}")
        return 1.0

    def coupling(self, density, p):
        return density.b_p(self.p)

    def describe(self):
        return f"dual(p={self.p})"


@dataclass(frozen=True)
class TabulatedProfile(Profile):
    """Piecewise-linear g from samples on the density's domain."""

    ts: tuple
    gs: tuple

    def _g(self, t):
        return float(np.interp(t, self.ts, self.gs))

    def norm(self, p, density):
        hi = self.ts[-1]
        if p == INF:
            return float(np.max(np.abs(self.gs)))
        val, _ = integrate.quad(
            lambda t: abs(self._g(t)) ** p * density.pdf(t), 0.0, hi,
            epsabs=QUAD_TOL, limit=200)
        return val ** (1.0 / p)

    def coupling(self, density, p):
        hi = self.ts[-1]
        val, _ = integrate.quad(
            lambda t: self._g(t) * density.survival(t), 0.0, hi,
            epsabs=QUAD_TOL, limit=200)
        return val

    def describe(self):
        return f"tabulated({len(self.ts)} nodes)"


def coupling_c(profile: Profile, density: Density, p: float) -> float:
    """The coupling scalar c = int g * psibar; requires the tail
    integrability condition at p."""
    report = density.check_conditions(p)
    if not report.eq2_holds:
        raise InfeasibleError(
            f"coupling integral diverges at p={p}: {report.reason}")
    return profile.coupling(density, p)


# ---------------------------------------------------------------------------
# Tensor functions and the side-change transform
# ---------------------------------------------------------------------------

ANCHORED = "anchored"
ANOVA = "anova"


@dataclass(frozen=True)
class TensorFunction:
    """Sparse subset-indexed coefficients plus a univariate profile."""

    d: int
    eta: dict
    profile: Profile
    side: str

    def __post_init__(self):
        if self.side not in (ANCHORED, ANOVA):
            raise UsageError(f"side must be '{ANCHORED}' or '{ANOVA}'")
        for mask in self.eta:
            if mask < 0 or mask >> self.d:
                raise UsageError(f"mask {mask} invalid for d={self.d}")


def convert(f: TensorFunction, c) -> TensorFunction:
    """Flip the decomposition side of f; the coefficient map uses +c from
    the anchored side and -c from the ANOVA side, so converting twice with
    the same c restores the original coefficients exactly."""
    step = c if f.side == ANCHORED else -c
    d = f.d
    support = {m for m, v in f.eta.items() if v != 0}
    dense_cost = d * (1 << d)
    sparse_cost = sum(1 << popcount(s) for s in support)
    out: dict = {}
    if support and sparse_cost > dense_cost and d <= LATTICE_MAX_D:
        dense = [0 * step] * (1 << d)
        for s, v in f.eta.items():
            dense[s] = dense[s] + v
        z = superset_weighted_sum(dense, d, step)
        out = {u: z[u] for u in range(1 << d) if z[u] != 0}
    else:
        for s in support:
            v = f.eta[s]
            for u in submasks(s):
                term = v * step ** popcount(s ^ u)
                if u in out:
                    out[u] = out[u] + term
                else:
                    out[u] = term
        out = {u: v for u, v in out.items() if v != 0}
    other = ANOVA if f.side == ANCHORED else ANCHORED
    return TensorFunction(d=d, eta=out, profile=f.profile, side=other)


def tensor_norm(f: TensorFunction, w: WeightFamily, density: Density,
                pq) -> float:
    """Weighted coefficient norm |( |eta_u| |g|^|u| / gamma_u )_u|_q."""
    p, q = pq.p, pq.q
    gnorm = f.profile.norm(p, density)
    if not math.isfinite(gnorm):
        raise InfeasibleError("profile norm is infinite at this p")
    terms = []
    for u, v in f.eta.items():
        if v == 0:
            continue
        g = w.gamma(u)
        if g == 0:
            raise MembershipError(
                f"coefficient on mask {u} has zero weight: the function "
                "lies outside the weighted space")
        if gnorm == 1.0:
            av = abs(v)
            if isinstance(av, int) and isinstance(g, (int, Fraction)):
                av = Fraction(av)  # avoid int/int true division to float
            terms.append(av / g)
        else:
            terms.append(abs(v) * gnorm ** popcount(u) / g)
    if not terms:
        return 0 * gnorm if gnorm == 1.0 else 0.0
    if q == INF:
        return max(terms)
    if q == 1:
        return sum(terms)  # stays exact for rational inputs
    return sum(float(t) ** float(q) for t in terms) ** (1.0 / float(q))


# ---------------------------------------------------------------------------
# Transform matrix and sign-flip conjugation
# ---------------------------------------------------------------------------

def transform_matrix(w: WeightFamily, c):
    """Dense coefficient matrix of the side change restricted to the
    support: M[i][j] = c^|v_j - u_i| when u_i is a subset of v_j, else 0.

    Returns (M, masks) with masks the sorted support.  M is a nested list
    when c is exact, a numpy array otherwise.  The inverse is S M S with
    S = diag((-1)^|u|)."""
    masks = w.support_masks()
    n = len(masks)
    if n > MATRIX_MAX_SUPPORT:
        raise CapacityError(
            f"support size {n} exceeds dense matrix capacity "
            f"{MATRIX_MAX_SUPPORT}")
    exact = isinstance(c, (int, Fraction))
    zero = Fraction(0) if exact else 0.0
    rows = []
    for u in masks:
        row = []
        for v in masks:
            if u & ~v:
                row.append(zero)
            else:
                row.append(c ** popcount(v ^ u))
        rows.append(row)
    if exact:
        return rows, masks
    return np.array(rows, dtype=float), masks


def sign_flip_conjugate(M, masks):
    """S M S with S = diag((-1)^|u|); equals the inverse transform."""
    signs = [(-1) ** popcount(m) for m in masks]
    if isinstance(M, np.ndarray):
        s = np.array(signs, dtype=float)
        return M * np.outer(s, s)
    return [[si * M[i][j] * sj for j, sj in enumerate(signs)]
            for i, si in enumerate(signs)]


# ---------------------------------------------------------------------------
# Witness sequences and ratios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessSequence:
    """Level-set witness data at step n."""

    n: int
    level_set: tuple[float, float]
    m_n: float


def witness_sequence(density: Density, n: int) -> WitnessSequence:
    profile = LevelSetProfile(n)
    lo, hi, _ = profile._region(density)
    return WitnessSequence(n=n, level_set=(lo, hi),
                           m_n=profile.coupling(density, 1))


CORNER_CASES = ("11", "1inf", "inf1", "infinf")


def witness_ratio(case: str, w: WeightFamily, density: Density,
                  n: int = 1) -> float:
    """Norm ratio of the extremal witness for a corner case.

    Cases "infinf"/"inf1" use the constant profile and reach the corner
    constant exactly; "11"/"1inf" use the level-set profile at step n and
    approach it from below as n grows.
    """
    if case not in CORNER_CASES:
        raise UsageError(f"case must be one of {CORNER_CASES}")
    if not w.check_monotone():
        raise InfeasibleError(NON_MONOTONE_MSG)
    exact = density.exact_metrics()
    if case == "infinf":
        profile: Profile = ConstantProfile()
        c = exact[0] if exact is not None else density.mean_m()
        eta = {u: w.gamma(u) for u in w.support_masks()}
        f = TensorFunction(w.d, eta, profile, ANCHORED)
        pq = _PQ(INF, INF)
    elif case == "inf1":
        profile = ConstantProfile()
        c = exact[0] if exact is not None else density.mean_m()
        m_val = density.mean_m()
        _, wmask = corner_argmax(w, m_val, density.kappa()
                                 if math.isfinite(density.kappa()) else None,
                                 INF, 1)
        f = TensorFunction(w.d, {wmask: w.gamma(wmask)}, profile, ANOVA)
        pq = _PQ(INF, 1)
    elif case == "11":
        if n < 1:
            raise UsageError("level-set witness needs n >= 1")
        profile = LevelSetProfile(n)
        c = coupling_c(profile, density, 1)
        _, wmask = corner_argmax(w, density.mean_m(), density.kappa(), 1, 1)
        f = TensorFunction(w.d, {wmask: w.gamma(wmask)}, profile, ANCHORED)
        pq = _PQ(1, 1)
    else:  # "1inf"
        if n < 1:
            raise UsageError("level-set witness needs n >= 1")
        profile = LevelSetProfile(n)
        c = coupling_c(profile, density, 1)
        eta = {u: (-1) ** popcount(u) * w.gamma(u)
               for u in w.support_masks()}
        f = TensorFunction(w.d, eta, profile, ANOVA)
        pq = _PQ(1, INF)
    src = tensor_norm(f, w, density, pq)
    dst = tensor_norm(convert(f, c), w, density, pq)
    return dst / src


@dataclass(frozen=True)
class _PQ:
    p: float
    q: float
