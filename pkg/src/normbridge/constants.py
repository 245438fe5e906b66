"""Embedding norm between weighted anchored and ANOVA spaces.

Exact values at the four corner index pairs p,q in {1,inf}:

    p=inf,q=inf:  max_u sum_{v in u^c} m^|v|      gamma_{u+v}/gamma_u
    p=inf,q=1:    max_v sum_{u in v}   m^(|v|-|u|) gamma_v/gamma_u
    p=1, q=1:     max_v sum_{u in v}   k^(|v|-|u|) gamma_v/gamma_u
    p=1, q=inf:   max_u sum_{v in u^c} k^|v|      gamma_{u+v}/gamma_u

with m the density mean and k its tail-ratio supremum, sums restricted to
the support of gamma and 0/0 = 0.  Off the corners the norm is bracketed by
an interpolation upper bound and a variational lower bound; no exact value
is attempted there.

Corner constants are exact in rational arithmetic whenever the weights and
metrics are ints/Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import optimize

from .density import INF, DensityMetrics
from .errors import CapacityError, InfeasibleError
from .lattice import (popcount, submasks, subset_weighted_sum,
                      superset_weighted_sum)
from .weights import (DimensionDependentWeights, FiniteDiameterWeights,
                      FiniteOrderWeights, ProductWeights, WeightFamily)

#: generic lattice evaluation cutoff (O(d * 2^d) scalar work)
LATTICE_MAX_D = 14
#: dense lower-bound strategies cutoff
DENSE_MAX_D = 20
#: projected-gradient strategy cutoff (explicit request)
GRADIENT_MAX_D = 10
#: dimension up to which the auto strategy includes the gradient search
GRADIENT_AUTO_D = 6

NON_MONOTONE_MSG = ("weights are not downward closed: the anchored and "
                    "ANOVA spaces differ as sets (neither contains the "
                    "other), so no embedding norm exists")


@dataclass(frozen=True)
class NormIndexPair:
    """A pair of integrability/summability indices in [1, inf]."""

    p: float
    q: float

    def __post_init__(self):
        for name, v in (("p", self.p), ("q", self.q)):
            if not (1 <= v <= INF):
                raise InfeasibleError(f"index {name}={v} outside [1, inf]")

    @property
    def p_conj(self) -> float:
        return INF if self.p == 1 else (1.0 if self.p == INF
                                        else self.p / (self.p - 1))

    @property
    def is_corner(self) -> bool:
        return self.p in (1, INF) and self.q in (1, INF)


@dataclass(frozen=True)
class EmbeddingConstants:
    """Bracket (and exact value at corners) of the embedding norm."""

    exact: float | None
    lower: float
    upper: float
    method_notes: str


def _require_monotone(w: WeightFamily):
    if not w.check_monotone():
        raise InfeasibleError(NON_MONOTONE_MSG)


def _corner_param(m, kappa, p):
    """The scalar that drives a corner: the mean at p=inf, the tail-ratio
    supremum at p=1."""
    if p == INF:
        if m == INF or (isinstance(m, float) and math.isinf(m)):
            raise InfeasibleError(
                "density mean is infinite; the ANOVA construction needs an "
                "integrable survival function")
        return m
    if p == 1:
        if kappa == INF or (isinstance(kappa, float) and math.isinf(kappa)):
            raise InfeasibleError(
                "tail ratio psibar/psi is unbounded; the p=1 integrability "
                "condition fails for this density")
        return kappa
    raise InfeasibleError(f"corner constant needs p in {{1, inf}}, got {p}")


def corner_constant(w: WeightFamily, m, kappa, p, q):
    """Exact corner constant via lattice transforms, O(d * 2^d).

    Rational inputs give an exact rational result.  Beyond d=14 the five
    structured families dispatch to their closed forms.
    """
    _require_monotone(w)
    if q not in (1, INF):
        raise InfeasibleError(f"corner constant needs q in {{1, inf}}, got {q}")
    x = _corner_param(m, kappa, p)
    if w.d > LATTICE_MAX_D:
        return closed_form_constant(w, m, kappa, p, q)
    table = w.gamma_table()
    return _corner_from_table(table, w.d, x, q)


def _reciprocal(g):
    if isinstance(g, (int, Fraction)):
        return Fraction(1) / g
    return 1.0 / g


def _corner_from_table(table, d, x, q, with_argmax=False):
    if q == INF:
        z = superset_weighted_sum(table, d, x)
        vals = ((z[u] / table[u], u) for u in range(1 << d) if table[u] > 0)
    else:
        inv = [_reciprocal(g) if g > 0 else 0 * x for g in table]
        s = subset_weighted_sum(inv, d, x)
        vals = ((table[v] * s[v], v) for v in range(1 << d) if table[v] > 0)
    best, arg = None, None
    for val, mask in vals:  # ties break on the first mask in order
        if best is None or val > best:
            best, arg = val, mask
    return (best, arg) if with_argmax else best


def corner_argmax(w: WeightFamily, m, kappa, p, q):
    """Corner constant together with the first maximizing subset mask."""
    _require_monotone(w)
    if q not in (1, INF):
        raise InfeasibleError(f"corner constant needs q in {{1, inf}}, got {q}")
    x = _corner_param(m, kappa, p)
    if w.d > LATTICE_MAX_D:
        raise CapacityError(f"corner argmax needs d <= {LATTICE_MAX_D}")
    return _corner_from_table(w.gamma_table(), w.d, x, q, with_argmax=True)


def closed_form_constant(w: WeightFamily, m, kappa, p, q):
    """Polynomial-cost corner constants for the five structured families.

    Unsupported kinds fall back to the lattice evaluation for d <= 14.
    """
    _require_monotone(w)
    if q not in (1, INF):
        raise InfeasibleError(f"corner constant needs q in {{1, inf}}, got {q}")
    x = _corner_param(m, kappa, p)
    d = w.d
    if isinstance(w, ProductWeights):
        out = 1
        for g in w.gammas:
            out = out * (1 + x * g)
        return out
    if isinstance(w, FiniteOrderWeights):
        t = x * w.omega
        if q == 1:
            return (1 + t) ** min(w.r, d)
        # maximum attained at u = empty: all subsets up to order r contribute
        return sum(math.comb(d, j) * t ** j for j in range(min(w.r, d) + 1))
    if isinstance(w, FiniteDiameterWeights):
        t = x * w.omega
        if q == 1:
            return (1 + t) ** min(w.r + 1, d)
        out = 1 + 0 * t
        for j in range(1, min(w.r + 1, d) + 1):
            out = out + _diam_count(d, w.r, j) * t ** j
        return out
    if isinstance(w, DimensionDependentWeights):
        return (1 + x * Fraction(1, d)) ** d if isinstance(
            x, (int, Fraction)) else (1.0 + float(x) / d) ** d
    if d <= LATTICE_MAX_D:
        return _corner_from_table(w.gamma_table(), d, x, q)
    raise CapacityError(
        f"no closed form for kind '{w.kind}' and d={d} > {LATTICE_MAX_D}")


def _diam_count(d: int, r: int, j: int) -> int:
    """Number of j-element subsets of [1:d] with diameter <= r."""
    if j == 0:
        return 1
    return sum(math.comb(min(r, d - i), j - 1) for i in range(1, d + 1))


def _inv(p) -> float:
    return 0.0 if p == INF else 1.0 / p


def _pow(base, expo: float):
    if expo == 0:
        return 1
    if expo == 1:
        return base
    return float(base) ** expo


def _corner_dispatch(w, m, kappa, p, q):
    if isinstance(w, (ProductWeights, FiniteOrderWeights,
                      FiniteDiameterWeights, DimensionDependentWeights)):
        return closed_form_constant(w, m, kappa, p, q)
    return corner_constant(w, m, kappa, p, q)


def interpolation_upper(w: WeightFamily, m, kappa, pq: NormIndexPair):
    """Product of corner-constant powers bounding the norm from above.

    For p <= q the exponents fall on (C_{1,inf}, C_{1,1}, C_{inf,inf}),
    for q <= p on (C_{inf,1}, C_{1,1}, C_{inf,inf}); corners reproduce the
    exact constant.
    """
    _require_monotone(w)
    ip, iq = _inv(pq.p), _inv(pq.q)
    c11 = _corner_dispatch(w, m, kappa, 1, 1)
    cii = _corner_dispatch(w, m, kappa, INF, INF)
    if ip >= iq:  # p <= q
        c1i = _corner_dispatch(w, m, kappa, 1, INF)
        return _pow(c1i, ip - iq) * _pow(c11, iq) * _pow(cii, 1 - ip)
    ci1 = _corner_dispatch(w, m, kappa, INF, 1)
    return _pow(ci1, iq - ip) * _pow(c11, ip) * _pow(cii, 1 - iq)


# ---------------------------------------------------------------------------
# Variational lower bound
# ---------------------------------------------------------------------------

def _superset_zeta_np(a: np.ndarray, d: int) -> np.ndarray:
    out = a.reshape([2] * d).copy() if d else a.copy()
    for axis in range(d):
        idx0 = [slice(None)] * d
        idx1 = [slice(None)] * d
        idx0[axis] = 0
        idx1[axis] = 1
        out[tuple(idx0)] += out[tuple(idx1)]
    return out.reshape(-1)


class _LowerBoundProblem:
    """Dense representation of c -> |Mc|_q / |c|_q on the support lattice,
    where M_{u,v} = gamma_v B^{|v - u|} / gamma_u for u subset of v."""

    def __init__(self, w: WeightFamily, B: float, q: float):
        if w.d > DENSE_MAX_D:
            raise CapacityError(
                f"dense lower-bound strategies need d <= {DENSE_MAX_D}")
        self.d = w.d
        self.q = q
        self.gamma = np.array([float(g) for g in w.gamma_table()])
        self.support = self.gamma > 0
        self.sizes = np.array(
            [popcount(u) for u in range(1 << w.d)], dtype=float)
        self.B = float(B)
        self.bpow = self.B ** self.sizes
        self.scale = self.gamma * self.bpow

    def apply(self, c: np.ndarray) -> np.ndarray:
        h = np.where(self.support, c * self.scale, 0.0)
        z = _superset_zeta_np(h, self.d)
        out = np.zeros_like(c)
        out[self.support] = z[self.support] / self.scale[self.support]
        return out

    def _qnorm(self, v: np.ndarray) -> float:
        v = np.abs(v[self.support])
        if self.q == INF:
            return float(v.max(initial=0.0))
        return float((v ** self.q).sum() ** (1.0 / self.q))

    def ratio(self, c: np.ndarray) -> float:
        c = np.where(self.support, np.maximum(c, 0.0), 0.0)
        denom = self._qnorm(c)
        if denom == 0.0 or not np.isfinite(denom):
            return 0.0
        num = self._qnorm(self.apply(c))
        return num / denom

    def layer_vector(self, phi: np.ndarray) -> np.ndarray:
        return phi[self.sizes.astype(int)]


def _strategy_ones(prob: _LowerBoundProblem) -> float:
    return prob.ratio(np.ones(1 << prob.d))


def _strategy_onehot(prob: _LowerBoundProblem) -> float:
    """Exact best single-coefficient witness: the column with the largest
    q-norm.  O(3^d); limited to d <= 14."""
    if prob.d > LATTICE_MAX_D:
        return 0.0
    best = 0.0
    q = prob.q
    for v in np.flatnonzero(prob.support):
        gv = prob.gamma[int(v)]
        acc = 0.0
        for u in submasks(int(v)):
            gu = prob.gamma[u]
            if gu <= 0:
                continue
            entry = gv * prob.B ** (prob.sizes[int(v)] - prob.sizes[u]) / gu
            acc = max(acc, entry) if q == INF else acc + entry ** q
        val = acc if q == INF else acc ** (1.0 / q)
        best = max(best, val)
    return best


def _strategy_indicator(prob: _LowerBoundProblem) -> float:
    best = 0.0
    for s in range(prob.d + 1):
        c = (prob.sizes == s).astype(float)
        best = max(best, prob.ratio(c))
    return best


def _strategy_layered(prob: _LowerBoundProblem) -> float:
    d = prob.d

    def neg(theta):
        phi = np.exp(np.clip(theta, -40, 40))
        return -prob.ratio(prob.layer_vector(phi))

    starts = [np.zeros(d + 1)]
    for t in (0.25, 0.5, 2.0, 4.0):
        starts.append(np.arange(d + 1) * math.log(t))
    best = 0.0
    for x0 in starts:
        res = optimize.minimize(neg, x0, method="Nelder-Mead",
                                options={"maxiter": 400, "xatol": 1e-8,
                                         "fatol": 1e-12})
        best = max(best, -res.fun, -neg(x0))
    return best


def _strategy_gradient(prob: _LowerBoundProblem, seed: int = 0,
                       restarts: int = 8, steps: int = 200,
                       step_size: float = 0.1) -> float:
    """Projected ascent on log|Mc|_q - log|c|_q with numeric gradients on
    the support coordinates; any iterate certifies a lower bound."""
    if prob.d > GRADIENT_MAX_D:
        return 0.0
    rng = np.random.default_rng(seed)
    idx = np.flatnonzero(prob.support)
    best = 0.0
    eps = 1e-6
    for _ in range(restarts):
        c = np.zeros(1 << prob.d)
        c[idx] = rng.random(len(idx))
        val = prob.ratio(c)
        for _ in range(steps):
            grad = np.zeros(len(idx))
            for k, u in enumerate(idx):
                c[u] += eps
                grad[k] = (prob.ratio(c) - val) / eps
                c[u] -= eps
            norm = np.linalg.norm(grad)
            if norm < 1e-14:
                break
            c[idx] = np.maximum(c[idx] + step_size * grad / norm, 0.0)
            new_val = prob.ratio(c)
            if new_val <= val + 1e-14:
                break
            val = new_val
        best = max(best, val)
    return best


def variational_lower(w: WeightFamily, B_p: float, pq: NormIndexPair,
                      strategy: str = "auto", seed: int = 0) -> float:
    value, _ = variational_lower_detailed(w, B_p, pq, strategy, seed)
    return value


def variational_lower_detailed(w: WeightFamily, B_p: float,
                               pq: NormIndexPair, strategy: str = "auto",
                               seed: int = 0) -> tuple[float, str]:
    """Certified lower bound on the embedding norm plus winning strategy.

    Every candidate coefficient family is feasible, so the maximum of the
    evaluated ratios is a true lower bound regardless of strategy.
    """
    _require_monotone(w)
    if not (isinstance(B_p, (int, Fraction)) or math.isfinite(B_p)):
        raise InfeasibleError("lower bound needs a finite tail-ratio norm B_p")
    prob = _LowerBoundProblem(w, float(B_p), pq.q)
    runs: list[tuple[str, float]] = []
    if strategy in ("auto", "ones"):
        runs.append(("ones", _strategy_ones(prob)))
    if strategy in ("auto", "onehot") and w.d <= LATTICE_MAX_D:
        runs.append(("onehot", _strategy_onehot(prob)))
    if strategy in ("auto", "indicator"):
        runs.append(("indicator", _strategy_indicator(prob)))
    if strategy in ("auto", "layered"):
        runs.append(("layered", _strategy_layered(prob)))
    if strategy == "gradient" and w.d <= GRADIENT_MAX_D or \
            strategy == "auto" and w.d <= GRADIENT_AUTO_D:
        runs.append(("gradient", _strategy_gradient(prob, seed=seed)))
    if not runs:
        raise InfeasibleError(
            f"strategy '{strategy}' not applicable at d={w.d}")
    name, value = max(runs, key=lambda kv: kv[1])
    return value, name


def embedding_norm(w: WeightFamily, metrics: DensityMetrics,
                   pq: NormIndexPair, seed: int = 0) -> EmbeddingConstants:
    """Exact corner value, or (variational lower, interpolation upper)."""
    _require_monotone(w)
    if pq.is_corner:
        value = _corner_dispatch(w, metrics.m, metrics.kappa, pq.p, pq.q)
        return EmbeddingConstants(
            exact=value, lower=value, upper=value,
            method_notes=f"corner (p={pq.p}, q={pq.q}): exact value")
    if pq.p == 1 and not math.isfinite(metrics.kappa):
        raise InfeasibleError(
            "tail ratio psibar/psi is unbounded; p=1 is infeasible for "
            "this density")
    B = metrics.b(pq.p)
    lower, name = variational_lower_detailed(w, B, pq, seed=seed)
    upper = float(interpolation_upper(w, metrics.m, metrics.kappa, pq))
    return EmbeddingConstants(
        exact=None, lower=lower, upper=upper,
        method_notes=f"lower: {name} strategy with B_p={B}; "
                     "upper: corner interpolation")
