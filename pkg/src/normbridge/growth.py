"""Dimension sweeps: how the equivalence constants grow with d.

Structured weight families admit per-dimension corner values at polynomial
cost (O(d) or O(d*r) arithmetic instead of 2^d lattice work), so the
asymptotic regimes are observable at desk scale.  A sweep samples the
constant over a list of dimensions, fits a log-log regression, and labels
the family uniformly equivalent (bounded), polynomially equivalent (with a
fitted exponent), superpolynomial, or inconclusive.

Finite-sample classification only: the thresholds are heuristics and every
report carries the raw series so the judgement can be re-made.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constants import (LATTICE_MAX_D, NormIndexPair, _corner_param,
                        embedding_norm, interpolation_upper)
from .density import INF, DensityMetrics
from .errors import CapacityError, UsageError
from .weights import (DimensionDependentWeights, FiniteDiameterWeights,
                      FiniteOrderWeights, PODWeights)

#: relative tail increase below which a sampled series counts as bounded
UNIFORM_SLACK = 1e-6
#: log-log fit residual ceiling for the polynomial label
FIT_RESIDUAL_MAX = 0.05
#: minimal slope for the polynomial label
FIT_SLOPE_MIN = 0.01
#: slope increase between fit windows that signals superpolynomial growth
SLOPE_DIVERGENCE = 0.15

SWEEP_KINDS = ("product", "pod", "finite-order", "finite-diameter",
               "dimension-dependent", "custom")

NAMED_SEQUENCES = {
    "2^-j": lambda j: 0.5 ** j,
    "1/j": lambda j: 1.0 / j,
    "1/j^2": lambda j: 1.0 / j ** 2,
}


def thread_count() -> int:
    """Worker cap from NORMBRIDGE_THREADS, defaulting to the CPU count."""
    raw = os.environ.get("NORMBRIDGE_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise UsageError(
                f"NORMBRIDGE_THREADS must be an integer, got {raw!r}")
        if n < 1:
            raise UsageError("NORMBRIDGE_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _map_parallel(fn, items):
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares line through (log d, log value) with RMS residual."""

    slope: float
    intercept: float
    residual: float


@dataclass(frozen=True)
class GrowthSample:
    d: int
    lower: float
    upper: float | None
    exact: float | None


@dataclass(frozen=True)
class GrowthReport:
    family_desc: str
    pq: NormIndexPair
    samples: tuple
    classification: str
    tau_hat: float | None
    cap: float | None
    fit: GrowthFit | None

    def series(self) -> tuple[np.ndarray, np.ndarray]:
        """(d, value) arrays of the bound series used for classification:
        exact where available, otherwise the lower bound."""
        ds = np.array([s.d for s in self.samples], dtype=float)
        vals = np.array(
            [s.exact if s.exact is not None else s.lower
             for s in self.samples], dtype=float)
        return ds, vals


def log_dims(d_max: int, per_decade: int = 8) -> list[int]:
    """Log-spaced sample dimensions from 1 to d_max."""
    if d_max < 1:
        raise UsageError("d_max must be >= 1")
    n = max(2, int(per_decade * math.log10(d_max)) + 1) \
        if d_max > 1 else 1
    raw = np.unique(np.round(
        np.logspace(0, math.log10(d_max), n)).astype(int))
    return [int(d) for d in raw if 1 <= d <= d_max]


# ---------------------------------------------------------------------------
# Per-dimension corner values at polynomial cost
# ---------------------------------------------------------------------------

def finite_order_corner(d: int, omega: float, r: int, x: float,
                        q: float) -> float:
    """Corner value of the order-r family, O(r) arithmetic."""
    t = x * omega
    if q == 1:
        return (1.0 + t) ** min(r, d)
    return sum(math.comb(d, j) * t ** j for j in range(min(r, d) + 1))


def finite_diameter_corner(d: int, omega: float, r: int, x: float,
                           q: float) -> float:
    """Corner value of the diameter-r family, O(r) arithmetic."""
    t = x * omega
    if q == 1:
        return (1.0 + t) ** min(r + 1, d)
    if d <= r:
        return float(sum(math.comb(d, j) * t ** j for j in range(d + 1)))
    out = 1.0
    for j in range(1, r + 2):
        # j-subsets of diameter <= r: window [i, i+r] fully inside for
        # i <= d-r, truncated windows near the right edge otherwise
        count = ((d - r) * math.comb(r, j - 1)
                 + sum(math.comb(k, j - 1) for k in range(r)))
        out += count * t ** j
    return out


def dimension_dependent_corner(d: int, x: float) -> float:
    """(1 + x/d)^d, stable for very large d."""
    return math.exp(d * math.log1p(x / d))


def product_corner_series(gamma_fn, d_list, x: float) -> np.ndarray:
    """prod_{j<=d} (1 + x*gamma_j) at each sampled d, via one cumulative
    pass over log1p terms."""
    d_max = max(d_list)
    j = np.arange(1, d_max + 1, dtype=float)
    logs = np.cumsum(np.log1p(x * gamma_fn(j)))
    idx = np.array(d_list, dtype=int) - 1
    return np.exp(logs[idx])


def pod_prefix_sum(d_list, beta1: float, beta2: float, c: float,
                   x: float) -> np.ndarray:
    """Prefix-set term of the q=1 corner for the POD family: at v = [1:k],

        S(k) = sum_s x^s (k!/(k-s)!)^beta1 e_s(c/1^beta2, ..., c/k^beta2),

    a lower bound on the corner constant since it is one entry of the max.
    The DP tracks the combined terms h_s (factorials and elementary
    symmetric polynomials together, so neither over- nor underflows on its
    own): adding coordinate k maps

        h_s -> (k/(k-s))^beta1 h_s + x (c/k^beta2) k^beta1 h_{s-1}.

    O(d_max^2) scalar work total.
    """
    d_max = max(d_list)
    h = np.zeros(d_max + 1)
    h[0] = 1.0
    want = set(int(d) for d in d_list)
    out = {}
    for k in range(1, d_max + 1):
        a = x * c / k ** beta2
        s = np.arange(1, k, dtype=float)
        grow = (k / (k - s)) ** beta1
        shift = a * float(k) ** beta1
        h[k] = shift * h[k - 1]
        h[1:k] = grow * h[1:k] + shift * h[0:k - 1]
        if k in want:
            val = float(h[:k + 1].sum())
            if not math.isfinite(val):
                raise CapacityError(
                    f"pod prefix sum overflows at d={k}; reduce d_max")
            out[k] = val
    return np.array([out[int(d)] for d in d_list])


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

def _loglog_fit(ds: np.ndarray, vals: np.ndarray) -> GrowthFit:
    mask = vals > 0
    x = np.log(ds[mask])
    y = np.log(vals[mask])
    if len(x) < 2:
        return GrowthFit(0.0, float(y[0]) if len(y) else 0.0, 0.0)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return GrowthFit(float(slope), float(intercept),
                     float(np.sqrt(np.mean(resid ** 2))))


def classify_series(ds: np.ndarray, vals: np.ndarray
                    ) -> tuple[str, float | None, float | None, GrowthFit]:
    """(classification, tau_hat, cap, fit) for a sampled bound series.

    Rules: bounded tail (relative increase under 1e-6 across the last
    decade of d) gives "uniform"; diverging window slopes give
    "superpolynomial"; a clean log-log fit with positive slope gives
    "polynomial" with tau_hat the slope; otherwise "inconclusive".
    """
    ds = np.asarray(ds, dtype=float)
    vals = np.asarray(vals, dtype=float)
    order = np.argsort(ds)
    ds, vals = ds[order], vals[order]

    half = len(ds) // 2
    fit = _loglog_fit(ds[half:], vals[half:])

    d_end = ds[-1]
    start_idx = np.searchsorted(ds, d_end / 10.0, side="right") - 1
    if start_idx >= 0 and ds[start_idx] < d_end and vals[start_idx] > 0:
        rel = (vals[-1] - vals[start_idx]) / vals[start_idx]
        if rel < UNIFORM_SLACK:
            return "uniform", None, float(vals.max()), fit

    if len(ds) >= 8:
        quarter = (len(ds) + half) // 2
        early = _loglog_fit(ds[half:quarter + 1], vals[half:quarter + 1])
        late = _loglog_fit(ds[quarter:], vals[quarter:])
        if late.slope > early.slope + SLOPE_DIVERGENCE:
            return "superpolynomial", None, None, fit

    if fit.residual < FIT_RESIDUAL_MAX and fit.slope > FIT_SLOPE_MIN:
        return "polynomial", max(fit.slope, 0.0), None, fit

    return "inconclusive", None, None, fit


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def _corner_series(kind: str, params: dict, x: float, q: float,
                   d_list) -> np.ndarray:
    if kind == "product":
        gamma_fn = params.get("gamma")
        if gamma_fn is None:
            gamma_fn = NAMED_SEQUENCES[params["seq"]]
        return product_corner_series(gamma_fn, d_list, x)
    if kind == "finite-order":
        vals = _map_parallel(
            lambda d: finite_order_corner(d, float(params["omega"]),
                                          int(params["r"]), x, q), d_list)
        return np.array(vals, dtype=float)
    if kind == "finite-diameter":
        vals = _map_parallel(
            lambda d: finite_diameter_corner(d, float(params["omega"]),
                                             int(params["r"]), x, q), d_list)
        return np.array(vals, dtype=float)
    if kind == "dimension-dependent":
        return np.array([dimension_dependent_corner(d, x) for d in d_list])
    raise UsageError(f"no closed-form corner series for kind '{kind}'")


def sweep(kind: str, params: dict, metrics: DensityMetrics,
          pq: NormIndexPair, d_list) -> GrowthReport:
    """Sample the equivalence constant (or its bracket) over dimensions.

    Structured families use polynomial-cost per-d formulas; kind "custom"
    takes params["make"]: d -> WeightFamily and brackets each d directly
    (capped at the lattice limit).
    """
    d_list = sorted(set(int(d) for d in d_list))
    if not d_list or d_list[0] < 1:
        raise UsageError("d_list must contain positive dimensions")
    desc = _describe(kind, params)

    if kind == "custom":
        if d_list[-1] > LATTICE_MAX_D:
            raise CapacityError(
                f"custom sweeps need max d <= {LATTICE_MAX_D}")
        def one(d):
            res = embedding_norm(params["make"](d), metrics, pq)
            return GrowthSample(d, float(res.lower), float(res.upper),
                                None if res.exact is None
                                else float(res.exact))
        samples = tuple(_map_parallel(one, d_list))
    elif kind == "pod":
        samples = tuple(_pod_sweep(params, metrics, pq, d_list))
    elif pq.is_corner:
        x = float(_corner_param(metrics.m, metrics.kappa, pq.p))
        vals = _corner_series(kind, params, x, pq.q, d_list)
        samples = tuple(GrowthSample(d, float(v), float(v), float(v))
                        for d, v in zip(d_list, vals))
    else:
        samples = tuple(_bracket_sweep(kind, params, metrics, pq, d_list))

    ds = np.array([s.d for s in samples], dtype=float)
    vals = np.array([s.exact if s.exact is not None else s.lower
                     for s in samples], dtype=float)
    label, tau_hat, cap, fit = classify_series(ds, vals)
    return GrowthReport(family_desc=desc, pq=pq, samples=samples,
                        classification=label, tau_hat=tau_hat, cap=cap,
                        fit=fit)


def _describe(kind: str, params: dict) -> str:
    if kind == "product":
        return f"product({params.get('seq', 'custom sequence')})"
    if kind == "pod":
        return (f"pod(beta1={params['beta1']}, beta2={params['beta2']}, "
                f"c={params['c']})")
    if kind in ("finite-order", "finite-diameter"):
        return f"{kind}(omega={params['omega']}, r={params['r']})"
    if kind == "dimension-dependent":
        return "dimension-dependent"
    if kind == "custom":
        return params.get("desc", "custom")
    raise UsageError(f"unknown sweep kind '{kind}'; expected one of "
                     f"{SWEEP_KINDS}")


def _pod_sweep(params, metrics, pq, d_list):
    if (pq.q != 1 or pq.p not in (1, INF)) and d_list[-1] > LATTICE_MAX_D:
        raise CapacityError(
            "pod sweeps beyond the lattice limit support only the corner "
            "index pairs with q = 1 (prefix-set lower bound)")
    x = float(_corner_param(metrics.m, metrics.kappa, pq.p))
    b1 = float(params["beta1"])
    b2 = float(params["beta2"])
    c = float(params["c"])
    lows = pod_prefix_sum(d_list, b1, b2, c, x)
    out = []
    for d, low in zip(d_list, lows):
        if d <= LATTICE_MAX_D and pq.is_corner:
            w = PODWeights(d, b1, b2, c)
            res = embedding_norm(w, metrics, pq)
            out.append(GrowthSample(d, float(low), float(res.upper),
                                    float(res.exact)))
        else:
            out.append(GrowthSample(d, float(low), None, None))
    return out


def _bracket_sweep(kind, params, metrics, pq, d_list):
    B = metrics.b(pq.p)
    if not math.isfinite(B):
        raise CapacityError(
            f"tail-ratio norm B_p diverges at p={pq.p}; no finite bracket")

    def make(d):
        if kind == "finite-order":
            return FiniteOrderWeights(d, float(params["omega"]),
                                      int(params["r"]))
        if kind == "finite-diameter":
            return FiniteDiameterWeights(d, float(params["omega"]),
                                         int(params["r"]))
        if kind == "dimension-dependent":
            return DimensionDependentWeights(d)
        raise UsageError(
            f"kind '{kind}' has no off-corner sweep path; use corner "
            "index pairs or a custom sweep")

    def one(d):
        low = layer_lower_bound(kind, params, d, B, pq.q)
        up = float(interpolation_upper(make(d), metrics.m, metrics.kappa,
                                       pq))
        return GrowthSample(d, low, up, None)

    return _map_parallel(one, d_list)


# ---------------------------------------------------------------------------
# Exponent checks from the layer lower bound
# ---------------------------------------------------------------------------

def layer_lower_bound(kind: str, params: dict, d: int, B: float,
                      q: float) -> float:
    """Lower bound from the indicator coefficient vector on one layer.

    Finite order: the |u| = r layer feeds the empty set, giving
    (omega*B)^r * binom(d, r)^(1-1/q).  Finite diameter: the full windows
    of r+1 consecutive coordinates give (omega*B)^(r+1) * (d-r)^(1-1/q).
    """
    iq = 0.0 if q == INF else 1.0 / q
    omega = float(params["omega"])
    r = int(params["r"])
    if kind == "finite-order":
        rr = min(r, d)
        return (omega * B) ** rr * math.comb(d, rr) ** (1.0 - iq)
    if kind == "finite-diameter":
        if d <= r:
            return (omega * B) ** d
        return (omega * B) ** (r + 1) * (d - r) ** (1.0 - iq)
    raise UsageError(
        f"layer lower bound defined for finite-order and finite-diameter "
        f"families, not '{kind}'")


def exponent_check(kind: str, pq: NormIndexPair, params: dict, d_range,
                   B: float = 1.0) -> tuple[float, float]:
    """(tau_hat, tau_theory) for the polynomial growth exponent.

    tau_hat is fitted on the layer lower bound over the upper half of
    d_range; tau_theory is r*(1-1/q) for finite order and 1-1/q for
    finite diameter.
    """
    if kind not in ("finite-order", "finite-diameter"):
        raise UsageError("exponent check covers finite-order and "
                         "finite-diameter families only")
    d_list = sorted(set(int(d) for d in d_range))
    if len(d_list) < 2:
        raise UsageError("exponent check needs at least two dimensions")
    iq = 0.0 if pq.q == INF else 1.0 / pq.q
    r = int(params["r"])
    tau_theory = r * (1.0 - iq) if kind == "finite-order" else 1.0 - iq
    ds = np.array(d_list, dtype=float)
    vals = np.array([layer_lower_bound(kind, params, d, B, pq.q)
                     for d in d_list])
    half = len(ds) // 2
    fit = _loglog_fit(ds[half:], vals[half:])
    return fit.slope, tau_theory
