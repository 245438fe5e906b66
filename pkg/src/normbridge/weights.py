"""Weight families gamma_{d,u} >= 0 indexed by subsets u of {1,...,d}.

Five structured families plus explicit subset->value maps.  Subsets are
d-bit masks (see lattice.py); SubsetIndex is a thin validated wrapper.
Weights constructed from ints/Fractions stay exact, so downstream constants
can be computed in rational arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapacityError, UsageError
from .lattice import diameter, full_mask, popcount

#: enumeration cutoff for materializing supports
SUPPORT_ENUM_LIMIT = 24


@dataclass(frozen=True)
class SubsetIndex:
    """A subset of {1,...,d} encoded as a d-bit mask."""

    mask: int
    d: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.d:
            raise UsageError(
                f"mask {self.mask} has bits above dimension {self.d}")

    @property
    def cardinality(self) -> int:
        return popcount(self.mask)


def _as_mask(u, d: int) -> int:
    if isinstance(u, SubsetIndex):
        if u.d != d:
            raise UsageError(f"subset dimension {u.d} != family dimension {d}")
        return u.mask
    mask = int(u)
    if mask < 0 or mask >> d:
        raise UsageError(f"mask {mask} invalid for dimension {d}")
    return mask


def _parse_value(v):
    """JSON scalar -> number; strings like '1/2' become exact fractions."""
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, bool):
        raise UsageError("weight values must be numbers")
    if isinstance(v, int):
        return Fraction(v)
    return float(v)


class WeightFamily:
    """Base class; gamma() is the single point of truth for values."""

    kind: str
    d: int

    def gamma(self, u):
        raise NotImplementedError

    def in_support(self, mask: int) -> bool:
        return self.gamma(mask) > 0

    def support_masks(self) -> list[int]:
        """All masks with positive weight; enumerates the lattice."""
        if self.d > SUPPORT_ENUM_LIMIT:
            raise CapacityError(
                f"cannot enumerate support at d={self.d} > "
                f"{SUPPORT_ENUM_LIMIT}")
        return [m for m in range(1 << self.d) if self.in_support(m)]

    def check_monotone(self) -> bool:
        """Downward closure: gamma_w > 0 forces gamma_u > 0 for u subset w."""
        raise NotImplementedError

    def gamma_table(self) -> list:
        """Dense weight table over all 2^d masks (d <= 24)."""
        if self.d > SUPPORT_ENUM_LIMIT:
            raise CapacityError(f"dense table infeasible at d={self.d}")
        return [self.gamma(m) for m in range(1 << self.d)]

    def to_json(self) -> dict:
        raise NotImplementedError


class ExplicitWeights(WeightFamily):
    kind = "explicit"

    def __init__(self, d: int, values: dict):
        self.d = d
        vals = {}
        for mask, v in values.items():
            mask = _as_mask(mask, d)
            if v < 0:
                raise UsageError(f"negative weight at mask {mask}")
            if v > 0:
                vals[mask] = v
        if not vals:
            raise UsageError("weight family has empty support")
        self._values = vals

    def gamma(self, u):
        return self._values.get(_as_mask(u, self.d), 0)

    def support_masks(self):
        return sorted(self._values)

    def check_monotone(self):
        # removing any single element from a supported mask must stay
        # supported; single-bit removals cover the full downward closure
        for mask in self._values:
            rem = mask
            while rem:
                bit = rem & -rem
                if (mask ^ bit) not in self._values:
                    return False
                rem ^= bit
        return True

    def to_json(self):
        return {"kind": self.kind, "d": self.d,
                "values": {str(m): _value_to_json(v)
                           for m, v in sorted(self._values.items())}}


class ProductWeights(WeightFamily):
    kind = "product"

    def __init__(self, gammas):
        gammas = list(gammas)
        if not gammas or any(g <= 0 for g in gammas):
            raise UsageError("product weights need positive per-coordinate "
                             "entries")
        self.gammas = gammas
        self.d = len(gammas)

    def gamma(self, u):
        mask = _as_mask(u, self.d)
        out = 1
        j = 0
        while mask:
            if mask & 1:
                out = out * self.gammas[j]
            mask >>= 1
            j += 1
        return out

    def check_monotone(self):
        return True

    def to_json(self):
        return {"kind": self.kind, "d": self.d,
                "gammas": [_value_to_json(g) for g in self.gammas]}


class PODWeights(WeightFamily):
    """gamma_u = (|u|!)^beta1 * prod_{j in u} c/j^beta2."""

    kind = "pod"

    def __init__(self, d: int, beta1, beta2, c):
        if not (0 < beta1 < beta2):
            raise UsageError("POD weights require 0 < beta1 < beta2")
        if not c > 0:
            raise UsageError("POD weights require c > 0")
        self.d = d
        self.beta1 = beta1
        self.beta2 = beta2
        self.c = c

    def _exact(self) -> bool:
        return (_is_exactable(self.c) and _is_integral(self.beta1)
                and _is_integral(self.beta2))

    def gamma(self, u):
        mask = _as_mask(u, self.d)
        k = popcount(mask)
        if self._exact():
            out = Fraction(math.factorial(k)) ** int(self.beta1)
            c, b2 = Fraction(self.c), int(self.beta2)
            j = 1
            while mask:
                if mask & 1:
                    out *= c / Fraction(j) ** b2
                mask >>= 1
                j += 1
            return out
        out = float(math.factorial(k)) ** float(self.beta1)
        j = 1
        while mask:
            if mask & 1:
                out *= float(self.c) / j ** float(self.beta2)
            mask >>= 1
            j += 1
        return out

    def check_monotone(self):
        return True

    def to_json(self):
        return {"kind": self.kind, "d": self.d,
                "beta1": _value_to_json(self.beta1),
                "beta2": _value_to_json(self.beta2),
                "c": _value_to_json(self.c)}


class FiniteOrderWeights(WeightFamily):
    """gamma_u = omega^|u| for |u| <= r, zero above order r."""

    kind = "finite-order"

    def __init__(self, d: int, omega, r: int):
        if not omega > 0:
            raise UsageError("finite-order weights require omega > 0")
        if r < 1:
            raise UsageError("finite-order weights require r >= 1")
        self.d = d
        self.omega = omega
        self.r = int(r)

    def gamma(self, u):
        k = popcount(_as_mask(u, self.d))
        if k > self.r:
            return 0
        return self.omega ** k

    def in_support(self, mask):
        return popcount(mask) <= self.r

    def check_monotone(self):
        return True

    def to_json(self):
        return {"kind": self.kind, "d": self.d,
                "omega": _value_to_json(self.omega), "r": self.r}


class FiniteDiameterWeights(WeightFamily):
    """gamma_u = omega^|u| for diam(u) <= r, zero for wider subsets."""

    kind = "finite-diameter"

    def __init__(self, d: int, omega, r: int):
        if not omega > 0:
            raise UsageError("finite-diameter weights require omega > 0")
        if r < 0:
            raise UsageError("finite-diameter weights require r >= 0")
        self.d = d
        self.omega = omega
        self.r = int(r)

    def gamma(self, u):
        mask = _as_mask(u, self.d)
        if diameter(mask) > self.r:
            return 0
        return self.omega ** popcount(mask)

    def in_support(self, mask):
        return diameter(mask) <= self.r

    def check_monotone(self):
        # diam only shrinks when elements are removed
        return True

    def to_json(self):
        return {"kind": self.kind, "d": self.d,
                "omega": _value_to_json(self.omega), "r": self.r}


class DimensionDependentWeights(WeightFamily):
    """gamma_{d,u} = d^(-|u|)."""

    kind = "dimension-dependent"

    def __init__(self, d: int):
        if d < 1:
            raise UsageError("dimension must be >= 1")
        self.d = d

    def gamma(self, u):
        k = popcount(_as_mask(u, self.d))
        return Fraction(1, self.d) ** k

    def check_monotone(self):
        return True

    def to_json(self):
        return {"kind": self.kind, "d": self.d}


def _is_exactable(x) -> bool:
    return isinstance(x, (int, Fraction))


def _is_integral(x) -> bool:
    return isinstance(x, (int, Fraction)) and Fraction(x).denominator == 1


def _value_to_json(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return v
    return float(v)


def family_from_json(obj: dict) -> WeightFamily:
    """Build a weight family from its JSON config."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise UsageError("weight config must be an object with a 'kind'")
    kind = obj["kind"]
    try:
        if kind == "explicit":
            values = {int(k): _parse_value(v)
                      for k, v in obj["values"].items()}
            return ExplicitWeights(int(obj["d"]), values)
        if kind == "product":
            return ProductWeights([_parse_value(g) for g in obj["gammas"]])
        if kind == "pod":
            return PODWeights(int(obj["d"]), _parse_value(obj["beta1"]),
                              _parse_value(obj["beta2"]),
                              _parse_value(obj["c"]))
        if kind == "finite-order":
            return FiniteOrderWeights(int(obj["d"]),
                                      _parse_value(obj["omega"]),
                                      int(obj["r"]))
        if kind == "finite-diameter":
            return FiniteDiameterWeights(int(obj["d"]),
                                         _parse_value(obj["omega"]),
                                         int(obj["r"]))
        if kind == "dimension-dependent":
            return DimensionDependentWeights(int(obj["d"]))
    except KeyError as exc:
        raise UsageError(f"weight config for kind '{kind}' is missing "
                         f"field {exc}") from None
    raise UsageError(f"unknown weight family kind '{kind}'")


def family_from_file(path) -> WeightFamily:
    with open(path) as handle:
        return family_from_json(json.load(handle))
