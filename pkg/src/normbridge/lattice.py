"""Bitmask subset-lattice primitives.

Subsets u of {1,...,d} are encoded as d-bit masks: bit j-1 set means j in u.
All transforms here are generic over the scalar type, so they work with
floats as well as exact fractions.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def popcount(mask: int) -> int:
    return mask.bit_count()


def full_mask(d: int) -> int:
    return (1 << d) - 1


def submasks(mask: int):
    """Yield every subset of `mask`, including 0 and `mask` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def mask_to_set(mask: int) -> frozenset[int]:
    """Decode a mask into the corresponding 1-based index set."""
    out = []
    j = 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return frozenset(out)


def set_to_mask(subset) -> int:
    mask = 0
    for j in subset:
        mask |= 1 << (j - 1)
    return mask


def diameter(mask: int) -> int:
    """max(i) - min(j) over elements of the subset; 0 for the empty set."""
    if mask == 0:
        return 0
    return mask.bit_length() - 1 - (mask & -mask).bit_length() + 1


def superset_weighted_sum(values: list, d: int, x) -> list:
    """Return s with s[u] = sum over v >= u (as sets) of values[v] * x^|v\\u|.

    In-place butterfly over the 2^d lattice, O(d * 2^d) scalar operations.
    """
    out = list(values)
    for j in range(d):
        bit = 1 << j
        for mask in range(1 << d):
            if not mask & bit:
                out[mask] = out[mask] + x * out[mask | bit]
    return out


def subset_weighted_sum(values: list, d: int, x) -> list:
    """Return s with s[v] = sum over u <= v (as sets) of values[u] * x^|v\\u|."""
    out = list(values)
    for j in range(d):
        bit = 1 << j
        for mask in range(1 << d):
            if mask & bit:
                out[mask] = out[mask] + x * out[mask ^ bit]
    return out


def is_rational(x) -> bool:
    """True when x participates in exact arithmetic (int or Fraction)."""
    return isinstance(x, Rational)


def all_rational(*xs) -> bool:
    return all(is_rational(x) for x in xs)


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)
