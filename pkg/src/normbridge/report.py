"""Canonical result emission: JSON and CSV.

Identical inputs must yield byte-identical output, so everything funnels
through one serializer: keys sorted, floats at 17 significant digits,
exact rationals as quoted fraction strings with a "mode" marker set by the
caller.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import UsageError

FLOAT_FMT = "%.17g"


def format_number(x) -> str:
    """Canonical token for one scalar (JSON fragment)."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Fraction):
        return f'"{x.numerator}/{x.denominator}"'
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return FLOAT_FMT % x
    raise UsageError(f"cannot serialize {type(x).__name__} as a number")


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch in ('"', "\\"):
            out.append("\\" + ch)
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def dumps(obj) -> str:
    """Canonical JSON: sorted object keys, fixed float formatting."""
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return f'"{_escape(obj)}"'
    if isinstance(obj, (bool, int, float, Fraction)):
        return format_number(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        body = ",".join(f'"{_escape(str(k))}":{dumps(v)}' for k, v in items)
        return "{" + body + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    raise UsageError(f"cannot serialize {type(obj).__name__}")


def mode_of(*values) -> str:
    """"exact" when every value participates in rational arithmetic."""
    return "exact" if all(isinstance(v, (int, Fraction)) for v in values) \
        else "float"


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return FLOAT_FMT % float(x)


def growth_csv(report) -> str:
    """Growth series as `d,lower,upper,exact` lines."""
    lines = ["d,lower,upper,exact"]
    for s in report.samples:
        lines.append(",".join(
            [str(s.d), _csv_cell(s.lower), _csv_cell(s.upper),
             _csv_cell(s.exact)]))
    return "\n".join(lines) + "\n"


def growth_json(report) -> dict:
    fit = report.fit
    return {
        "family": report.family_desc,
        "p": report.pq.p,
        "q": report.pq.q,
        "classification": report.classification,
        "tau_hat": report.tau_hat,
        "cap": report.cap,
        "fit": None if fit is None else {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "residual": fit.residual,
        },
        "samples": [
            {"d": s.d, "lower": s.lower, "upper": s.upper, "exact": s.exact}
            for s in report.samples
        ],
    }
