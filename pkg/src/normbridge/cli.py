"""Command-line driver.

Subcommands: density (scalar metrics and integrability checks), constants
(equivalence-constant brackets for a weight family), growth (dimension
sweeps with CSV series and optional figure), witness (extremal ratio
tables).  Exit codes: 0 ok, 2 usage, 3 model infeasibility, 4 capacity.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import report
from .constants import NormIndexPair, corner_constant, embedding_norm
from .decomp import witness_ratio
from .density import (INF, BetaLike, Density, ExpType, ParetoLike,
                      TabulatedDensity, Uniform)
from .errors import (CapacityError, DomainError, InfeasibleError,
                     MembershipError, NormBridgeError, UsageError)
from .growth import NAMED_SEQUENCES, log_dims, sweep
from .oracle import BRUTE_MAX_D, SCAN_MAX_D, bruteforce_corner, ratio_scan
from .weights import family_from_file

EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_CAPACITY = 4

DENSITY_CHOICES = ("uniform", "beta", "pareto", "exp", "csv")


def parse_index(text: str) -> float:
    """p/q value from the command line: 'inf', a float, or 'a/b'."""
    text = text.strip().lower()
    if text in ("inf", "infinity", "oo"):
        return INF
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse index {text!r}")


def _add_density_flags(parser: argparse.ArgumentParser, flag: str):
    parser.add_argument(flag, default="uniform", choices=DENSITY_CHOICES,
                        help="density family")
    parser.add_argument("--alpha", type=float, default=None,
                        help="shape for beta/pareto families")
    parser.add_argument("--a", type=float, default=None,
                        help="exponent rate shape for the exp family")
    parser.add_argument("--b", type=float, default=None,
                        help="rate for the exp family")
    parser.add_argument("--open-end", action="store_true",
                        help="use the half-open domain variant (beta)")
    parser.add_argument("--density-file", default=None,
                        help="CSV with t,psi columns (family csv)")


def build_density(kind: str, args) -> Density:
    if kind == "uniform":
        return Uniform()
    if kind == "beta":
        if args.alpha is None:
            raise UsageError("beta density needs --alpha")
        return BetaLike(args.alpha, closed_end=not args.open_end)
    if kind == "pareto":
        if args.alpha is None:
            raise UsageError("pareto density needs --alpha")
        return ParetoLike(args.alpha)
    if kind == "exp":
        if args.a is None or args.b is None:
            raise UsageError("exp density needs --a and --b")
        return ExpType(args.a, args.b)
    if kind == "csv":
        if args.density_file is None:
            raise UsageError("csv density needs --density-file")
        return TabulatedDensity.from_csv(args.density_file)
    raise UsageError(f"unknown density family {kind!r}")


def _emit(obj) -> None:
    sys.stdout.write(report.dumps(obj) + "\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_density(args) -> int:
    density = build_density(args.family, args)
    p = parse_index(args.p)
    cond = density.check_conditions(p)
    out = {
        "family": repr(density),
        "p": p,
        "m": density.mean_m(),
        "kappa": density.kappa(),
        "B_p": density.b_p(p),
        "eq1": cond.eq1_holds,
        "eq2": cond.eq2_holds,
        "reason": cond.reason,
        "mode": "float",
    }
    _emit(out)
    return 0


def cmd_constants(args) -> int:
    w = family_from_file(args.weights_file)
    density = build_density(args.density, args)
    pq = NormIndexPair(parse_index(args.p), parse_index(args.q))
    exact_mk = density.exact_metrics()
    rational_w = all(isinstance(w.gamma(u), (int, Fraction))
                     for u in w.support_masks()) \
        if w.d <= 20 else False

    out = {"d": w.d, "kind": w.kind, "p": pq.p, "q": pq.q}
    if pq.is_corner and exact_mk is not None and rational_w:
        m, kappa = exact_mk
        value = corner_constant(w, m, kappa, pq.p, pq.q)
        out.update({"exact": value, "lower": value, "upper": value,
                    "mode": report.mode_of(value),
                    "method_notes": "corner: exact rational value"})
        if args.verify and w.d <= BRUTE_MAX_D:
            oracle_val = bruteforce_corner(w, m, kappa, pq.p, pq.q)
            out["oracle"] = oracle_val
            out["oracle_agrees"] = oracle_val == value
    else:
        res = embedding_norm(w, density.metrics(), pq, seed=args.seed)
        out.update({"exact": res.exact, "lower": res.lower,
                    "upper": res.upper, "mode": "float",
                    "method_notes": res.method_notes})
        if args.verify:
            if pq.is_corner and w.d <= BRUTE_MAX_D:
                met = density.metrics()
                oracle_val = bruteforce_corner(w, met.m, met.kappa,
                                               pq.p, pq.q)
                out["oracle"] = float(oracle_val)
                out["oracle_agrees"] = bool(
                    abs(float(oracle_val) - float(res.exact))
                    <= 1e-10 * max(1.0, abs(float(res.exact))))
            elif w.d <= SCAN_MAX_D:
                scan = ratio_scan(w, density, pq, trials=args.trials,
                                  seed=args.seed)
                out["scan_lower"] = scan
                out["scan_below_upper"] = bool(scan <= float(res.upper)
                                               * (1 + 1e-12))
    _emit(out)
    return 0


def cmd_growth(args) -> int:
    density = build_density(args.density, args)
    pq = NormIndexPair(parse_index(args.p), parse_index(args.q))
    params = {}
    if args.family == "product":
        if args.gamma_seq not in NAMED_SEQUENCES:
            raise UsageError(
                f"--gamma-seq must be one of {sorted(NAMED_SEQUENCES)}")
        params["seq"] = args.gamma_seq
    elif args.family == "pod":
        for name in ("beta1", "beta2", "c"):
            val = getattr(args, name)
            if val is None:
                raise UsageError(f"pod sweep needs --{name}")
            params[name] = val
    elif args.family in ("finite-order", "finite-diameter"):
        if args.omega is None or args.r is None:
            raise UsageError(f"{args.family} sweep needs --omega and --r")
        params["omega"] = args.omega
        params["r"] = args.r
    d_list = log_dims(args.d_max, args.per_decade)
    rep = sweep(args.family, params, density.metrics(), pq, d_list)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(report.growth_csv(rep))
    if args.plot:
        from .plots import growth_plot
        growth_plot(rep, args.plot)
    out = report.growth_json(rep)
    out["mode"] = "float"
    if args.out:
        out["csv"] = args.out
    if args.plot:
        out["figure"] = args.plot
    _emit(out)
    return 0


def cmd_witness(args) -> int:
    w = family_from_file(args.weights_file)
    density = build_density(args.density, args)
    case = args.case
    pq = {"11": (1, 1), "1inf": (1, INF), "inf1": (INF, 1),
          "infinf": (INF, INF)}.get(case)
    if pq is None:
        raise UsageError("case must be one of 11, 1inf, inf1, infinf")
    try:
        ns = [int(x) for x in args.n.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--n must be a comma list of integers, got "
                         f"{args.n!r}")
    if not ns or min(ns) < 1:
        raise UsageError("--n entries must be >= 1")

    exact_mk = density.exact_metrics()
    if exact_mk is not None:
        m, kappa = exact_mk
    else:
        met = density.metrics()
        m, kappa = met.m, met.kappa
    target = corner_constant(w, m, kappa, *pq)
    rows = []
    for n in ns:
        ratio = witness_ratio(case, w, density, n)
        rows.append({"n": n, "ratio": float(ratio),
                     "target": float(target),
                     "gap": float(target) - float(ratio)})
    _emit({"case": case, "p": pq[0], "q": pq[1],
           "target": float(target), "rows": rows, "mode": "float"})
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normbridge",
        description="equivalence constants between weighted anchored and "
                    "ANOVA function-space norms")
    sub = parser.add_subparsers(dest="command", required=True)

    p_den = sub.add_parser("density", help="density metrics and "
                                           "integrability conditions")
    _add_density_flags(p_den, "--family")
    p_den.add_argument("--p", required=True, help="integrability index")
    p_den.set_defaults(func=cmd_density)

    p_con = sub.add_parser("constants", help="equivalence constant for a "
                                             "weight family")
    p_con.add_argument("--weights-file", required=True,
                       help="JSON weight-family config")
    _add_density_flags(p_con, "--density")
    p_con.add_argument("--p", required=True)
    p_con.add_argument("--q", required=True)
    p_con.add_argument("--verify", action="store_true",
                       help="add independent oracle cross-checks")
    p_con.add_argument("--seed", type=int, default=0)
    p_con.add_argument("--trials", type=int, default=2000)
    p_con.set_defaults(func=cmd_constants)

    p_gro = sub.add_parser("growth", help="dimension sweep and growth "
                                          "classification")
    p_gro.add_argument("--family", required=True,
                       choices=("product", "pod", "finite-order",
                                "finite-diameter", "dimension-dependent"))
    _add_density_flags(p_gro, "--density")
    p_gro.add_argument("--p", required=True)
    p_gro.add_argument("--q", required=True)
    p_gro.add_argument("--d-max", type=int, required=True)
    p_gro.add_argument("--per-decade", type=int, default=8)
    p_gro.add_argument("--omega", type=float, default=None)
    p_gro.add_argument("--r", type=int, default=None)
    p_gro.add_argument("--beta1", type=float, default=None)
    p_gro.add_argument("--beta2", type=float, default=None)
    p_gro.add_argument("--c", type=float, default=None)
    p_gro.add_argument("--gamma-seq", default="2^-j",
                       help="named product sequence: 2^-j, 1/j, 1/j^2")
    p_gro.add_argument("--out", default=None, help="CSV output path")
    p_gro.add_argument("--plot", default=None,
                       help="render the series to this image file")
    p_gro.set_defaults(func=cmd_growth)

    p_wit = sub.add_parser("witness", help="extremal witness ratio table")
    p_wit.add_argument("--case", required=True)
    p_wit.add_argument("--n", default="1",
                       help="comma list of witness steps")
    p_wit.add_argument("--weights-file", required=True)
    _add_density_flags(p_wit, "--density")
    p_wit.set_defaults(func=cmd_witness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleError, MembershipError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except NormBridgeError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
