"""Command line front end: JSON instance files in, JSON results out.

Exit codes: 0 success, 2 invalid input, 3 precision exhausted or a tie
within precision, 4 unsupported class.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Any, List, Optional

from gmpy2 import mpfr

from . import errors
from .core import Fewnomial, log_condition_number, make_fewnomial
from .expr import format_scalar, parse_scalar
from .precision import CertifiedValue, PrecisionBudget, digits_for, fmt, to_mpfr

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_PRECISION = 3
EXIT_UNSUPPORTED = 4


# ------------------------------------------------------------------ instances


def instance_from_json(data: Any, bits: int = 256) -> Fewnomial:
    """Build a Fewnomial from {"n": int, "terms": [{"coeff": str, "exponents": [str, ...]}]}."""
    if not isinstance(data, dict) or "n" not in data or "terms" not in data:
        raise errors.DimensionMismatchError('instance needs "n" and "terms"')
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise errors.DimensionMismatchError('"n" must be an integer')
    terms = []
    for k, t in enumerate(data["terms"]):
        if not isinstance(t, dict) or "coeff" not in t or "exponents" not in t:
            raise errors.ParseError(f'term {k} needs "coeff" and "exponents"', 0)
        terms.append((_scalar(t["coeff"], bits), [_scalar(x, bits) for x in t["exponents"]]))
    return make_fewnomial(n, terms, bits=bits)


def _scalar(x, bits):
    if isinstance(x, bool):
        raise errors.ParseError("booleans are not scalars", 0)
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # binary floats would silently change the instance with the precision
        raise errors.ParseError(f"scalar {x!r} must be written as a string", 0)
    return parse_scalar(x, bits)


def instance_to_json(f: Fewnomial) -> dict:
    """Decimal-string form of f; reparsing gives an identical Fewnomial."""
    if f.exact is not None:
        terms = [{"coeff": format_scalar(c), "exponents": [format_scalar(x) for x in a]} for c, a in f.exact]
    else:
        terms = [{"coeff": format_scalar(c), "exponents": [format_scalar(x) for x in a]} for c, a in f.terms]
    return {"n": f.n, "terms": terms}


def load_instance(path: str, bits: int = 256) -> Fewnomial:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise errors.ParseError(f"invalid JSON: {e.msg}", e.pos) from None
    return instance_from_json(data, bits)


# ------------------------------------------------------------------ output


def _num(x, bits: int = 256) -> Optional[str]:
    if x is None:
        return None
    if isinstance(x, (int, Fraction)):
        return str(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    x = x if isinstance(x, type(mpfr(0))) else to_mpfr(x)
    if x.is_infinite():
        return "inf" if x > 0 else "-inf"
    return fmt(x, digits_for(max(bits, x.precision)))


def _certified(v: Optional[CertifiedValue], bits: int) -> Optional[dict]:
    if v is None:
        return None
    return {"value": _num(v.value, bits), "error_radius": _num(v.error_radius, 64), "lo": _num(v.lo, bits), "hi": _num(v.hi, bits)}


def _sup_json(res, bits) -> dict:
    out = {
        "outcome": {"UNBOUNDED": "unbounded", "BOUNDED": "bounded", "CONSTANT_AT_BOUNDARY": "constant_at_boundary"}[res.outcome.name],
        "case": res.case.value,
        "supremum": _num(res.supremum, bits),
        "certified_relative_error": _num(res.certified_relative_error, 64),
        "precision_bits": res.bits,
    }
    if res.lambda_star is not None:
        out["lambda_star"] = _num(res.lambda_star, bits)
        out["error_radius"] = _num(res.error_radius, 64)
    if res.value is not None:
        out["value"] = _num(res.value, bits)
    if res.witness is not None:
        out["witness"] = {
            "curve": "x(t) = base_point * t^direction",
            "direction": [_num(x, bits) for x in res.witness.direction],
            "base_point": [_num(x, bits) for x in res.witness.base_point],
        }
    if res.maximizer is not None:
        out["maximizer"] = {
            "coords": [_num(x, bits) for x in res.maximizer.coords],
            "orbit_dim": res.maximizer.orbit_dim,
            "attained": res.maximizer.attained,
        }
    if res.approach is not None:
        out["approach_direction"] = [_num(x, bits) for x in res.approach]
    return out


# ------------------------------------------------------------------ commands


def cmd_sup(args, budget) -> tuple:
    from .supremum import supremum

    f = load_instance(args.file, budget.mantissa)
    res = supremum(f, args.eps, budget.with_eps(args.eps))
    return EXIT_OK, {"command": "sup", **_sup_json(res, budget.mantissa)}


def cmd_decide(args, budget) -> tuple:
    from .supremum import Decision, sup_decide

    f = load_instance(args.file, budget.mantissa)
    lam = _scalar(args.lam, budget.mantissa)
    rep = sup_decide(f, lam, budget)
    out = {
        "command": "decide",
        "lambda": _num(lam, budget.mantissa),
        "verdict": rep.verdict.value,
        "margin": _certified(rep.margin, rep.bits),
        "precision_bits": rep.bits,
    }
    if rep.note:
        out["note"] = rep.note
    if rep.result is not None:
        out["supremum"] = _sup_json(rep.result, budget.mantissa)
    code = EXIT_PRECISION if rep.verdict is Decision.EQUAL_WITHIN_PRECISION else EXIT_OK
    return code, out


def cmd_roots(args, budget) -> tuple:
    from .univariate import binomial_root, root_bound, trinomial_roots

    f = load_instance(args.file, budget.mantissa)
    if f.n != 1 or f.m not in (2, 3):
        raise errors.NotInClassError("roots handles univariate binomials and trinomials")
    if f.m == 2:
        r = binomial_root(f)
        roots = [] if r is None else [{"value": _num(r), "multiplicity": 1, "certified_relative_error": "0"}]
        return EXIT_OK, {"command": "roots", "count": len(roots), "roots": roots}
    rep = trinomial_roots(f, args.eps, budget.with_eps(args.eps))
    lo, hi = root_bound(f)
    return EXIT_OK, {
        "command": "roots",
        "count": rep.count,
        "roots": [
            {
                "value": _num(r.value),
                "multiplicity": r.multiplicity,
                "certified_relative_error": _num(r.certified_relative_error, 64),
                "enclosure": [_num(r.lo), _num(r.hi)],
                "residual": _num(r.residual, 64),
                "residual_threshold": _num(r.threshold, 64),
            }
            for r in rep.roots
        ],
        "root_bound": [_num(lo), _num(hi)],
        "newton_steps": rep.newton_steps,
        "bisection_steps": rep.bisection_steps,
        "precision_bits": rep.bits,
    }


def cmd_condition(args, budget) -> tuple:
    f = load_instance(args.file, budget.mantissa)
    rep = log_condition_number(f, args.subset_budget, budget)
    out = {
        "command": "condition",
        "log_condition": _num(rep.log_condition, budget.mantissa),
        "minors": [{"subset": [j + 1 for j in J], "beta": _num(b, budget.mantissa)} for J, b in rep.minors.items()],
        "sparse_size_bits": rep.sparse_size_bits,
        "precision_bits": budget.mantissa,
    }
    if f.n == 1 and f.m >= 2:
        from .univariate import root_bound

        lo, hi = root_bound(f)
        out["root_bound"] = [_num(lo), _num(hi)]
    return EXIT_OK, out


def cmd_canon(args, budget) -> tuple:
    from .transform import canonicalize_simplex

    f = load_instance(args.file, budget.mantissa)
    cf = canonicalize_simplex(f, budget)
    return EXIT_OK, {
        "command": "canon",
        "c": _num(cf.c, budget.mantissa),
        "ell": cf.ell,
        "n": f.n,
        "form": "c + y_1 + ... + y_ell - y_(ell+1) - ... - y_n",
        "transform": [[_num(x, budget.mantissa) for x in row] for row in cf.transform.matrix],
        "scaling": [_num(x, budget.mantissa) for x in cf.scaling],
        "permutation": [i + 1 for i in cf.permutation],
    }


def cmd_reduce(args, budget) -> tuple:
    from .harness import make_hardness_instance

    f = load_instance(args.file, budget.mantissa)
    delta = Fraction(args.delta)
    inst = make_hardness_instance(f, delta, args.cap_m, args.mode)
    return EXIT_OK, {
        "command": "reduce",
        "M": inst.M,
        "provenance": inst.provenance,
        "instance": instance_to_json(inst.F),
    }


def cmd_oracle(args, budget) -> tuple:
    from .harness import grid_report

    f = load_instance(args.file, budget.mantissa)
    try:
        lo, hi = (float(x) for x in args.range.split(","))
    except ValueError:
        raise errors.ParseError("--range must be LO,HI", 0) from None
    if not lo < hi:
        raise errors.ParseError("--range needs LO < HI", 0)
    rep = grid_report(f, (lo, hi), args.grid, args.rounds)
    return EXIT_OK, {
        "command": "oracle",
        "value": _num(rep.value),
        "log10_argmax": None if rep.log10_argmax is None else [_num(x) for x in rep.log10_argmax],
        "resolution": _num(rep.resolution),
        "range": [_num(lo), _num(hi)],
        "note": "float64 heuristic, not certified",
    }


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fewopt", description="Certified suprema of sparse fewnomials on the positive orthant.")
    p.add_argument("--bits", type=int, default=None, help="working mantissa (default from FEWOPT_PRECISION_BITS or 256)")
    p.add_argument("--cap", type=int, default=None, help="precision cap (default from FEWOPT_PRECISION_CAP or 8192)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sup", help="supremum of f")
    s.add_argument("file")
    s.add_argument("--eps", type=float, default=1e-12)
    s.set_defaults(func=cmd_sup)

    s = sub.add_parser("decide", help="is sup f >= lambda?")
    s.add_argument("file")
    s.add_argument("--lambda", dest="lam", required=True)
    s.set_defaults(func=cmd_decide)

    s = sub.add_parser("roots", help="positive roots of a univariate trinomial")
    s.add_argument("file")
    s.add_argument("--eps", type=float, default=1e-12)
    s.set_defaults(func=cmd_roots)

    s = sub.add_parser("condition", help="condition number report")
    s.add_argument("file")
    s.add_argument("--subset-budget", type=int, default=None)
    s.set_defaults(func=cmd_condition)

    s = sub.add_parser("canon", help="canonical simplex form")
    s.add_argument("file")
    s.set_defaults(func=cmd_canon)

    s = sub.add_parser("reduce", help="hardness gadget from a quartic")
    s.add_argument("file")
    s.add_argument("--delta", required=True)
    s.add_argument("--cap-m", type=int, default=None)
    s.add_argument("--mode", choices=("direct", "slack", "squared"), default="direct")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("oracle", help="float grid estimate of the supremum")
    s.add_argument("file")
    s.add_argument("--grid", type=int, default=5)
    s.add_argument("--range", default="-6,6")
    s.add_argument("--rounds", type=int, default=200)
    s.set_defaults(func=cmd_oracle)
    return p


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (errors.PrecisionExhaustedError,)):
        return EXIT_PRECISION
    if isinstance(exc, (errors.NotInClassError, errors.SubsetBudgetExceededError)):
        return EXIT_UNSUPPORTED
    return EXIT_INVALID


def run(argv: Optional[List[str]] = None, out=None) -> int:
    """Run one command; prints a JSON object and returns the exit code."""
    out = sys.stdout if out is None else out
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        if e.code == 0:
            return EXIT_OK
        # argparse already wrote the usage message to stderr
        json.dump({"command": None, "error": "UsageError", "message": "invalid command line"}, out, indent=2)
        out.write("\n")
        return EXIT_INVALID
    try:
        budget = PrecisionBudget.from_env()
        if args.bits is not None or args.cap is not None:
            budget = PrecisionBudget(
                args.bits if args.bits is not None else budget.mantissa,
                args.cap if args.cap is not None else max(budget.cap, args.bits or 0),
                budget.target_eps,
            )
        code, payload = args.func(args, budget)
    except (errors.FewoptError, ValueError, OSError, ArithmeticError) as exc:
        code = _exit_code(exc)
        payload = {"command": args.command, "error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, errors.PrecisionExhaustedError):
            payload["precision_bits"] = exc.bits
    json.dump(payload, out, indent=2)
    out.write("\n")
    return code


def main() -> None:
    sys.exit(run())
