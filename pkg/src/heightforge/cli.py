"""Command-line front end: ``heightforge <command> [options]``.

Exit codes: 0 when the computation succeeds and every check passes, 1 when
a check fails or precision runs out, 2 for malformed or unsupported input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import warnings
from fractions import Fraction

import mpmath

from . import __version__
from .ball import Ball, ComplexBall
from .bounds import TrivialBoundWarning, check_congruence, height_lower_bound, l1_infty, verify_point
from .errors import HeightForgeError, PrecisionExhausted
from .exact import prime_divisors
from .field import FieldElement, NumberField, norm, rational_field
from .functionals import (
    LinearMap,
    univariate_u,
    verify_identity_projective,
    verify_identity_subspace,
)
from .heights import (
    ProjectiveVector,
    mahler_measure,
    mahler_measure_via_heights,
    projective_height_report,
    subspace_height,
    wedge_coordinates,
    weil_height_report,
)
from .parsing import (
    parse_element,
    parse_field,
    parse_homogeneous,
    parse_matrix,
    parse_univariate,
    parse_vector,
)
from .places import PPower, PowerProduct, archimedean_places, finite_places_above, product_formula_check

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


# ----------------------------------------------------------- serialization


def to_json(x):
    if isinstance(x, Ball):
        return {"midpoint": mpmath.nstr(x.mid, 20), "radius": mpmath.nstr(x.rad, 3)}
    if isinstance(x, ComplexBall):
        return {"real": to_json(x.real), "imag": to_json(x.imag)}
    if isinstance(x, PPower):
        if x.is_zero():
            return {"p": x.p, "exponent_num": None, "exponent_den": None, "zero": True}
        return {"p": x.p, "exponent_num": x.exponent.numerator, "exponent_den": x.exponent.denominator}
    if isinstance(x, PowerProduct):
        return {"zero": x.zero, "factors": [to_json(PPower(p, e)) for p, e in x.exponents]}
    if isinstance(x, (Fraction, FieldElement)):
        return str(x)
    if isinstance(x, dict):
        return {str(k): to_json(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_json(v) for v in x]
    return x


def make_report(args, places=None, value=None, verdict="pass", **extra) -> dict:
    request = {k: v for k, v in vars(args).items() if k not in ("func", "json", "command")}
    report = {
        "request": {"command": args.command, **request},
        "places": places or [],
        "global": to_json(value) if value is not None else None,
        "verdict": verdict,
        "version": __version__,
    }
    report.update({k: to_json(v) for k, v in extra.items()})
    return report


def place_rows(rows) -> list[dict]:
    return [{k: to_json(v) for k, v in r.items()} for r in rows]


# -------------------------------------------------------------- helpers


def _field(args) -> NumberField:
    return parse_field(args.field) if args.field else rational_field()


def _vector(text: str, K: NumberField) -> ProjectiveVector:
    return ProjectiveVector(K, tuple(parse_vector(text, K)))


def _basis(text: str, K: NumberField) -> list[ProjectiveVector]:
    return [ProjectiveVector(K, tuple(r)) for r in parse_matrix(text, K)]


def _factor_rows(report) -> list[dict]:
    rows = [{"place": f.place, "value": f.value} for f in report.archimedean]
    rows += [{"place": f.place, "value": f.value} for f in report.finite]
    return rows


# ------------------------------------------------------------- commands


def cmd_height(args):
    if args.field:
        K = _field(args)
        alpha = parse_element(args.alpha, K)
    else:
        alpha = parse_univariate(args.alpha)
    rep = weil_height_report(alpha, args.tol)
    return make_report(args, place_rows(_factor_rows(rep)), rep.value)


def cmd_mahler(args):
    f = parse_univariate(args.poly)
    mu = mahler_measure(f, args.tol)
    extra = {}
    verdict = "pass"
    if args.cross_check:
        other = mahler_measure_via_heights(f, args.tol)
        extra["via_heights"] = to_json(other)
        verdict = "pass" if mu.overlaps(other) else "fail"
    return make_report(args, [], mu, verdict, **extra)


def cmd_proj_height(args):
    K = _field(args)
    rep = projective_height_report(_vector(args.point, K), args.tol)
    return make_report(args, place_rows(_factor_rows(rep)), rep.value)


def cmd_subspace_height(args):
    K = _field(args)
    basis = _basis(args.basis, K)
    w = wedge_coordinates(basis)
    H = subspace_height(basis, args.tol)
    return make_report(args, [], H, wedge={"".join(map(str, I)): c for I, c in w.coords.items()})


def cmd_places(args):
    K = _field(args)
    rows = []
    for v in archimedean_places(K):
        rows.append({"place": v.id, "d_v": v.local_degree, "real": v.is_real, "root": v.base_root})
    primes = [int(p) for p in args.primes.split(",")] if args.primes else sorted(prime_divisors(K.discriminant))
    for p in primes:
        for v in finite_places_above(K, p):
            rows.append(
                {
                    "place": v.id,
                    "d_v": v.local_degree,
                    "e": v.ramification_e,
                    "f": v.residue_f,
                    "residue_factor": v.residue_factor.to_str("x"),
                    "local_factor": v.local_factor().to_str("x"),
                }
            )
    return make_report(args, place_rows(rows), None, discriminant=str(K.discriminant))


def _identity_rows(rep) -> list[dict]:
    return place_rows(
        {"place": r["place"], "H_v": r["H_v"], "U_v": r["U_v"], "local": r["T_v"]} for r in rep.rows
    )


def cmd_verify_projective(args):
    K = _field(args)
    a = _vector(args.point, K)
    T = parse_homogeneous(args.poly, len(a), args.deg, K)
    rep = verify_identity_projective(a, T, args.tol)
    return make_report(
        args,
        _identity_rows(rep),
        rep.value,
        "pass" if rep.passed else "fail",
        H=to_json(rep.height),
        U=to_json(rep.u),
        exponent=rep.exponent,
    )


def cmd_verify_subspace(args):
    K = _field(args)
    basis = _basis(args.basis, K)
    Psi = LinearMap(K, tuple(tuple(r) for r in parse_matrix(args.map, K)))
    rep = verify_identity_subspace(basis, Psi, args.tol)
    return make_report(
        args, _identity_rows(rep), rep.value, "pass" if rep.passed else "fail", H=to_json(rep.height), U=to_json(rep.u)
    )


def cmd_verify_univariate(args):
    K = _field(args)
    alpha = parse_element(args.alpha, K)
    T = parse_univariate(args.poly)
    rep = univariate_u(alpha, T, args.N, args.tol)
    return make_report(
        args,
        place_rows(rep.rows),
        rep.identity_value,
        "pass" if rep.passed else "fail",
        U=to_json(rep.u),
        h=to_json(rep.height),
        N=rep.N,
        observed_exponent=to_json(rep.observed_exponent),
    )


def cmd_bound(args):
    F = parse_homogeneous(args.F, args.N)
    T = parse_homogeneous(args.T, args.N, F.degree)
    congruent = check_congruence(F, T, args.m)
    if not congruent:
        return make_report(args, [], None, "fail", congruent=False, bound=None)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TrivialBoundWarning)
        bound = height_lower_bound(F, T, args.m)
    return make_report(
        args,
        [],
        None,
        "pass",
        congruent=True,
        bound=str(bound),
        l1=l1_infty(T),
        degree=F.degree,
        warnings=[str(w.message) for w in caught],
    )


def cmd_check_point(args):
    K = _field(args)
    a = _vector(args.point, K)
    F = parse_homogeneous(args.F, len(a))
    T = parse_homogeneous(args.T, len(a), F.degree)
    rep = verify_point(a, F, T, args.m, args.tol)
    return make_report(
        args, [], rep.height_power, "pass" if rep.passed else "fail", bound=str(rep.bound), tight=rep.tight
    )


def cmd_product_formula(args):
    K = _field(args)
    beta = parse_element(args.element, K)
    rep = product_formula_check(beta, args.tol)
    return make_report(
        args,
        place_rows(rep.rows),
        rep.normalized_product,
        "pass" if rep.passed else "fail",
        norm=str(norm(beta)),
        finite_product=str(rep.finite_product),
        archimedean_product=to_json(rep.archimedean_product),
    )


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report on stdout")
    common.add_argument("--tol", type=float, default=1e-10, help="target radius / tolerance (default: 1e-10)")
    common.add_argument("--prec-cap", type=int, default=None, dest="prec_cap", help="precision cap in bits (default: 8192)")

    fieldopt = argparse.ArgumentParser(add_help=False)
    fieldopt.add_argument("--field", default=None, help='defining polynomial in t, e.g. "t^2-2" (default: Q)')

    p = argparse.ArgumentParser(prog="heightforge", description="Heights on number fields.")
    p.add_argument("--version", action="version", version=f"heightforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_, field=True):
        parents = [common, fieldopt] if field else [common]
        s = sub.add_parser(name, parents=parents, help=help_)
        s.set_defaults(func=func)
        return s

    s = add("height", cmd_height, "Weil height of an algebraic number")
    s.add_argument("alpha", help="element in t (with --field) or an irreducible polynomial in x")

    s = add("mahler", cmd_mahler, "Mahler measure of an integer polynomial", field=False)
    s.add_argument("poly")
    s.add_argument("--cross-check", action="store_true", help="also compute it as a product of Weil heights")

    s = add("proj-height", cmd_proj_height, "projective height of a vector")
    s.add_argument("--point", required=True, help='e.g. "[1, t, 3]"')

    s = add("subspace-height", cmd_subspace_height, "height of the span of a basis")
    s.add_argument("--basis", required=True, help='e.g. "[[1,2,3],[0,1,1]]"')

    s = add("places", cmd_places, "list places of a field")
    s.add_argument("--primes", default=None, help="comma separated primes (default: primes of the discriminant)")

    s = add("verify-projective", cmd_verify_projective, "check H(a)^M * U(a,T) = 1")
    s.add_argument("--point", required=True)
    s.add_argument("--poly", required=True, help="homogeneous T in x1..xN")
    s.add_argument("--deg", type=int, default=None, help="declared degree M of T")

    s = add("verify-subspace", cmd_verify_subspace, "check H(W) * U(W,Psi) = 1")
    s.add_argument("--basis", required=True)
    s.add_argument("--map", required=True, help="matrix of Psi, M rows of length N")

    s = add("verify-univariate", cmd_verify_univariate, "local and global U(alpha,T) for a polynomial T")
    s.add_argument("--alpha", required=True)
    s.add_argument("--poly", required=True, help="T in x")
    s.add_argument("--N", type=int, required=True)

    s = add("bound", cmd_bound, "height lower bound m / L1(T)", field=False)
    s.add_argument("--F", required=True)
    s.add_argument("--T", required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--N", type=int, default=2, help="number of variables (default: 2)")

    s = add("check-point", cmd_check_point, "check the bound at a point of X(F)")
    s.add_argument("--point", required=True)
    s.add_argument("--F", required=True)
    s.add_argument("--T", required=True)
    s.add_argument("--m", type=int, required=True)

    s = add("product-formula", cmd_product_formula, "check the product formula for an element")
    s.add_argument("--element", required=True)
    return p


def print_text(report: dict):
    g = report.get("global")
    print(f"{report['request']['command']}: {report['verdict']}")
    if g:
        print(f"  value  {g['midpoint']} +/- {g['radius']}")
    for key, val in report.items():
        if key in ("request", "places", "global", "verdict", "version", "timing") or val is None:
            continue
        print(f"  {key}  {json.dumps(val) if isinstance(val, (dict, list)) else val}")
    rows = report.get("places") or []
    if rows:
        cols = list(dict.fromkeys(k for r in rows for k in r))
        cells = [[_cell(r.get(c)) for c in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        print("  " + "  ".join(c.ljust(w) for c, w in zip(cols, widths)))
        for row in cells:
            print("  " + "  ".join(x.ljust(w) for x, w in zip(row, widths)))


def _cell(v) -> str:
    if isinstance(v, dict):
        if "midpoint" in v:
            return f"{v['midpoint'][:18]} +/- {v['radius']}"
        if "exponent_num" in v:
            if v.get("zero"):
                return "0"
            if v["exponent_den"] == 1:
                return f"{v['p']}^{v['exponent_num']}"
            return f"{v['p']}^({v['exponent_num']}/{v['exponent_den']})"
        if "real" in v:
            return f"{v['real']['midpoint'][:12]} + {v['imag']['midpoint'][:12]}i"
    return "-" if v is None else str(v)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    saved = os.environ.get("HEIGHTFORGE_PREC_CAP")
    if args.prec_cap is not None:
        os.environ["HEIGHTFORGE_PREC_CAP"] = str(args.prec_cap)
    start = time.perf_counter()
    try:
        report = args.func(args)
        code = EXIT_PASS if report["verdict"] == "pass" else EXIT_FAIL
    except HeightForgeError as exc:
        code = EXIT_FAIL if isinstance(exc, PrecisionExhausted) else EXIT_USAGE
        report = make_report(args, verdict="error", error={"code": exc.code, "message": str(exc)})
    except (ValueError, ZeroDivisionError) as exc:
        code = EXIT_USAGE
        report = make_report(args, verdict="error", error={"code": "INVALID_INPUT", "message": str(exc)})
    finally:
        # the cap applies to this invocation only
        if saved is None:
            os.environ.pop("HEIGHTFORGE_PREC_CAP", None)
        else:
            os.environ["HEIGHTFORGE_PREC_CAP"] = saved
    report["timing"] = round(time.perf_counter() - start, 4)
    if "error" in report:
        print(f"error [{report['error']['code']}]: {report['error']['message']}", file=sys.stderr)
    if args.json:
        print(json.dumps(report, indent=2))
    elif "error" not in report:
        print_text(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
