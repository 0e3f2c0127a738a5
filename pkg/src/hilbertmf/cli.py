"""Command-line interface: zeta values, plus-space bases, Borcherds products,
CM values, and Gross-Zagier factorizations.

Exit codes: 0 success, 2 input validation, 3 mathematical precondition
violated, 4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from fractions import Fraction

from .borcherds import borcherds_product, chamber_of, default_chamber
from .cmvalues import (
    NonzeroWeightError,
    by_cm_value,
    cm_field_setup,
    gross_zagier_J2,
    j_cm_oracle,
)
from .plusspace import PlusForm, chi_p, plus_basis
from .quadfield import get_field, siegel_zeta

BASIS_METHOD_VERSION = 1

# CM extensions of Q(sqrt 5) from the published table, as (x, y) with
# Delta = (x + y*sqrt(5))/2
KNOWN_DELTAS = {
    5: (-5, -1),
    41: (-13, -1),
    61: (-18, -4),
    109: (-21, -1),
    241: (-33, -5),
    281: (-37, -7),
    409: (-41, -3),
}


def _parse_coeffs(text: str) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    try:
        for part in text.split(","):
            m_str, c_str = part.split(":")
            m = int(m_str)
            c = Fraction(c_str)
            if m <= 0:
                raise ValueError
            out[m] = out.get(m, Fraction(0)) + c
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"malformed coefficient string {text!r}; expected 'm1:c1,m2:c2'")
    return {m: c for m, c in out.items() if c}


def _combination(p: int, coeffs: dict[int, Fraction], prec: int) -> PlusForm:
    for m in coeffs:
        if chi_p(p, m) == -1:
            raise ValueError(f"m={m} violates the plus condition (chi_p(m) = -1)")
    basis = plus_basis(p, max(coeffs), prec)
    by_pole = {f.pole_order: f for f in basis}
    total = None
    for m, c in coeffs.items():
        term = c * by_pole[m]
        total = term if total is None else total + term
    return total


def _cache_path(cache_dir: str, p: int, m_max: int, prec: int) -> str:
    key = hashlib.sha256(
        json.dumps([p, BASIS_METHOD_VERSION, m_max, prec]).encode()
    ).hexdigest()[:24]
    return os.path.join(cache_dir, f"plus_basis_{p}_{key}.json")


def cmd_zeta(args) -> int:
    print(siegel_zeta(args.disc, args.k))
    return 0


def cmd_plus_basis(args) -> int:
    cache_file = None
    if args.cache:
        cache_dir = args.cache_dir or os.environ.get("HMF_CACHE_DIR") or os.path.join(
            os.path.expanduser("~"), ".cache", "hilbertmf"
        )
        os.makedirs(cache_dir, exist_ok=True)
        cache_file = _cache_path(cache_dir, args.p, args.m_max, args.prec)
        if os.path.exists(cache_file):
            try:
                with open(cache_file) as fh:
                    data = json.load(fh)
                forms = [PlusForm.from_json(d) for d in data]
                print(json.dumps([f.to_json() for f in forms], sort_keys=True))
                return 0
            except (ValueError, KeyError, json.JSONDecodeError):
                print("warning: corrupted cache entry; recomputing", file=sys.stderr)
    forms = plus_basis(args.p, args.m_max, args.prec)
    payload = [f.to_json() for f in forms]
    if cache_file:
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(cache_file), suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
        os.replace(tmp, cache_file)
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_borcherds(args) -> int:
    coeffs = _parse_coeffs(args.coeffs)
    field = get_field(args.p)
    chamber = default_chamber(field, frozenset(coeffs))
    height = Fraction(args.height)
    vmax = int(height / chamber.min_w()) + 1
    prec = args.p * vmax * vmax // 4 + 2
    f = _combination(args.p, coeffs, prec)
    result = borcherds_product(f, chamber, height)
    rho = result.weyl_vector
    out = {
        "weight": str(result.weight),
        "weyl_vector": {"x": str(rho.x), "y": str(rho.y)},
        "divisor": {"Z": [{"m": m, "mult": str(c)} for m, c in result.divisor]},
        "expansion": result.expansion.to_json(),
    }
    print(json.dumps(out, sort_keys=True))
    return 0


def cmd_cm_value(args) -> int:
    coeffs = _parse_coeffs(args.coeffs)
    field = get_field(args.p)
    if args.delta:
        try:
            x_str, y_str = args.delta.split(",")
            delta = field.elem(Fraction(x_str), Fraction(y_str))
        except ValueError:
            raise ValueError(f"malformed delta {args.delta!r}; expected 'x,y'")
    elif args.p == 5 and args.q in KNOWN_DELTAS:
        delta = field.elem(*KNOWN_DELTAS[args.q])
    else:
        raise ValueError("no built-in CM data for this (p, q); pass --delta x,y")
    data = cm_field_setup(args.p, args.q, delta)
    f = _combination(args.p, coeffs, max(coeffs) + 8)
    _, value = by_cm_value(data, f)
    if args.format == "json":
        print(json.dumps(value.to_json(), sort_keys=True))
    else:
        print(value.factored_str())
    return 0


def cmd_gross_zagier(args) -> int:
    value = gross_zagier_J2(args.d1, args.d2)
    report = value.to_json() if args.format == "json" else value.factored_str()
    if args.verify_numeric:
        import math

        wunits = {-3: 6, -4: 4}
        w1, w2 = wunits.get(args.d1, 2), wunits.get(args.d2, 2)
        v1 = j_cm_oracle(args.d1, 60)
        v2 = j_cm_oracle(args.d2, 60)
        prod = 1
        for a in v1:
            for b in v2:
                prod *= a - b
        num = float(abs(prod)) ** (8.0 / (w1 * w2))
        log_ref = value.log_value()
        err = abs(math.log(num) - log_ref) / abs(log_ref) if log_ref else abs(math.log(num))
        if args.format == "json":
            report["oracle_rel_log_error"] = f"{err:.3e}"
        else:
            report = f"{report}   (oracle rel. log error {err:.3e})"
    print(json.dumps(report, sort_keys=True) if args.format == "json" else report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hilbertmf",
        description="Exact computations for Hilbert modular forms over real quadratic fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    z = sub.add_parser("zeta", help="special value zeta_F(1-k) of a real quadratic field")
    z.add_argument("--disc", type=int, required=True)
    z.add_argument("--k", type=int, choices=(2, 4), required=True)
    z.set_defaults(func=cmd_zeta)

    b = sub.add_parser("plus-basis", help="weakly holomorphic basis f_m of the plus space")
    b.add_argument("--p", type=int, required=True)
    b.add_argument("--m-max", type=int, required=True)
    b.add_argument("--prec", type=int, default=25)
    b.add_argument("--cache", action="store_true")
    b.add_argument("--cache-dir", default=None)
    b.set_defaults(func=cmd_plus_basis)

    pr = sub.add_parser("borcherds", help="Borcherds product expansion from a principal part")
    pr.add_argument("--p", type=int, required=True)
    pr.add_argument("--coeffs", required=True, help="principal part, e.g. '1:1' or '6:1,1:-2'")
    pr.add_argument("--height", default="15", help="L-truncation bound")
    pr.set_defaults(func=cmd_borcherds)

    cm = sub.add_parser("cm-value", help="Bruinier-Yang CM value of a Borcherds quotient")
    cm.add_argument("--p", type=int, required=True)
    cm.add_argument("--q", type=int, required=True)
    cm.add_argument("--delta", default=None, help="totally negative (x+y*sqrt(p))/2 as 'x,y'")
    cm.add_argument("--coeffs", required=True)
    cm.add_argument("--format", choices=("text", "json"), default="text")
    cm.set_defaults(func=cmd_cm_value)

    gz = sub.add_parser("gross-zagier", help="factored J(d1,d2)^2 of singular moduli")
    gz.add_argument("--d1", type=int, required=True)
    gz.add_argument("--d2", type=int, required=True)
    gz.add_argument("--verify-numeric", action="store_true")
    gz.add_argument("--format", choices=("text", "json"), default="text")
    gz.set_defaults(func=cmd_gross_zagier)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonzeroWeightError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except RuntimeError as err:
        print(f"internal consistency failure: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
