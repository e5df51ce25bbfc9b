"""Command-line interface: ``birank <command> ...`` writes one JSON document.

Exit codes: 0 success, 2 parameter violation or bad input, 3 budget or
precision failure, 4 internal inconsistency.
"""
from __future__ import annotations

import argparse
import re
import sys
import time
from typing import Sequence

from . import families as fam
from . import serialize as ser
from .bielliptic import HyperellipticModel, split_even_octic, split_even_sextic
from .config import configured
from .descent import rank_certificate
from .elliptic import EllipticCurveQ, normalize, search_points
from .errors import (
    BudgetExceeded,
    Inconsistency,
    MapIdentityFailed,
    ParameterViolation,
    PrecisionExceeded,
    PreconditionFailed,
    SingularCurve,
)
from .heights import rank_lower_bound
from .jacobian import jacobian_rank
from .points import determine_points

EXIT_OK, EXIT_PARAM, EXIT_BUDGET, EXIT_INTERNAL = 0, 2, 3, 4

# ---------------------------------------------------------------- curve grammar

_TERM = re.compile(r"([+-])(\d*)\*?(?:(x)(?:(?:\^|\*\*)?(\d+))?)?$")
_LHS = re.compile(r"^(?:([+-]?\d+)\*?)?y(?:\^|\*\*)?2$")


def parse_polynomial(text: str) -> list[int]:
    """Ascending integer coefficients of a polynomial in x."""
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ValueError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    pieces = re.findall(r"[+-][^+-]*", s)
    if "".join(pieces) != s:
        raise ValueError(f"cannot parse polynomial {text!r}")
    coeffs: dict[int, int] = {}
    for piece in pieces:
        m = _TERM.match(piece)
        if not m or (not m.group(2) and not m.group(3)):
            raise ValueError(f"cannot parse term {piece!r}")
        sign, num, var, exp = m.groups()
        c = int(num) if num else 1
        e = (int(exp) if exp else 1) if var else 0
        coeffs[e] = coeffs.get(e, 0) + (-c if sign == "-" else c)
    n = max(coeffs)
    return [coeffs.get(i, 0) for i in range(n + 1)]


def parse_curve(text: str):
    """``[d*]y2 = poly``; returns an EllipticCurveQ (degree 3) or a HyperellipticModel."""
    s = re.sub(r"\s+", "", text)
    if s.count("=") != 1:
        raise ValueError(f"expected one '=' in {text!r}")
    lhs, rhs = s.split("=")
    m = _LHS.match(lhs)
    if not m:
        raise ValueError(f"left side must be y2 or d*y2, got {lhs!r}")
    d = int(m.group(1)) if m.group(1) else 1
    f = parse_polynomial(rhs)
    while f and f[-1] == 0:
        f.pop()
    if len(f) - 1 == 3:
        if d == 1 and f[3] == 1:
            return EllipticCurveQ(f[2], f[1], f[0])
        return normalize(d, f)
    return HyperellipticModel(d, f)


# ---------------------------------------------------------------- instances

TAGS = {"g2-no2tors": fam.G2_NO2TORS, "g2-partial": fam.G2_PARTIAL, "g2-full": fam.G2_FULL, "g3": fam.G3}


def _abcd(text: str) -> tuple[int, int, int, int]:
    vals = tuple(int(v) for v in text.split(","))
    if len(vals) != 4:
        raise ValueError("--abcd needs four comma-separated integers")
    return vals


def build_instance(args):
    tag = args.tag
    if tag == "g2-no2tors":
        return fam.g2_no_two_torsion(_need(args, "a"), _need(args, "m"))
    if tag == "g2-partial":
        return fam.g2_partial(_need(args, "d"), _need(args, "p"))
    if tag == "g2-full":
        return fam.g2_full(_need(args, "d"), _need(args, "k"), _need(args, "p"))
    if tag == "g3":
        return fam.g3(*_abcd(_need(args, "abcd")), _need(args, "D"))
    raise ValueError(f"unknown family {tag}")


def _need(args, name):
    v = getattr(args, name, None)
    if v is None:
        raise ValueError(f"--{name} is required for family {args.tag}")
    return v


def instance_doc(inst: fam.FamilyInstance) -> dict:
    er = inst.expected_rank
    return {
        "family": inst.tag,
        "parameters": {k: ser.q(v) for k, v in inst.params},
        "curve": ser.curve(inst.curve),
        "factors": [
            {"role": f.role, "curve": ser.curve(f.curve), "map": ser.quotient_map(f.map),
             "matches": {name: ok for name, ok in f.matches}}
            for f in inst.factors
        ],
        "expected_rank": {
            "value": None if er.value is None else ser.q(er.value),
            "provenance": er.provenance,
            "note": er.note,
            "terms": [{"label": t.label, "value": None if t.value is None else ser.q(t.value),
                       "provenance": t.provenance, "note": t.note} for t in er.terms],
        },
        "congruence_class_checked": inst.congruence_class_checked,
        "notes": list(inst.notes),
    }


# ---------------------------------------------------------------- commands

def cmd_family(args) -> dict:
    tag = TAGS[args.tag]
    count = args.count
    if tag == fam.G2_PARTIAL:
        if args.p is not None:
            insts = [fam.g2_partial(_need(args, "d"), args.p)]
        else:
            insts = fam.family_batch(tag, count, d=_need(args, "d"), cls=args.cls)
    elif tag == fam.G2_NO2TORS:
        if args.m is not None:
            insts = [fam.g2_no_two_torsion(_need(args, "a"), args.m)]
        else:
            insts = fam.family_batch(tag, args.m_count or count, a=_need(args, "a"))
    elif tag == fam.G2_FULL:
        if args.p is not None:
            insts = [fam.g2_full(_need(args, "d"), _need(args, "k"), args.p)]
        else:
            insts = fam.family_batch(tag, count, d=_need(args, "d"), k=_need(args, "k"))
    else:
        if args.D is not None:
            insts = [fam.g3(*_abcd(_need(args, "abcd")), args.D)]
        else:
            insts = fam.family_batch(tag, args.D_count or count, abcd=_abcd(_need(args, "abcd")))
    return {"instances": [instance_doc(i) for i in insts]}


def cmd_rank(args) -> dict:
    E = parse_curve(args.curve)
    if not isinstance(E, EllipticCurveQ):
        raise PreconditionFailed("rank expects a cubic right-hand side")
    cert = rank_certificate(E, args.height_bound, args.precision, literature_hint=args.literature_hint,
                            literature_tag="supplied literature rank" if args.literature_hint is not None else None)
    return {"certificate": ser.certificate(cert)}


def cmd_jacrank(args) -> dict:
    inst = build_instance(args)
    jr = jacobian_rank(inst, args.height_bound, args.precision, genus2_rank=args.literature_c2_rank)
    status = jr.status
    if status == "exact" and jr.conditional_on_literature:
        status = "exact-with-literature-flag"
    prov = ser.LITERATURE if jr.conditional_on_literature else ser.COMPUTED
    factors = []
    for f in jr.factors:
        entry = {"role": f.role, "r_lower": ser.tagged(f.lower, ser.COMPUTED),
                 "r_upper": ser.tagged(f.upper, ser.LITERATURE if f.provenance == "literature" else ser.COMPUTED),
                 "provenance": f.provenance}
        if f.certificate is not None:
            entry["certificate"] = ser.certificate(f.certificate)
        if f.note:
            entry["note"] = f.note
        factors.append(entry)
    return {
        "instance": instance_doc(inst),
        "jacobian_rank": {"status": status, "rank": ser.tagged(jr.rank, prov),
                          "r_lower": ser.tagged(jr.lower, ser.COMPUTED), "r_upper": ser.tagged(jr.upper, prov),
                          "label": "rank of the Jacobian"},
        "factors": factors,
        "rigor": {"conditional_on_literature": jr.conditional_on_literature},
    }


def cmd_points(args) -> dict:
    inst = build_instance(args)
    jr = jacobian_rank(inst, args.height_bound, args.precision, genus2_rank=args.literature_c2_rank)
    res = determine_points(inst, jr.certificates(), args.bound)
    return {
        "instance": instance_doc(inst),
        "points": {"status": res.status, "points": [ser.point(P) for P in res.points],
                   "provenance": ser.LITERATURE if res.conditional_on_literature else ser.COMPUTED,
                   "search_bound": ser.q(res.search_bound), "trace": list(res.trace)},
        "rigor": {"conditional_on_literature": res.conditional_on_literature},
    }


_NOT_DESK = "not desk-reproducible: large generator heights, rank taken from the table"


def cmd_table(args) -> dict:
    rows = []
    if args.which == "corollary22":
        for r in range(12):
            e = fam.corollary22_params(r)
            row = {"r": ser.q(r), "a": ser.q(e.a), "provenance": ser.PAPER if e.provenance == fam.PAPER else ser.LITERATURE,
                   "note": e.note}
            if e.k is not None:
                row["k"] = ser.q(e.k)
                row["k_factors"] = [ser.q(p) for p in e.k_factors]
            if args.verify and r in (1, 2):
                E = EllipticCurveQ.mordell(e.a * e.a)
                lb = rank_lower_bound(E, search_points(E, args.height_bound), args.precision)
                row["verification"] = {"r_lower": ser.tagged(lb.rank, ser.COMPUTED),
                                       "points": [ser.point(P) for P in lb.points],
                                       "regulator": ser.height_value(lb.regulator, lb.regulator_error),
                                       "height_bound": ser.q(args.height_bound)}
            elif args.verify and r >= 3:
                row["verification"] = _NOT_DESK
            rows.append(row)
    else:
        for r in range(3):
            a, b, c, d = fam.corollary32_params(r)
            rows.append({"r": ser.q(r), "abcd": [ser.q(v) for v in (a, b, c, d)], "provenance": ser.PAPER,
                         "square_triple_check": fam.square_triple_check(a, b, c, d)})
    return {"table": args.which, "rows": rows}


def cmd_split(args) -> dict:
    C = parse_curve(args.curve)
    if not isinstance(C, HyperellipticModel):
        raise PreconditionFailed("split expects a sextic or octic")
    if C.degree == 6:
        Q1, p1, Q2, p2 = split_even_sextic(C)
        maps = [p1, p2]
    else:
        _, p1, _, p2 = split_even_octic(C)
        maps = [p1, p2]
    return {"curve": ser.curve(C), "quotients": [ser.quotient_map(m) for m in maps]}


COMMANDS = {"family": cmd_family, "rank": cmd_rank, "jacrank": cmd_jacrank, "points": cmd_points,
            "table": cmd_table, "split": cmd_split}


# ---------------------------------------------------------------- argument parsing

def _common(p: argparse.ArgumentParser):
    p.add_argument("-H", "--height-bound", type=int, default=1000, help="naive height bound for point search")
    p.add_argument("--precision", type=float, default=1e-8, help="canonical height precision")
    p.add_argument("--json-pretty", action="store_true")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized factoring")
    p.add_argument("--timeout-factor", type=float, default=10.0)
    p.add_argument("--timeout-descent", type=float, default=30.0)
    p.add_argument("--timeout-search", type=float, default=30.0)
    p.add_argument("--out", default=None, help="write the document to this file instead of stdout")


def _family_args(p: argparse.ArgumentParser):
    p.add_argument("tag", choices=sorted(TAGS))
    for name in ("a", "m", "d", "k", "p", "D"):
        p.add_argument(f"--{name}", type=int, default=None)
    p.add_argument("--abcd", default=None, help="a,b,c,d for g3")
    p.add_argument("--literature-c2-rank", type=int, default=None, help="Jacobian rank of the genus-2 factor")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="birank", description="Ranks and rational points of bielliptic families.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("family", help="construct family instances")
    _family_args(p)
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--class", dest="cls", choices=["5mod12", "3mod4"], default="5mod12")
    p.add_argument("--m-count", type=int, default=None)
    p.add_argument("--D-count", type=int, default=None)
    _common(p)

    p = sub.add_parser("rank", help="rank certificate of an elliptic curve")
    p.add_argument("kind", choices=["elliptic"])
    p.add_argument("curve", help='e.g. "y2=x3+125" or "5*y2=x^3-x"')
    p.add_argument("--literature-hint", type=int, default=None)
    _common(p)

    p = sub.add_parser("jacrank", help="Jacobian rank of a family instance")
    _family_args(p)
    _common(p)

    p = sub.add_parser("points", help="rational points of a family instance")
    _family_args(p)
    p.add_argument("--bound", type=int, default=100, help="naive search bound for the cross-check")
    _common(p)

    p = sub.add_parser("table", help="rank parameter tables")
    p.add_argument("which", choices=["corollary22", "corollary32"])
    p.add_argument("--verify", action="store_true", help="run lower-bound searches where feasible")
    _common(p)

    p = sub.add_parser("split", help="quotient maps of an even sextic or octic")
    p.add_argument("curve")
    _common(p)
    return parser


def _inputs(args) -> dict:
    skip = {"command", "json_pretty", "out"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None:
            continue
        out[k] = ser.q(v) if isinstance(v, int) and not isinstance(v, bool) else (repr(v) if isinstance(v, float) else v)
    return out


def run(argv: Sequence[str]) -> tuple[int, dict]:
    code, doc, _ = _run(argv)
    return code, doc


def _run(argv: Sequence[str]):
    parser = make_parser()
    args = parser.parse_args(list(argv))
    doc = {"schema_version": ser.SCHEMA_VERSION, "command": args.command, "argv": list(argv), "inputs": _inputs(args)}
    overrides = {"timeout_factor": args.timeout_factor, "timeout_descent": args.timeout_descent,
                 "timeout_search": args.timeout_search}
    if args.seed is not None:
        overrides["seed"] = args.seed
    start = time.perf_counter()
    code = EXIT_OK
    try:
        with configured(**overrides):
            doc["results"] = COMMANDS[args.command](args)
    except (ParameterViolation, PreconditionFailed, SingularCurve, ValueError) as e:
        code = EXIT_PARAM
        doc["error"] = {"type": type(e).__name__, "message": str(e),
                        "constraint": getattr(e, "constraint", None)}
    except (BudgetExceeded, PrecisionExceeded) as e:
        code = EXIT_BUDGET
        doc["error"] = {"type": type(e).__name__, "message": str(e)}
    except (MapIdentityFailed, Inconsistency) as e:
        code = EXIT_INTERNAL
        doc["error"] = {"type": type(e).__name__, "message": str(e)}
    doc["exit_code"] = code
    doc["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    return code, doc, args


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, doc, args = _run(argv)
    text = ser.dumps(doc, args.json_pretty)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
