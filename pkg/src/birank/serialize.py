"""JSON documents for certificates.

Integers and rationals are written as decimal strings ("-3", "7/4") so that
large values survive any JSON reader. The only floats are height values and
their error bounds, which always appear together under ``"height"``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import mpmath
import sympy

from .bielliptic import CurvePoint, QuotientMap, verify_map
from .descent import RankCertificate, SelmerReport
from .elliptic import ECPoint, EllipticCurveQ, j_invariant

SCHEMA_VERSION = "1.0"

PAPER, LITERATURE, COMPUTED = "PAPER", "LITERATURE", "COMPUTED"


def q(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_q(s: str) -> Fraction:
    return Fraction(s)


def tagged(value, provenance: str, **extra) -> dict:
    out = {"value": None if value is None else q(value), "provenance": provenance}
    out.update(extra)
    return out


def curve(C) -> dict:
    if isinstance(C, EllipticCurveQ):
        return {"model": "weierstrass", "coefficients": [q(v) for v in C.coefficients],
                "equation": str(C), "j_invariant": q(j_invariant(C))}
    return {"model": "hyperelliptic", "twist": q(C.d), "coefficients": [q(v) for v in C.coeffs],
            "genus": q(C.genus), "equation": str(C)}


def point(P) -> Any:
    if isinstance(P, ECPoint):
        return "O" if P.is_infinity else [q(P.x), q(P.y)]
    if isinstance(P, CurvePoint):
        if P.is_infinity:
            return repr(P)
        return [q(P.x), q(P.y)]
    raise TypeError(type(P))


def quotient_map(phi: QuotientMap) -> dict:
    X, Y = phi.formulas
    return {"label": phi.label, "target": curve(phi.target), "X": sympy.sstr(X), "Y": sympy.sstr(Y),
            "verified": verify_map(phi)}


def selmer(report: SelmerReport) -> dict:
    out = {"method": report.method, "dimensions": [q(d) for d in report.dimensions],
           "rank_upper": None if report.rank_upper is None else q(report.rank_upper),
           "places": [("inf" if p == -1 else q(p)) for p in report.places]}
    if report.method == "full_two_descent":
        out["classes"] = [[q(a), q(b)] for a, b in report.classes]
    elif report.method == "two_isogeny_descent":
        out["classes"] = [[q(d) for d in side] for side in report.classes]
    if report.literature_tag:
        out["literature_tag"] = report.literature_tag
    return out


def height_value(v: mpmath.mpf, err: float) -> dict:
    return {"height": {"value": float(v), "error": float(err)}}


def certificate(cert: RankCertificate) -> dict:
    upper_prov = LITERATURE if cert.conditional_on_literature else COMPUTED
    status = cert.status
    if status == "exact" and cert.conditional_on_literature:
        status = "exact-with-literature-flag"
    return {
        "curve": curve(cert.curve),
        "status": status,
        "rank": tagged(cert.rank, upper_prov if cert.rank is not None else COMPUTED),
        "r_lower": tagged(cert.r_lower, COMPUTED),
        "r_upper": tagged(cert.r_upper, upper_prov),
        "independent_points": [point(P) for P in cert.lower.points],
        "regulator": height_value(cert.lower.regulator, cert.lower.regulator_error),
        "upper_bounds": [selmer(r) for r in cert.reports],
        "rigor": {"conditional_on_literature": cert.conditional_on_literature,
                  "probable_primes": cert.probable_primes},
    }


def dumps(doc: dict, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def loads(text: str) -> dict:
    return json.loads(text)


def without_timing(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != "timing"}
