"""Rational points on family curves by pullback from rank-0 elliptic quotients."""
from __future__ import annotations

import dataclasses
import math
from fractions import Fraction
from typing import Mapping, Sequence

from . import ntheory as nt
from .bielliptic import CurvePoint, HyperellipticModel, QuotientMap, infinity_points
from .descent import RankCertificate
from .elliptic import ECPoint, torsion_subgroup
from .errors import Inconsistency

EXACT = "Exact"
UNDETERMINED = "Undetermined"


@dataclasses.dataclass(frozen=True)
class PointSetResult:
    status: str
    points: tuple[CurvePoint, ...]
    trace: tuple[str, ...]
    conditional_on_literature: bool = False
    search_bound: int = 0


def _sqrt_q(q: Fraction) -> Fraction | None:
    return nt.exact_root(q, 2) if q >= 0 else None


def _point_key(P: CurvePoint):
    if P.is_infinity:
        return (0, -P.sign, 0, 0)
    return (1, abs(P.x.denominator), P.x, -P.y)


def _affine_over(C: HyperellipticModel, xs) -> list[CurvePoint]:
    out = []
    for x0 in xs:
        y2 = Fraction(C.rhs(x0)) / C.d
        r = _sqrt_q(y2)
        if r is None:
            continue
        out += [CurvePoint(x0, r)] if r == 0 else [CurvePoint(x0, r), CurvePoint(x0, -r)]
    return out


def _xs_from_s(s: Fraction | None, in_square: bool) -> list[Fraction]:
    if s is None:
        return []
    if not in_square:
        return [s]
    r = _sqrt_q(s)
    if r is None:
        return []
    return [r] if r == 0 else [r, -r]


def pullback_points(C: HyperellipticModel, phi: QuotientMap, S: Sequence[ECPoint]) -> list[CurvePoint]:
    """All rational points of C whose image under phi lies in S."""
    m = phi.mobius
    found: set[CurvePoint] = set()
    inf = infinity_points(C)
    for P in S:
        if P.is_infinity:
            candidates = list(inf) + _affine_over(C, _xs_from_s(m.pole(), m.in_square))
        else:
            s = m.solve(P.x)
            candidates = list(inf) + _affine_over(C, _xs_from_s(s, m.in_square))
        for Q in candidates:
            if phi.image(Q) == P:
                found.add(Q)
    return sorted(found, key=_point_key)


def naive_curve_search(C: HyperellipticModel, bound: int) -> list[CurvePoint]:
    """Affine points with x = m/e, |m| <= bound, 1 <= e <= bound, sorted by (e, m)."""
    if bound < 1:
        raise ValueError("bound must be positive")
    n = C.degree + (C.degree % 2)
    coeffs = C.coeffs
    out = []
    for e in range(1, bound + 1):
        epow = [e**k for k in range(n + 1)]
        for m in range(-bound, bound + 1):
            if math.gcd(m, e) != 1:
                continue
            # F(m, e) = e^n f(m/e); need d*F a square
            F = 0
            mp = 1
            for i, c in enumerate(coeffs):
                F += c * mp * epow[n - i]
                mp *= m
            v = C.d * F
            if v < 0:
                continue
            r = math.isqrt(v)
            if r * r != v:
                continue
            x0 = Fraction(m, e)
            y0 = Fraction(r, C.d * e ** (n // 2))
            out += [CurvePoint(x0, y0)] if r == 0 else [CurvePoint(x0, y0), CurvePoint(x0, -y0)]
    return out


def _rank_zero(cert: RankCertificate | None) -> bool:
    return cert is not None and cert.is_exact and cert.rank == 0


def determine_points(instance, certificates: Mapping[str, RankCertificate], search_bound: int = 100) -> PointSetResult:
    """Exact point set from every rank-0 elliptic factor, cross-checked by naive search."""
    C = instance.curve
    trace = []
    exact: set[CurvePoint] | None = None
    conditional = False
    for factor in instance.elliptic_factors():
        cert = certificates.get(factor.role)
        if not _rank_zero(cert):
            trace.append(f"{factor.role}: {factor.curve} has no rank-0 certificate")
            continue
        tors = torsion_subgroup(factor.curve)
        pulled = set(pullback_points(C, factor.map, tors.points))
        trace.append(f"{factor.role}: {factor.curve} rank 0, torsion {tors.structure} "
                     f"{list(tors.points)}; pullback {sorted(pulled, key=_point_key)}")
        conditional |= cert.conditional_on_literature
        exact = pulled if exact is None else exact & pulled
    searched = naive_curve_search(C, search_bound)
    visible = set(searched) | set(infinity_points(C))
    trace.append(f"naive search to {search_bound}: {len(searched)} affine points; infinity: {infinity_points(C)}")
    if exact is None:
        return PointSetResult(UNDETERMINED, tuple(sorted(visible, key=_point_key)), tuple(trace), False, search_bound)
    for P in exact:
        if not C.contains(P):
            raise Inconsistency(f"pulled-back point {P} is not on {C}")
    extra = visible - exact
    if extra:
        raise Inconsistency(f"search found {sorted(extra, key=_point_key)} outside the exact set")
    return PointSetResult(EXACT, tuple(sorted(exact, key=_point_key)), tuple(trace), conditional, search_bound)
