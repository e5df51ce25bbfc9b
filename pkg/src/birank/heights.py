"""Canonical heights, height pairing and regulator-based rank lower bounds.

Normalization: h(P) ~ (1/2) log max(|num x|, |den x|), so that
h(2P) = 4 h(P). The value is the sum of an archimedean term (Tate's
series on a translated model where every real point has x >= 1) and
per-prime terms at the bad primes.
"""
from __future__ import annotations

import dataclasses
import functools
import math
from fractions import Fraction
from typing import Sequence

import mpmath

from . import ntheory as nt
from .config import get_config
from .elliptic import (
    ECPoint,
    EllipticCurveQ,
    _transform,
    add,
    b_invariants,
    c_invariants,
    point_order,
)
from .errors import PrecisionExceeded


@dataclasses.dataclass(frozen=True)
class HeightValue:
    value: mpmath.mpf
    error: float

    def __float__(self):
        return float(self.value)


def _dps_for(precision: float, E: EllipticCurveQ) -> int:
    size = max(len(str(abs(v))) for v in E.coefficients)
    return int(max(30, -math.log10(precision) + 20 + size))


def _translate_positive(E: EllipticCurveQ) -> tuple[EllipticCurveQ, int, list]:
    return _translate_cached(E.coefficients, mpmath.mp.dps)


@functools.lru_cache(maxsize=512)
def _translate_cached(coeffs, dps):
    E = EllipticCurveQ(*coeffs)
    roots = [r for r in mpmath.polyroots([1, E.a, E.b, E.c], maxsteps=200, extraprec=200) if abs(mpmath.im(r)) < mpmath.mpf(10) ** (-mpmath.mp.dps // 2)]
    emin = min(mpmath.re(r) for r in roots)
    s = 2 - int(mpmath.floor(emin))
    shifted = E.shift(s)
    return shifted, s, sorted(mpmath.re(r) + s for r in roots)


def _log_z_bound(E: EllipticCurveQ, real_roots) -> mpmath.mpf:
    """max |log z| over real points, z(t) = 1 - b4 t^2 - 2 b6 t^3 - b8 t^4, t = 1/x."""
    _, b4, b6, b8 = b_invariants(E.ainvs)
    if len(real_roots) == 3:
        e1, e2, e3 = real_roots
        intervals = [(mpmath.mpf(0), 1 / e3), (1 / e2, 1 / e1)]
    else:
        intervals = [(mpmath.mpf(0), 1 / real_roots[0])]
    crit = []
    if b8:
        disc = 9 * b6 * b6 - 8 * b8 * b4
        if disc >= 0:
            sq = mpmath.sqrt(disc)
            crit = [(-3 * b6 + sq) / (4 * b8), (-3 * b6 - sq) / (4 * b8)]
    elif b6:
        crit = [mpmath.mpf(-b4) / (3 * b6)]

    def z(t):
        return 1 - b4 * t**2 - 2 * b6 * t**3 - b8 * t**4

    vals = []
    for lo, hi in intervals:
        vals += [z(lo), z(hi)] + [z(t) for t in crit if lo <= t <= hi]
    if min(vals) <= 0:
        raise PrecisionExceeded("archimedean series bound failed (non-positive z on E(R))")
    return max(abs(mpmath.log(v)) for v in vals)


def _archimedean(E: EllipticCurveQ, x: Fraction, real_roots, tol: mpmath.mpf) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Tate's series (doubled scale) and its truncation error."""
    b2, b4, b6, b8 = b_invariants(E.ainvs)
    M = _log_z_bound(E, real_roots)
    # weights are 4^-(k+1); the tail after n terms is at most M * 4^-n / 3
    n_terms = 1
    while M * mpmath.mpf(4) ** (-n_terms) / 3 > tol:
        n_terms += 1
    if n_terms > get_config().height_max_terms:
        raise PrecisionExceeded(f"archimedean series needs {n_terms} terms")
    xn = mpmath.mpf(x.numerator) / x.denominator
    total = mpmath.log(xn)
    w = mpmath.mpf(1) / 4
    for _ in range(n_terms):
        x2, x3, x4 = xn * xn, xn**3, xn**4
        z = 1 - b4 / x2 - 2 * b6 / x3 - b8 / x4
        total += w * mpmath.log(z)
        den = 4 * x3 + b2 * x2 + 2 * b4 * xn + b6
        xn = (x4 - b4 * x2 - 2 * b6 * xn - b8) / den
        w /= 4
    return total, M * mpmath.mpf(4) ** (-n_terms) / 3


def _transform_candidates(ainvs, p: int):
    a1, a2, a3, _, _ = ainvs
    if p >= 5 and a1 == 0 and a3 == 0:
        yield -a2 * pow(3, -1, p * p) % (p * p), 0, 0
    elif p % 2 and a1 == 0 and a3 == 0:
        for r in range(p * p):
            yield r, 0, 0
    else:
        for r in range(p * p):
            for s in range(p):
                for t in range(p**3):
                    yield r, s, t


def _minimal_at(ainvs, p: int, x: Fraction, y: Fraction):
    """Move (model, point) to a p-minimal model; returns (ainvs, x, y, k) with u = p^k."""
    k = 0
    while nt.valuation(c_invariants(ainvs)[2], p) >= 12:
        for r, s, t in _transform_candidates(ainvs, p):
            nxt = _transform(ainvs, p, r, s, t)
            if nxt:
                break
        else:
            break
        ainvs = nxt
        x, y = (x - r) / (p * p), (y - s * (x - r) - t) / p**3
        k += 1
    return ainvs, x, y, k


def _nonarch_correction(ainvs, p: int, x: Fraction, y: Fraction) -> Fraction:
    """Correction (doubled scale, in units of log p) for a point integral at p."""
    a1, a2, a3, a4, a6 = ainvs
    b2, b4, b6, b8 = b_invariants(ainvs)
    c4_, _, delta = c_invariants(ainvs)
    N = nt.valuation(delta, p)
    A = nt.valuation(3 * x * x + 2 * a2 * x + a4 - a1 * y, p)
    B = nt.valuation(2 * y + a1 * x + a3, p)
    if A <= 0 or B <= 0:
        return Fraction(0)
    if nt.valuation(c4_, p) == 0:
        M = min(Fraction(B), Fraction(N, 2))
        return M * (M - N) / N
    C = nt.valuation(3 * x**4 + b2 * x**3 + 3 * b4 * x * x + 3 * b6 * x + b8, p)
    if C >= 3 * B:
        return Fraction(-2 * B, 3)
    return Fraction(-C, 4)


def canonical_height(E: EllipticCurveQ, P: ECPoint, precision: float = 1e-10) -> HeightValue:
    """Canonical height of P with an error bound not exceeding ``precision``."""
    if not E.contains(P):
        raise ValueError(f"{P} is not on {E}")
    if P.is_infinity or point_order(E, P) is not None:
        return HeightValue(mpmath.mpf(0), 0.0)
    with mpmath.workdps(_dps_for(precision, E)):
        F, s, real_roots = _translate_positive(E)
        x, y = P.x + s, P.y
        lam, tail = _archimedean(F, x, real_roots, mpmath.mpf(precision) / 2)
        # sum over p of max(0, -v_p(x)) log p is log(den x)
        total = lam + mpmath.log(x.denominator)
        ainvs = F.ainvs
        delta = c_invariants(ainvs)[2]
        for p in nt.prime_divisors(delta):
            if nt.valuation(x, p) < 0:
                continue
            mins, xm, ym, k = _minimal_at(ainvs, p, x, y)
            if nt.valuation(xm, p) < 0:
                corr = Fraction(-nt.valuation(xm, p))
            else:
                corr = _nonarch_correction(mins, p, xm, ym)
            total += (corr - 2 * k) * mpmath.log(p)
        value = total / 2
        err = float(tail / 2) + 10.0 ** (-mpmath.mp.dps + 10)
    return HeightValue(+value, err)


def naive_height(x: Fraction) -> float:
    return math.log(max(abs(x.numerator), x.denominator))


def doubling_height_oracle(E: EllipticCurveQ, P: ECPoint, doublings: int = 6) -> float:
    """h(x(2^n P)) / (2 * 4^n) with exact arithmetic (slow; low accuracy)."""
    Q = P
    for _ in range(doublings):
        Q = add(E, Q, Q)
        if Q.is_infinity:
            return 0.0
    return naive_height(Q.x) / (2 * 4**doublings)


def height_pairing(E: EllipticCurveQ, P: ECPoint, Q: ECPoint, precision: float = 1e-10) -> HeightValue:
    hp = canonical_height(E, P, precision)
    hq = canonical_height(E, Q, precision)
    hs = canonical_height(E, add(E, P, Q), precision)
    return HeightValue((hs.value - hp.value - hq.value) / 2, (hp.error + hq.error + hs.error) / 2)


def gram_matrix(E: EllipticCurveQ, points: Sequence[ECPoint], precision: float = 1e-10):
    n = len(points)
    vals = mpmath.matrix(n, n)
    err = 0.0
    for i in range(n):
        for j in range(i, n):
            if i == j:
                h = canonical_height(E, points[i], precision)
            else:
                h = height_pairing(E, points[i], points[j], precision)
            vals[i, j] = vals[j, i] = h.value
            err = max(err, h.error)
    return vals, err


def determinant_with_error(G, entry_error: float) -> tuple[mpmath.mpf, float]:
    """Determinant and a first-order bound n * n! * M^(n-1) * eps (doubled for safety)."""
    n = G.rows
    if n == 0:
        return mpmath.mpf(1), 0.0
    det = mpmath.det(G)
    M = max(abs(G[i, j]) for i in range(n) for j in range(n)) + entry_error
    bound = 2 * n * math.factorial(n) * float(M) ** (n - 1) * entry_error
    return det, bound


@dataclasses.dataclass(frozen=True)
class LowerBound:
    rank: int
    regulator: mpmath.mpf
    regulator_error: float
    points: tuple[ECPoint, ...]


INDEPENDENCE_THRESHOLD = 1e-6


def rank_lower_bound(E: EllipticCurveQ, points: Sequence[ECPoint], precision: float = 1e-8,
                     threshold: float = INDEPENDENCE_THRESHOLD) -> LowerBound:
    """Greedy maximal subset whose Gram determinant certifiably exceeds ``threshold``."""
    chosen: list[ECPoint] = []
    reg, reg_err = mpmath.mpf(1), 0.0
    for P in points:
        if not E.contains(P):
            raise ValueError(f"{P} is not on {E}")
        if P.is_infinity or point_order(E, P) is not None or P in chosen:
            continue
        G, eps = gram_matrix(E, chosen + [P], precision)
        det, err = determinant_with_error(G, eps)
        if det - err > threshold:
            chosen.append(P)
            reg, reg_err = det, err
    if not chosen:
        reg = mpmath.mpf(1)
    return LowerBound(len(chosen), reg, reg_err, tuple(chosen))
