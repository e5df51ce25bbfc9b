"""Elliptic curves over Q in the shape y^2 = x^3 + a x^2 + b x + c.

Normal form: integral coefficients, no xy or y terms. Twisted inputs
``d*y^2 = cubic`` are scaled into this form by :func:`normalize`, which
records the change of variables so point maps stay checkable.
"""
from __future__ import annotations

import dataclasses
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import ntheory as nt
from .config import Deadline, get_config
from .errors import SingularCurve


# ---------------------------------------------------------------- model changes

@dataclasses.dataclass(frozen=True)
class AffineChange:
    """(x, y) -> (alpha*x + beta, gamma*y); composes left to right."""

    alpha: Fraction = Fraction(1)
    beta: Fraction = Fraction(0)
    gamma: Fraction = Fraction(1)

    def then(self, other: "AffineChange") -> "AffineChange":
        return AffineChange(
            other.alpha * self.alpha,
            other.alpha * self.beta + other.beta,
            other.gamma * self.gamma,
        )

    def apply(self, x, y):
        return self.alpha * x + self.beta, self.gamma * y

    def invert(self) -> "AffineChange":
        return AffineChange(1 / self.alpha, -self.beta / self.alpha, 1 / self.gamma)


@dataclasses.dataclass(frozen=True)
class ModelRecord:
    """Where a normalized curve came from: ``d*y^2 = cubic(x)`` and the map to it."""

    twist: int
    cubic: tuple[Fraction, ...]
    change: AffineChange


# ---------------------------------------------------------------- curves and points

@dataclasses.dataclass(frozen=True)
class ECPoint:
    x: Fraction | None = None
    y: Fraction | None = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self):
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"


O = ECPoint()


def point(x, y) -> ECPoint:
    return ECPoint(Fraction(x), Fraction(y))


@dataclasses.dataclass(frozen=True)
class EllipticCurveQ:
    """y^2 = x^3 + a*x^2 + b*x + c with integer a, b, c."""

    a: int
    b: int
    c: int
    origin: ModelRecord | None = dataclasses.field(default=None, compare=False, hash=False)

    def __post_init__(self):
        for v in (self.a, self.b, self.c):
            if not isinstance(v, int):
                raise TypeError("coefficients must be integers")
        if self.cubic_discriminant == 0:
            raise SingularCurve(f"y^2 = {self.rhs_str()} is singular")

    @classmethod
    def mordell(cls, s: int) -> "EllipticCurveQ":
        return cls(0, 0, s)

    @classmethod
    def from_roots(cls, e1: int, e2: int, e3: int) -> "EllipticCurveQ":
        return cls(-(e1 + e2 + e3), e1 * e2 + e1 * e3 + e2 * e3, -e1 * e2 * e3)

    @property
    def coefficients(self) -> tuple[int, int, int]:
        return self.a, self.b, self.c

    @property
    def cubic(self) -> tuple[int, int, int, int]:
        """Right-hand side in ascending order."""
        return self.c, self.b, self.a, 1

    @property
    def cubic_discriminant(self) -> int:
        a, b, c = self.a, self.b, self.c
        return a * a * b * b - 4 * b**3 - 4 * a**3 * c - 27 * c * c + 18 * a * b * c

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return 0, self.a, 0, self.b, self.c

    def rhs(self, x):
        return ((x + self.a) * x + self.b) * x + self.c

    def contains(self, P: ECPoint) -> bool:
        return P.is_infinity or P.y * P.y == self.rhs(P.x)

    def rhs_str(self) -> str:
        return format_poly(self.cubic)

    def __str__(self):
        return f"y^2 = {self.rhs_str()}"

    def two_torsion_roots(self) -> list[int]:
        return [int(r) for r in nt.rational_roots(self.cubic)]

    def shift(self, s: int) -> "EllipticCurveQ":
        """Model in the variable x' = x + s."""
        a, b, c = self.a, self.b, self.c
        # f(x' - s)
        na = a - 3 * s
        nb = b - 2 * a * s + 3 * s * s
        nc = c - b * s + a * s * s - s**3
        return EllipticCurveQ(na, nb, nc, ModelRecord(1, tuple(map(Fraction, self.cubic)), AffineChange(beta=Fraction(s))))


def format_poly(coeffs: Sequence, var: str = "x") -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}{'*' + mono if mono else ''}"
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------- invariants

def b_invariants(ainvs):
    a1, a2, a3, a4, a6 = ainvs
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def c_invariants(ainvs):
    b2, b4, b6, b8 = b_invariants(ainvs)
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    delta = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return c4, c6, delta


def discriminant(E: EllipticCurveQ) -> int:
    return c_invariants(E.ainvs)[2]


def c4(E: EllipticCurveQ) -> int:
    return c_invariants(E.ainvs)[0]


def j_invariant(E: EllipticCurveQ) -> Fraction:
    c4_, _, delta = c_invariants(E.ainvs)
    return Fraction(c4_**3, delta)


# ---------------------------------------------------------------- normalization

def _scaling_exponent(E_coeffs, p) -> int:
    a, b, c = E_coeffs
    k = 0
    while True:
        k1 = k + 1
        if a % p ** (2 * k1) == 0 and b % p ** (4 * k1) == 0 and c % p ** (6 * k1) == 0:
            k = k1
        else:
            return k


def reduce_scaling(E: EllipticCurveQ) -> EllipticCurveQ:
    """Divide out the largest u with u^2 | a, u^4 | b, u^6 | c."""
    a, b, c = E.coefficients
    g = math.gcd(math.gcd(a, b), c)
    u = 1
    for p in nt.prime_divisors(g):
        u *= p ** _scaling_exponent((a, b, c), p)
    if u == 1:
        return E
    change = AffineChange(Fraction(1, u * u), Fraction(0), Fraction(1, u**3))
    origin = E.origin
    if origin is not None:
        origin = ModelRecord(origin.twist, origin.cubic, origin.change.then(change))
    else:
        origin = ModelRecord(1, tuple(map(Fraction, E.cubic)), change)
    return EllipticCurveQ(a // u**2, b // u**4, c // u**6, origin)


def normalize(d: int, cubic: Sequence[int | Fraction], reduce: bool = True) -> EllipticCurveQ:
    """Integral model y^2 = monic cubic for ``d*y^2 = cubic(x)``.

    ``cubic`` is ascending ``(f0, f1, f2, f3)``. The change
    X = d*f3*x, Y = d^2*f3*y is recorded on ``origin`` (composed with
    the u-scaling of :func:`reduce_scaling` when ``reduce``).
    """
    if d == 0:
        raise ValueError("twist must be nonzero")
    f = [Fraction(c) for c in cubic]
    if len(f) != 4 or f[3] == 0:
        raise ValueError("expected a degree-3 polynomial")
    # multiply through by the common denominator
    den = math.lcm(*(c.denominator for c in f))
    fi = [int(c * den) for c in f]
    d_eff = d * den
    f0, f1, f2, f3 = fi
    if nt.poly_discriminant(fi) == 0:
        raise SingularCurve(f"{d}*y^2 = {format_poly(cubic)} has a repeated root")
    a = d_eff * f2
    b = d_eff**2 * f3 * f1
    c = d_eff**3 * f3**2 * f0
    change = AffineChange(Fraction(d_eff * f3), Fraction(0), Fraction(d_eff**2 * f3))
    E = EllipticCurveQ(a, b, c, ModelRecord(d, tuple(f), change))
    return reduce_scaling(E) if reduce else E


def map_to_normalized(E: EllipticCurveQ, x, y) -> ECPoint:
    """Image of a point (x, y) of E.origin's model on E."""
    X, Y = E.origin.change.apply(Fraction(x), Fraction(y))
    return ECPoint(X, Y)


def quadratic_twist(E: EllipticCurveQ, t: int) -> EllipticCurveQ:
    """Twist t*y^2 = f(x) of E, normalized."""
    if t == 0 or not nt.is_squarefree(t):
        raise ValueError("twist parameter must be a nonzero squarefree integer")
    return normalize(t, E.cubic)


# ---------------------------------------------------------------- isomorphism

@dataclasses.dataclass(frozen=True)
class Isomorphism:
    """(x, y) on E1 -> (u^2 x + r, u^3 y) on E2."""

    u: Fraction
    r: Fraction

    def apply(self, P: ECPoint) -> ECPoint:
        if P.is_infinity:
            return P
        return ECPoint(self.u**2 * P.x + self.r, self.u**3 * P.y)


def _short(E: EllipticCurveQ) -> tuple[Fraction, Fraction]:
    a, b, c = map(Fraction, E.coefficients)
    return b - a * a / 3, c - a * b / 3 + 2 * a**3 / 27


def is_isomorphic_over_Q(E1: EllipticCurveQ, E2: EllipticCurveQ) -> Isomorphism | None:
    if j_invariant(E1) != j_invariant(E2):
        return None
    A1, B1 = _short(E1)
    A2, B2 = _short(E2)
    if A1 == 0:
        u = nt.exact_root(B2 / B1, 6)
    elif B1 == 0:
        u = nt.exact_root(A2 / A1, 4)
    else:
        u2 = (B2 * A1) / (B1 * A2)
        u = nt.exact_root(u2, 2)
        if u is not None and u**4 != A2 / A1:
            u = None
    if u is None:
        return None
    u = abs(u)
    return Isomorphism(u, (u * u * E1.a - E2.a) / 3)


# ---------------------------------------------------------------- group law

def negate(E: EllipticCurveQ, P: ECPoint) -> ECPoint:
    return P if P.is_infinity else ECPoint(P.x, -P.y)


def add(E: EllipticCurveQ, P: ECPoint, Q: ECPoint) -> ECPoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.x == Q.x:
        if P.y + Q.y == 0:
            return O
        lam = (3 * P.x * P.x + 2 * E.a * P.x + E.b) / (2 * P.y)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam * lam - E.a - P.x - Q.x
    y3 = -(P.y + lam * (x3 - P.x))
    return ECPoint(x3, y3)


def scalar_mul(E: EllipticCurveQ, n: int, P: ECPoint) -> ECPoint:
    if n < 0:
        return scalar_mul(E, -n, negate(E, P))
    R, Q = O, P
    while n:
        if n & 1:
            R = add(E, R, Q)
        Q = add(E, Q, Q)
        n >>= 1
    return R


def point_order(E: EllipticCurveQ, P: ECPoint, cap: int = 16) -> int | None:
    """Exact order if it is at most ``cap``; ``None`` otherwise.

    Multiples of torsion points on an integral model are integral, so a
    non-integral multiple proves infinite order.
    """
    Q = P
    for n in range(1, cap + 1):
        if Q.is_infinity:
            return n
        if Q.x.denominator != 1 or Q.y.denominator != 1:
            return None
        Q = add(E, Q, P)
    return None


# ---------------------------------------------------------------- torsion

@dataclasses.dataclass(frozen=True)
class TorsionGroup:
    structure: str
    order: int
    generators: tuple[ECPoint, ...]
    points: tuple[ECPoint, ...]


def _structure_tag(order: int, full_two: bool) -> str:
    if order == 1:
        return "trivial"
    if full_two:
        return f"Z/2xZ/{order // 2}"
    return f"Z/{order}"


def torsion_subgroup(E: EllipticCurveQ) -> TorsionGroup:
    """Lutz-Nagell enumeration: integral points with y = 0 or y^2 | disc."""
    D = E.cubic_discriminant
    ys = [1]
    for p, e in nt.factorize(D).factors:
        ys = [y * p**k for y in ys for k in range(e // 2 + 1)]
    candidates = []
    for y in [0] + sorted(ys):
        f = (E.c - y * y, E.b, E.a, 1)
        for x in nt.rational_roots(f):
            if x.denominator == 1:
                candidates.append(point(x, y))
                if y:
                    candidates.append(point(x, -y))
    orders = {}
    for P in candidates:
        n = point_order(E, P)
        if n is not None:
            orders[P] = n
    pts = [O] + sorted(orders, key=lambda P: (orders[P], P.x, P.y))
    orders[O] = 1
    n = len(pts)
    two = [P for P in pts if not P.is_infinity and P.y == 0]
    full_two = len(two) == 3
    if n == 1:
        gens = ()
    elif not full_two:
        gens = (next(P for P in pts if orders[P] == n),)
    elif n == 4:
        gens = tuple(two[:2])
    else:
        cyc = n // 2
        P = next(P for P in pts if orders[P] == cyc)
        half = scalar_mul(E, cyc // 2, P)
        gens = (P, next(T for T in two if T != half))
    return TorsionGroup(_structure_tag(n, full_two), n, gens, tuple(pts))


def mordell_torsion_classify(s: int) -> str:
    """Torsion structure of y^2 = x^3 + s for sixth-power-free s."""
    if s == 0:
        raise ValueError("s must be nonzero")
    if any(e >= 6 for _, e in nt.factorize(s).factors):
        raise ValueError("s must be sixth-power-free")
    if s == 1:
        return "Z/6"
    if s == -432:
        return "Z/3"
    if nt.is_square(s):
        return "Z/3"
    if nt.is_cube(s):
        return "Z/2"
    return "trivial"


# ---------------------------------------------------------------- point search

_FILTER_MODULI = (64, 63, 65, 11, 17, 19, 23)
_SQUARE_TABLES = {q: np.isin(np.arange(q), np.array(sorted({(i * i) % q for i in range(q)}))) for q in _FILTER_MODULI}


def search_points(E: EllipticCurveQ, height_bound: int, deadline: Deadline | None = None) -> list[ECPoint]:
    """Affine points with x = m/e^2, |m| <= H, 1 <= e <= sqrt(H), y >= 0.

    Sorted by (e, m). Residue filters on numpy arrays discard most m before
    the exact square test.
    """
    H = int(height_bound)
    if H < 1:
        raise ValueError("height bound must be >= 1")
    deadline = deadline or Deadline("search", get_config().timeout_search)
    ms = np.arange(-H, H + 1, dtype=np.int64)
    out = []
    for e in range(1, math.isqrt(H) + 1):
        deadline.check()
        e2 = e * e
        keep = np.ones(ms.shape, dtype=bool)
        if e > 1:
            keep &= np.gcd(ms, e) == 1
        for q in _FILTER_MODULI:
            mq = ms % q
            val = (mq * mq % q * mq + (E.a * e2 % q) * (mq * mq % q) + (E.b * e2 * e2 % q) * mq + E.c * e2**3 % q) % q
            keep &= _SQUARE_TABLES[q][val]
        for m in ms[keep].tolist():
            F = m**3 + E.a * m * m * e2 + E.b * m * e2 * e2 + E.c * e2**3
            if F < 0:
                continue
            r = math.isqrt(F)
            if r * r == F:
                out.append(ECPoint(Fraction(m, e2), Fraction(r, e2 * e)))
    return out


# ---------------------------------------------------------------- reduction

def _transform(ainvs, u, r, s, t):
    a1, a2, a3, a4, a6 = ainvs
    n1 = a1 + 2 * s
    n2 = a2 - s * a1 + 3 * r - s * s
    n3 = a3 + r * a1 + 2 * t
    n4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t
    n6 = a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1
    nums = (n1, n2, n3, n4, n6)
    pows = (1, 2, 3, 4, 6)
    if all(n % u**k == 0 for n, k in zip(nums, pows)):
        return tuple(n // u**k for n, k in zip(nums, pows))
    return None


def _minimal_invariant_valuations(E: EllipticCurveQ, p: int) -> tuple[int, int]:
    """(v_p(disc), v_p(c4)) of a p-minimal model reached by u = p steps."""
    c4_, c6, delta = c_invariants(E.ainvs)
    if p >= 5:
        vd, v4, v6 = nt.valuation(delta, p), nt.valuation(c4_, p), nt.valuation(c6, p)
        k = min(vd // 12, v4 // 4 if c4_ else math.inf, v6 // 6 if c6 else math.inf)
        return vd - 12 * k, (v4 - 4 * k) if c4_ else math.inf
    ainvs = E.ainvs
    while nt.valuation(c_invariants(ainvs)[2], p) >= 12:
        nxt = None
        for r in range(p * p):
            for s in range(p):
                for t in range(p**3):
                    nxt = _transform(ainvs, p, r, s, t)
                    if nxt:
                        break
                if nxt:
                    break
            if nxt:
                break
        if nxt is None:
            break
        ainvs = nxt
    c4_, _, delta = c_invariants(ainvs)
    return nt.valuation(delta, p), nt.valuation(c4_, p)


def reduction_type(E: EllipticCurveQ, p: int) -> str:
    """'good', 'multiplicative' or 'additive' at the prime p."""
    if not nt.is_prime(p):
        raise ValueError("p must be prime")
    vd, v4 = _minimal_invariant_valuations(E, p)
    if vd == 0:
        return "good"
    return "multiplicative" if v4 == 0 else "additive"


def bad_primes(E: EllipticCurveQ) -> list[int]:
    return [p for p in nt.prime_divisors(discriminant(E)) if reduction_type(E, p) != "good"]
