"""Degree-2 quotient maps of even hyperelliptic models.

A model ``d*y^2 = f(x)`` with f even is a double cover of two curves: one
through X = x^2 and one through X = 1/x^2 (sextics) or X = x^2 with
W = x*y (octics). Every map built here has the shape

    X = M(x) ,  Y = c(x) * y

with M a Moebius function of ``x`` or ``x^2``. That shape drives point
pullback in :mod:`birank.points`. Each map is checked as an exact
polynomial identity before it is returned.
"""
from __future__ import annotations

import dataclasses
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

import sympy

from . import ntheory as nt
from .elliptic import ECPoint, EllipticCurveQ, format_poly, normalize
from .errors import MapIdentityFailed, PreconditionFailed, SingularCurve

x, y = sympy.symbols("x y")


@dataclasses.dataclass(frozen=True)
class HyperellipticModel:
    """d*y^2 = f(x), f with integer coefficients in ascending order."""

    d: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [int(v) for v in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))
        if self.d == 0:
            raise ValueError("twist must be nonzero")
        if not 3 <= len(c) - 1 <= 8:
            raise ValueError("degree must be between 3 and 8")
        if nt.poly_discriminant(c) == 0:
            raise SingularCurve(f"{self} has a repeated root")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def genus(self) -> int:
        return (self.degree - 1) // 2

    @property
    def lead(self) -> int:
        return self.coeffs[-1]

    @property
    def is_even(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    def rhs(self, t):
        return nt.poly_eval(self.coeffs, t)

    def contains(self, P: "CurvePoint") -> bool:
        if P.is_infinity:
            return P in infinity_points(self)
        return self.d * P.y * P.y == self.rhs(P.x)

    @cached_property
    def poly(self) -> sympy.Expr:
        return sum(sympy.Integer(c) * x**i for i, c in enumerate(self.coeffs))

    def __str__(self):
        lhs = "y^2" if self.d == 1 else f"{self.d}*y^2"
        return f"{lhs} = {format_poly(self.coeffs)}"


@dataclasses.dataclass(frozen=True)
class CurvePoint:
    """Affine point (x, y), or a point at infinity.

    At infinity ``sign`` is +1/-1 for the two points of an even-degree
    model (y/x^(g+1) tends to +-sqrt(lead/d)) and 0 for odd degree.
    """

    x: Fraction | None = None
    y: Fraction | None = None
    sign: int = 0

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self):
        if self.is_infinity:
            return {1: "inf+", -1: "inf-", 0: "inf"}[self.sign]
        return f"({self.x}, {self.y})"

    def involution(self) -> "CurvePoint":
        if self.is_infinity:
            return CurvePoint(sign=-self.sign)
        return CurvePoint(self.x, -self.y)


def infinity_points(C: HyperellipticModel) -> list[CurvePoint]:
    if C.degree % 2:
        return [CurvePoint()]
    if nt.is_square(Fraction(C.lead, C.d)):
        return [CurvePoint(sign=1), CurvePoint(sign=-1)]
    return []


Target = Union[EllipticCurveQ, HyperellipticModel]


def _target_equation(T: Target, X, Y):
    if isinstance(T, EllipticCurveQ):
        return Y**2 - (X**3 + T.a * X**2 + T.b * X + T.c)
    return T.d * Y**2 - sum(c * X**i for i, c in enumerate(T.coeffs))


@dataclasses.dataclass(frozen=True)
class Moebius:
    """X = (alpha*s + beta) / (gamma*s + delta), s = x or s = x^2."""

    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    delta: Fraction
    in_square: bool

    def __call__(self, s):
        return (self.alpha * s + self.beta) / (self.gamma * s + self.delta)

    def solve(self, X: Fraction) -> Fraction | None:
        """s with M(s) = X, or None when only s = infinity maps to X."""
        den = self.alpha - self.gamma * X
        if den == 0:
            return None
        return (self.delta * X - self.beta) / den

    def at_infinity(self) -> Fraction | None:
        """Limit of M(s) as s -> infinity (None means X -> infinity)."""
        return None if self.gamma == 0 else self.alpha / self.gamma

    def pole(self) -> Fraction | None:
        if self.gamma == 0:
            return None
        return -self.delta / self.gamma

    def then(self, outer: "Moebius") -> "Moebius":
        """outer o self (outer acts on the value of self)."""
        if outer.in_square:
            raise PreconditionFailed("outer map must be a Moebius function of its own variable")
        a, b, c, d = outer.alpha, outer.beta, outer.gamma, outer.delta
        p, q, r, s = self.alpha, self.beta, self.gamma, self.delta
        return Moebius(a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s, self.in_square)


@dataclasses.dataclass(frozen=True)
class QuotientMap:
    """(x, y) -> (X(x), c(x)*y) from ``source`` onto ``target``."""

    source: HyperellipticModel
    target: Target
    mobius: Moebius
    y_factor: sympy.Expr
    label: str = ""

    @property
    def x_expr(self) -> sympy.Expr:
        s = x**2 if self.mobius.in_square else x
        a, b, c, d = (sympy.Rational(v) for v in dataclasses.astuple(self.mobius)[:4])
        return (a * s + b) / (c * s + d)

    @property
    def y_expr(self) -> sympy.Expr:
        return self.y_factor * y

    @property
    def formulas(self) -> tuple[sympy.Expr, sympy.Expr]:
        return sympy.simplify(self.x_expr), sympy.simplify(self.y_expr)

    def image(self, P: CurvePoint):
        """Image of a rational point of the source (ECPoint or CurvePoint on the target)."""
        m = self.mobius
        infinite = ECPoint() if isinstance(self.target, EllipticCurveQ) else None
        if P.is_infinity:
            Xinf = m.at_infinity()
            if Xinf is None:
                return infinite if infinite is not None else _target_infinity(self, P)
            # y ~ sign*s*x^(g+1); Y = c(x) y
            g1 = self.source.genus + 1
            lim = sympy.limit(self.y_factor * x**g1, x, sympy.oo)
            s = nt.exact_root(Fraction(self.source.lead, self.source.d), 2)
            Yinf = P.sign * s * Fraction(int(sympy.numer(lim)), int(sympy.denom(lim)))
            return _make_point(self.target, Xinf, Yinf)
        s = P.x * P.x if m.in_square else P.x
        if m.gamma * s + m.delta == 0:
            return infinite if infinite is not None else _target_infinity(self, P)
        c = self.y_factor.subs(x, sympy.Rational(P.x))
        cf = Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
        return _make_point(self.target, m(s), cf * P.y)


def _make_point(T: Target, X, Y):
    if isinstance(T, EllipticCurveQ):
        return ECPoint(Fraction(X), Fraction(Y))
    return CurvePoint(Fraction(X), Fraction(Y))


def _target_infinity(phi: QuotientMap, P: CurvePoint):
    T = phi.target
    pts = infinity_points(T)
    if len(pts) == 1:
        return pts[0]
    raise PreconditionFailed("images at infinity of an even target are not tracked")


def _rem_on_curve(expr, C: HyperellipticModel) -> sympy.Expr:
    num, _ = sympy.fraction(sympy.together(expr))
    num = sympy.expand(num)
    if num == 0:
        return sympy.Integer(0)
    rel = C.d * y**2 - C.poly
    return sympy.expand(sympy.rem(sympy.Poly(num, y, x), sympy.Poly(rel, y, x)).as_expr())


def verify_map(phi: QuotientMap) -> bool:
    """Substitute phi into the target equation; the numerator must vanish modulo d*y^2 - f(x)."""
    try:
        X, Y = phi.x_expr, phi.y_expr
        return _rem_on_curve(_target_equation(phi.target, X, Y), phi.source) == 0
    except (ZeroDivisionError, sympy.PolynomialError):
        return False


def _checked(phi: QuotientMap) -> QuotientMap:
    if not verify_map(phi):
        raise MapIdentityFailed(f"map {phi.label or ''} onto {phi.target} fails its identity")
    return phi


def _normalized_map(C: HyperellipticModel, cubic, inner: Moebius, y_factor, label: str) -> QuotientMap:
    """Compose (x, y) -> (inner(x), y_factor*y) onto d*Y^2 = cubic with the normalizing change."""
    E = normalize(C.d, cubic)
    ch = E.origin.change
    lin = Moebius(ch.alpha, ch.beta, Fraction(0), Fraction(1), False)
    return _checked(QuotientMap(C, E, inner.then(lin), sympy.Rational(ch.gamma) * y_factor, label))


def split_even_sextic(C: HyperellipticModel):
    """(Q1, phi1, Q2, phi2) for an even sextic d*y^2 = a6 x^6 + a4 x^4 + a2 x^2 + a0.

    phi1 is (x^2, y) onto d*Y^2 = a6 X^3 + a4 X^2 + a2 X + a0 and phi2 is
    (1/x^2, y/x^3) onto d*Y^2 = a0 X^3 + a2 X^2 + a4 X + a6, each followed
    by normalization to an integral Weierstrass model.
    """
    if C.degree != 6 or not C.is_even:
        raise PreconditionFailed(f"expected an even sextic, got degree {C.degree}")
    a0, _, a2, _, a4, _, a6 = C.coeffs
    if a0 == 0:
        raise PreconditionFailed("constant term must be nonzero")
    one, zero = Fraction(1), Fraction(0)
    phi1 = _normalized_map(C, (a0, a2, a4, a6), Moebius(one, zero, zero, one, True), sympy.Integer(1), "x^2")
    phi2 = _normalized_map(C, (a6, a4, a2, a0), Moebius(zero, one, one, zero, True), 1 / x**3, "1/x^2")
    return phi1.target, phi1, phi2.target, phi2


def split_even_octic(C: HyperellipticModel):
    """(quartic model, phi_E, genus-2 model, phi_2) for d*y^2 = q(x^2).

    phi_E is (x^2, y) onto d*Y^2 = q(X); phi_2 is (x^2, x*y) onto d*W^2 = X*q(X).
    """
    if C.degree != 8 or not C.is_even:
        raise PreconditionFailed(f"expected an even octic, got degree {C.degree}")
    q = C.coeffs[::2]
    if q[0] == 0:
        raise PreconditionFailed("q(0) must be nonzero")
    one, zero = Fraction(1), Fraction(0)
    sq = Moebius(one, zero, zero, one, True)
    quartic = HyperellipticModel(C.d, q)
    genus2 = HyperellipticModel(C.d, (0,) + tuple(q))
    phiE = _checked(QuotientMap(C, quartic, sq, sympy.Integer(1), "x^2"))
    phi2 = _checked(QuotientMap(C, genus2, sq, x, "x^2, x*y"))
    return quartic, phiE, genus2, phi2


def _shift_coeffs(f: Sequence, r: Fraction) -> list[Fraction]:
    """Coefficients of f(r + v) in v, ascending."""
    out = [Fraction(c) for c in f]
    n = len(out)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] += r * out[j + 1]
    return out


def quartic_to_weierstrass(model: HyperellipticModel, r) -> QuotientMap:
    """Birational map from d*y^2 = g(x) (deg 4, g(r) = 0) to an integral Weierstrass model.

    With u = 1/(x - r) and Y = y/(x - r)^2 the model becomes
    d*Y^2 = u^3 h(r + 1/u), where g = (x - r) h.
    """
    if model.degree != 4:
        raise PreconditionFailed("expected a quartic model")
    r = Fraction(r)
    if model.rhs(r) != 0:
        raise PreconditionFailed(f"{r} is not a root of {format_poly(model.coeffs)}")
    g = _shift_coeffs(model.coeffs, r)  # g(r + v), constant term 0
    c = g[1:]  # h(r + v) ascending
    cubic = (c[3], c[2], c[1], c[0])
    one, zero = Fraction(1), Fraction(0)
    inner = Moebius(zero, one, one, -r, False)
    return _normalized_map(model, cubic, inner, 1 / (x - sympy.Rational(r)) ** 2, "1/(x-r)")


def compose(inner: QuotientMap, outer: QuotientMap) -> QuotientMap:
    """outer o inner; the target of ``inner`` must be the source of ``outer``."""
    if inner.target != outer.source:
        raise PreconditionFailed("maps do not compose")
    s = inner.x_expr
    phi = QuotientMap(inner.source, outer.target, inner.mobius.then(outer.mobius),
                      sympy.simplify(outer.y_factor.subs(x, s) * inner.y_factor),
                      f"{outer.label} o {inner.label}")
    return _checked(phi)


def identity_map(C: HyperellipticModel) -> QuotientMap:
    one, zero = Fraction(1), Fraction(0)
    return QuotientMap(C, C, Moebius(one, zero, zero, one, False), sympy.Integer(1), "id")


@dataclasses.dataclass(frozen=True)
class ModelIsomorphism:
    """(x, y) -> (lam*x + mu, nu*y)."""

    lam: Fraction
    mu: Fraction
    nu: Fraction


def _depressed(C: HyperellipticModel) -> tuple[Fraction, list[Fraction]]:
    n = C.degree
    sigma = -Fraction(C.coeffs[-2], n * C.lead)
    return sigma, _shift_coeffs(C.coeffs, sigma)


def hyperelliptic_isomorphism(C1: HyperellipticModel, C2: HyperellipticModel) -> ModelIsomorphism | None:
    """An affine model isomorphism C1 -> C2, if one exists (x -> lam*x + mu, y -> nu*y)."""
    n = C1.degree
    if C2.degree != n:
        return None
    s1, g1 = _depressed(C1)
    s2, g2 = _depressed(C2)
    if [c == 0 for c in g1] != [c == 0 for c in g2]:
        return None
    ks = [k for k in range(n) if g1[k] != 0]
    if not ks:
        return None
    k = ks[0]
    ratio = g2[k] * g1[n] / (g2[n] * g1[k])
    root = nt.exact_root(ratio, n - k)
    if root is None:
        return None
    for lam in (root, -root):
        if lam ** (n - k) != ratio:
            continue
        if all(g2[j] * g1[n] == g2[n] * g1[j] * lam ** (n - j) for j in ks):
            kappa = g2[n] * lam**n / g1[n]
            nu = nt.exact_root(kappa * C1.d / C2.d, 2)
            if nu is not None:
                return ModelIsomorphism(lam, s2 - lam * s1, nu)
    return None
