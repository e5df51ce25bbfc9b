import dataclasses
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from birank.bielliptic import x as bx, y as by
from birank.bielliptic import (
    CurvePoint,
    HyperellipticModel,
    compose,
    hyperelliptic_isomorphism,
    identity_map,
    infinity_points,
    quartic_to_weierstrass,
    split_even_octic,
    split_even_sextic,
    verify_map,
)
from birank.elliptic import EllipticCurveQ, is_isomorphic_over_Q, j_invariant
from birank.errors import PreconditionFailed, SingularCurve
from birank.families import g3
from birank.points import naive_curve_search


def _maps_onto(phi, P):
    Q = phi.image(P)
    return phi.target.contains(Q)


def test_sextic_split_of_x6_plus_2():
    C = HyperellipticModel(1, (2, 0, 0, 0, 0, 0, 1))
    Q1, p1, Q2, p2 = split_even_sextic(C)
    assert is_isomorphic_over_Q(Q1, EllipticCurveQ.mordell(2))
    assert is_isomorphic_over_Q(Q2, EllipticCurveQ.mordell(4))
    assert verify_map(p1) and verify_map(p2)


def test_octic_split_shapes():
    C = g3(1, 2, 3, 8, 1).curve
    quartic, phiE, C2, phi2 = split_even_octic(C)
    assert quartic.degree == 4 and C2.degree == 5
    assert verify_map(phiE) and verify_map(phi2)
    X, Y = phi2.formulas
    assert sympy.simplify(X - bx**2) == 0 and sympy.simplify(Y - bx * by) == 0


def test_quartic_to_weierstrass_known_model():
    quartic, _, _, _ = split_even_octic(g3(1, 2, 3, 8, 1).curve)
    psi = quartic_to_weierstrass(quartic, 8)
    assert verify_map(psi)
    assert is_isomorphic_over_Q(psi.target, EllipticCurveQ.from_roots(-30, -35, -42))


def test_corrupted_map_is_rejected():
    C = HyperellipticModel(1, (2, 0, 0, 0, 0, 0, 1))
    _, p1, _, p2 = split_even_sextic(C)
    assert not verify_map(dataclasses.replace(p1, y_factor=2 * p1.y_factor))
    assert not verify_map(dataclasses.replace(p2, mobius=p1.mobius))
    assert verify_map(identity_map(C))


def test_wrong_degree_or_parity_rejected():
    C2 = split_even_octic(g3(1, 2, 3, 8, 1).curve)[2]
    with pytest.raises(PreconditionFailed):
        split_even_sextic(C2)
    with pytest.raises(PreconditionFailed):
        split_even_sextic(HyperellipticModel(1, (1, 1, 0, 0, 0, 0, 1)))
    with pytest.raises(PreconditionFailed):
        split_even_octic(HyperellipticModel(1, (2, 0, 0, 0, 0, 0, 1)))
    with pytest.raises(SingularCurve):
        HyperellipticModel(1, (0, 0, 1, 0, 0, 0, 1))


@pytest.mark.parametrize("lam", [2, 3, 5])
@pytest.mark.parametrize("f", [(2, 0, 0, 0, 0, 0, 1), (-6, 0, 11, 0, -6, 0, 1), (7, 0, 3, 0, 1, 0, 2)])
def test_quotient_j_invariants_stable_under_rescaling(f, lam):
    # d*lam^6 * y^2 = f(lam*x) is isomorphic to y^2 = f(x) via (lam*x, lam^3*y)
    C = HyperellipticModel(1, f)
    C2 = HyperellipticModel(lam**6, tuple(c * lam**i for i, c in enumerate(f)))
    q1 = split_even_sextic(C)
    q2 = split_even_sextic(C2)
    assert j_invariant(q1[0]) == j_invariant(q2[0])
    assert j_invariant(q1[2]) == j_invariant(q2[2])
    assert is_isomorphic_over_Q(q1[0], q2[0]) and is_isomorphic_over_Q(q1[2], q2[2])


@pytest.mark.parametrize("f", [(1, 0, 2, 0, 0, 0, 1), (4, 0, 0, 0, -5, 0, 1), (1, 0, 0, 0, 0, 0, 2)])
def test_searched_points_land_on_quotients(f):
    C = HyperellipticModel(1, f)
    _, p1, _, p2 = split_even_sextic(C)
    pts = naive_curve_search(C, 12) + infinity_points(C)
    assert pts
    for P in pts:
        assert C.contains(P)
        assert _maps_onto(p1, P) and _maps_onto(p2, P)


def test_octic_points_land_on_factors():
    inst = g3(1, 2, 3, 8, 1)
    for P in naive_curve_search(inst.curve, 15) + infinity_points(inst.curve):
        for f in inst.factors:
            assert _maps_onto(f.map, P)


@settings(max_examples=40, deadline=None)
@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6),
       st.sampled_from([1, -1, 2, 3, -5]))
def test_random_quartic_with_rational_root(r, a, b, c, d):
    # d*y^2 = (x - r)(x^3 + a x^2 + b x + c)
    g = [-r * c, c - r * b, b - r * a, a - r, 1]
    try:
        model = HyperellipticModel(d, g)
    except SingularCurve:
        assume(False)
    psi = quartic_to_weierstrass(model, r)
    assert verify_map(psi)
    for P in naive_curve_search(model, 6):
        if P.x != r:
            assert _maps_onto(psi, P)


def test_composition_is_verified():
    quartic, phiE, _, _ = split_even_octic(g3(1, 2, 3, 8, 2).curve)
    phi = compose(phiE, quartic_to_weierstrass(quartic, 16))
    assert verify_map(phi)


def test_isomorphism_detection():
    C = HyperellipticModel(1, (0, -6, 11, -6, 1))
    C2 = HyperellipticModel(4, (0, -12, 44, -48, 16))  # x -> 2x, y -> 2y
    iso = hyperelliptic_isomorphism(C, C2)
    assert iso is not None
    assert hyperelliptic_isomorphism(C, HyperellipticModel(1, (0, -6, 11, -6, 2))) is None


def test_full_torsion_family_substitution():
    # the degree-4 factor satisfies d(px - kp)((px)^3 - p^2 (px)) = p^4 d (x - k)(x^3 - x)
    X, p, k, d = sympy.symbols("X p k d")
    lhs = d * (p * X - k * p) * ((p * X) ** 3 - p**2 * (p * X))
    rhs = p**4 * d * (X - k) * (X**3 - X)
    assert sympy.expand(lhs - rhs) == 0
    # with x^3 - 1 in place of x^3 - x the identity fails
    assert sympy.expand(lhs - p**4 * d * (X - k) * (X**3 - 1)) != 0


def test_curve_point_involution():
    assert CurvePoint(sign=1).involution() == CurvePoint(sign=-1)
    P = CurvePoint(Fraction(1, 2), Fraction(3))
    assert P.involution().involution() == P
