import pytest

from birank.elliptic import EllipticCurveQ, add, point, search_points, torsion_subgroup
from birank.heights import (
    canonical_height,
    determinant_with_error,
    doubling_height_oracle,
    gram_matrix,
    height_pairing,
    rank_lower_bound,
)

CURVES = [EllipticCurveQ.mordell(s) for s in (9, 17, -2, 225, 343)] + [
    EllipticCurveQ(0, -25, 0), EllipticCurveQ(0, -36, 0), EllipticCurveQ.from_roots(-30, -35, -42)]


def _nontorsion(E, H=400, n=3):
    tors = set(torsion_subgroup(E).points)
    return [P for P in search_points(E, H) if P not in tors][:n]


def test_known_value():
    h = canonical_height(EllipticCurveQ.mordell(9), point(-2, 1), 1e-12)
    assert abs(float(h.value) - 0.407347720283413) < 1e-12


@pytest.mark.parametrize("E", CURVES, ids=str)
def test_against_doubling_oracle(E):
    for P in _nontorsion(E):
        h = canonical_height(E, P, 1e-10)
        assert abs(float(h.value) - doubling_height_oracle(E, P, 6)) < 5e-3


@pytest.mark.parametrize("E", CURVES, ids=str)
def test_quadratic_scaling_and_error_bound(E):
    for P in _nontorsion(E, n=2):
        h1 = canonical_height(E, P, 1e-12)
        h2 = canonical_height(E, add(E, P, P), 1e-12)
        assert abs(h2.value - 4 * h1.value) <= h2.error + 4 * h1.error


@pytest.mark.parametrize("E", CURVES[:4], ids=str)
def test_parallelogram_law(E):
    pts = _nontorsion(E, n=2)
    if len(pts) < 2:
        pytest.skip("needs two points")
    P, Q = pts
    hs = canonical_height(E, add(E, P, Q), 1e-11).value
    hd = canonical_height(E, add(E, P, point(Q.x, -Q.y)), 1e-11).value
    hp, hq = canonical_height(E, P, 1e-11).value, canonical_height(E, Q, 1e-11).value
    assert abs(hs + hd - 2 * hp - 2 * hq) < 1e-9


def test_torsion_translation_invariance():
    E = EllipticCurveQ(0, -36, 0)
    P = _nontorsion(E, n=1)[0]
    for T in torsion_subgroup(E).points:
        assert abs(canonical_height(E, add(E, P, T), 1e-11).value - canonical_height(E, P, 1e-11).value) < 1e-9
        assert canonical_height(E, T).value == 0


def test_pairing_symmetric_and_gram():
    E = EllipticCurveQ.mordell(225)
    P, Q = point(-5, 10), point(4, 17)
    assert abs(height_pairing(E, P, Q).value - height_pairing(E, Q, P).value) < 1e-12
    G, eps = gram_matrix(E, [P, Q])
    det, err = determinant_with_error(G, eps)
    assert det > 1e-3 and err < 1e-6


def test_rank_lower_bound_detects_dependence():
    E = EllipticCurveQ.mordell(225)
    P, Q = point(-5, 10), point(4, 17)
    lb = rank_lower_bound(E, [P, add(E, P, P), Q, add(E, P, Q)])
    assert lb.rank == 2
    assert lb.points == (P, Q)
