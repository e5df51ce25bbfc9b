import pytest
from hypothesis import given, settings, strategies as st

from birank import families as fam
from birank import ntheory as nt
from birank.bielliptic import hyperelliptic_isomorphism, verify_map
from birank.elliptic import EllipticCurveQ, is_isomorphic_over_Q
from birank.errors import ParameterViolation


def test_no_two_torsion_factors():
    inst = fam.g2_no_two_torsion(3, 2)
    E_D, E_fixed = inst.factors
    assert is_isomorphic_over_Q(E_D.curve, EllipticCurveQ.mordell(24))
    assert is_isomorphic_over_Q(E_fixed.curve, EllipticCurveQ.mordell(9))
    assert inst.expected_rank.value == 1


@pytest.mark.parametrize("a", [2, 3, 15])
def test_fixed_factor_independent_of_m(a):
    curves = [fam.g2_no_two_torsion(a, m).factors[1].curve for m in (1, 2, 3, 5, 6)]
    for E in curves[1:]:
        assert is_isomorphic_over_Q(curves[0], E)


@pytest.mark.parametrize("call,constraint", [
    (lambda: fam.g2_no_two_torsion(8, 1), "a not a perfect cube"),
    (lambda: fam.g2_no_two_torsion(3, 4), "m squarefree"),
    (lambda: fam.g2_partial(1, 13), "p = 5 mod 12, or p = 3 mod 4 and p > 3"),
    (lambda: fam.g2_partial(5, 5), "p does not divide d"),
    (lambda: fam.g2_partial(4, 5), "d squarefree"),
    (lambda: fam.g2_full(1, 2, 5), "p = 3 mod 8"),
    (lambda: fam.g2_full(1, 1, 3), "k not in {-1, 0, 1}"),
    (lambda: fam.g3(1, 2, 2, 8, 1), "a, b, c, d distinct"),
    (lambda: fam.g3(1, 2, 3, 8, 4), "D squarefree"),
])
def test_parameter_violations(call, constraint):
    with pytest.raises(ParameterViolation) as exc:
        call()
    assert exc.value.constraint == constraint


def test_partial_ranks_by_class():
    assert fam.g2_partial(1, 5).expected_rank.value == 0
    assert fam.g2_partial(1, 7).expected_rank.value == 1
    assert fam.partial_class(17) == "5mod12" and fam.partial_class(11) == "3mod4"
    assert fam.partial_class(3) is None and fam.partial_class(13) is None


def test_partial_factor_matches():
    inst = fam.g2_partial(2, 17)
    assert all(ok for f in inst.factors for _, ok in f.matches)


def test_full_torsion_quotients():
    for p in (3, 11, 19):
        inst = fam.g2_full(1, 2, p)
        even, rev = inst.factors
        assert dict(even.matches)["y^2 = x^3 - x"]
        assert dict(rev.matches)["E'_{2,d,kp}"]


def test_full_torsion_curve_roots():
    E = fam.full_torsion_curve(1, 2)
    assert is_isomorphic_over_Q(E, EllipticCurveQ.from_roots(-2, -3, -6))


@pytest.mark.parametrize("D", [1, 2, 3, 5])
def test_g3_factors(D):
    inst = fam.g3(1, 2, 3, 8, D)
    assert all(verify_map(f.map) for f in inst.factors)
    assert is_isomorphic_over_Q(inst.factors[0].curve, fam.pairwise_root_curve(1, 2, 3, 8, D))


def test_g3_genus2_factor_constant_in_D():
    base = fam.genus2_model(1, 2, 3, 8)
    for D in (1, 2, 3, 5, 6):
        assert hyperelliptic_isomorphism(fam.g3(1, 2, 3, 8, D).factors[1].curve, base) is not None


def test_batches_follow_sieves():
    assert [i.param_dict["p"] for i in fam.family_batch(fam.G2_PARTIAL, 3, d=1)] == [5, 17, 29]
    assert [i.param_dict["p"] for i in fam.family_batch(fam.G2_PARTIAL, 3, d=1, cls="3mod4")] == [7, 11, 19]
    assert [i.param_dict["m"] for i in fam.family_batch(fam.G2_NO2TORS, 3, a=3)] == [1, 2, 3]
    assert [i.param_dict["D"] for i in fam.family_batch(fam.G3, 2, abcd=(1, 2, 3, 8))] == [1, 2]
    assert [i.param_dict["p"] for i in fam.family_batch(fam.G2_FULL, 3, d=1, k=2)] == [3, 11, 19]


def test_bad_reduction_contains_parameter_prime():
    for p in (5, 17, 29, 41, 53):
        bad = fam.bad_reduction_set(fam.g2_partial(1, p).curve)
        assert 2 in bad and p in bad and 3 in bad


def test_bad_reduction_good_primes():
    # y^2 = x^6 + 1: discriminant is -2^6 * 3^6... only 2 and 3 can be bad
    from birank.bielliptic import HyperellipticModel
    bad = fam.bad_reduction_set(HyperellipticModel(1, (1, 0, 0, 0, 0, 0, 1)))
    assert bad <= {2, 3}


def test_non_isomorphy_certificate():
    insts = fam.family_batch(fam.G2_PARTIAL, 5, d=1)
    cert = fam.non_isomorphy_certificate(insts)
    assert len(cert.pairs) == 10 and cert.all_distinguished
    same = fam.non_isomorphy_certificate([insts[0], insts[0]])
    assert not same.all_distinguished


def test_rank_tables():
    assert [fam.corollary22_params(r).a for r in range(5)] == [2, 3, 15, 427, 244283]
    assert fam.corollary32_params(0) == (1, 2, 3, 8)
    for r in range(3):
        assert fam.square_triple_check(*fam.corollary32_params(r))
    assert not fam.square_triple_check(1, 2, 3, 4)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-40, 40), min_size=4, max_size=4, unique=True))
def test_square_triple_products(vals):
    prods = fam.square_triple_products(*vals)
    assert fam.square_triple_check(*vals) == (not any(nt.is_square(v) for v in prods))
    # products are unchanged when every parameter is shifted
    assert fam.square_triple_products(*(v + 7 for v in vals)) == prods
