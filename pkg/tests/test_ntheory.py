import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from birank import ntheory as nt
from birank.config import configured
from birank.errors import BudgetExceeded


@given(st.integers(min_value=-10**18, max_value=10**18).filter(lambda n: n != 0))
@settings(max_examples=200, deadline=None)
def test_factorize_matches_sympy(n):
    f = nt.factorize(n)
    assert f.value() == n
    assert dict(f.factors) == sympy.factorint(abs(n))


def test_factorize_semiprime_needs_rho():
    p, q = 1_000_000_007, 998_244_353
    assert dict(nt.factorize(p * q).factors) == {p: 1, q: 1}


def test_factorize_respects_digit_budget():
    with configured(digit_budget=10**10):
        with pytest.raises(BudgetExceeded):
            nt.factorize(10**30 + 57)


@given(st.integers(min_value=0, max_value=10**30))
@settings(max_examples=300, deadline=None)
def test_is_prime_matches_sympy(n):
    assert nt.is_prime(n) == sympy.isprime(n)


def test_primality_examples():
    assert nt.is_prime(2**61 - 1)
    assert not nt.is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7
    assert nt.is_prime(2**127 - 1)
    assert nt.primality_label(2**127 - 1) == "probable"


@given(st.integers(min_value=-10**12, max_value=10**12).filter(bool))
def test_squarefree_decompose(n):
    s, m = nt.squarefree_decompose(n)
    assert s * m * m == n
    assert nt.is_squarefree(s)


def test_squarefree_divisor_order():
    assert nt.squarefree_divisors(12) == [1, -1, 2, -2, 3, -3, 6, -6]


@given(st.integers(min_value=-500, max_value=500), st.sampled_from([3, 5, 7, 11, 13, 97, 101]))
def test_jacobi_matches_sympy(a, n):
    assert nt.jacobi(a, n) == sympy.jacobi_symbol(a, n)


@given(st.integers(min_value=0, max_value=10**6), st.sampled_from([3, 5, 13, 17, 10007, 998244353]))
def test_sqrt_mod(a, p):
    r = nt.sqrt_mod(a, p)
    if r is None:
        assert nt.jacobi(a % p, p) == -1
    else:
        assert (r * r - a) % p == 0 and r <= p - r


def _square_mod_brute(c: int, p: int) -> bool:
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    mod = p ** (v + 3)
    target = (c * p**v) % mod
    return any((t * t - target) % mod == 0 for t in range(mod))


@given(st.integers(min_value=1, max_value=300), st.sampled_from([2, 3, 5, 7]))
@settings(max_examples=150, deadline=None)
def test_padic_square_against_brute_force(c, p):
    assert nt.is_padic_square(c, p) == _square_mod_brute(c, p)
    assert nt.hensel_solvable((-c, 0, 1), p) == _square_mod_brute(c, p)


def test_padic_square_rationals_and_reals():
    assert nt.is_padic_square(Fraction(9, 4), 2)
    assert not nt.is_padic_square(Fraction(1, 2), 2)
    assert nt.is_padic_square(17, 2) and not nt.is_padic_square(5, 2)
    assert not nt.is_padic_square(-1, -1)


@given(st.integers(min_value=1, max_value=10**6), st.integers(min_value=1, max_value=10**6),
       st.sampled_from([-1, 2, 3, 5, 7]))
def test_square_class_bits_is_a_homomorphism(a, b, p):
    assert nt.square_class_bits(a * b, p) == nt.square_class_bits(a, p) ^ nt.square_class_bits(b, p)
    assert (nt.square_class_bits(a, p) == 0) == nt.is_padic_square(a, p)


def test_hensel_cubic_examples():
    assert nt.hensel_solvable((-2, 0, 0, 1), 5)  # cubing is a bijection mod 5
    assert not nt.hensel_solvable((-2, 0, 0, 1), 7)
    assert nt.hensel_solvable((0, -1, 0, 1), 3)


def test_quartic_local_points():
    # 2w^2 = 1 - 17t^4 (Lind-Reichardt) is everywhere locally solvable
    g = (2, 0, 0, 0, -34)  # w'^2 = 2(1 - 17 t^4) after scaling w' = 2w
    for p in (2, 17):
        assert nt.padic_point_on_quartic(g, p) is not None
    assert nt.real_point_on_quartic(g)
    assert nt.padic_point_on_quartic((3, 0, 0, 0, 3), 3) is None
    assert not nt.real_point_on_quartic((-1, 0, 0, 0, -1))


@given(st.integers(min_value=-20, max_value=20), st.integers(min_value=-20, max_value=20),
       st.integers(min_value=1, max_value=6), st.sampled_from([2, 3, 5, 7]))
@settings(max_examples=80, deadline=None)
def test_quartic_with_rational_point_is_locally_solvable(t0, c1, c3, p):
    # g(t) built to take a square value at t0
    base = [1, c1, 0, c3, 1]
    val = nt.poly_eval(base, t0)
    g = list(base)
    g[0] += (val * val) - val if val != 0 else 1
    if nt.poly_eval(g, t0) < 0 or not nt.is_square(nt.poly_eval(g, t0)):
        return
    assert nt.padic_point_on_quartic(g, p) is not None


def test_rational_roots_and_discriminant():
    assert nt.rational_roots((6, -5, 1)) == [2, 3]
    assert nt.rational_roots((-1, 0, 2)) == []
    assert nt.poly_discriminant((0, -9, 0, 1)) == 2916


def test_sieves():
    assert nt.primes_in_class(5, 12, 3) == [5, 17, 29]
    assert nt.squarefree_integers(5) == [1, 2, 3, 5, 6]


@given(st.integers(min_value=0, max_value=10**40), st.integers(min_value=2, max_value=7))
def test_integer_nth_root(n, k):
    r = nt.integer_nth_root(n, k)
    assert r**k <= n < (r + 1) ** k


def test_exact_root():
    assert nt.exact_root(Fraction(-27, 8), 3) == Fraction(-3, 2)
    assert nt.exact_root(2, 2) is None
    assert nt.is_cube(-8) and not nt.is_square(-4)
    assert math.isinf(nt.valuation(0, 3))
