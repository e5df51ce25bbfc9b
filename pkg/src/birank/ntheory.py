"""Exact integer and rational arithmetic utilities.

Polynomials are tuples of integer coefficients in ascending degree order,
``(c0, c1, c2, ...)``.
"""
from __future__ import annotations

import dataclasses
import math
import random
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .config import get_config
from .errors import BudgetExceeded, PrecisionExceeded

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@dataclasses.dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        n = self.sign
        for p, e in self.factors:
            n *= p**e
        return n

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def exponent(self, p: int) -> int:
        return dict(self.factors).get(p, 0)


# ---------------------------------------------------------------- primality

def _miller_rabin(n: int, bases: Iterable[int]) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _strong_lucas(n: int) -> bool:
    # Selfridge parameters: first D in 5, -7, 9, -11, ... with (D/n) = -1
    D = 5
    while True:
        j = jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
        if D == 13 and is_square(n):
            return False
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    def half(v):
        return (v + n if v % 2 else v) // 2 % n

    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = half(P * U + V), half(D * U + P * V)
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        if V == 0:
            return True
        Qk = Qk * Qk % n
    return False


def is_prime(n: int) -> bool:
    """Primality of ``|n|``.

    Deterministic Miller-Rabin below 3.3e24 (covers the 2**64 range);
    Baillie-PSW above, see :func:`primality_label`.
    """
    n = abs(n)
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 3_317_044_064_679_887_385_961_981:
        return _miller_rabin(n, _SMALL_PRIMES)
    return _miller_rabin(n, (2,)) and _strong_lucas(n)


def primality_label(n: int) -> str:
    """``"proven"`` when the deterministic range applies, else ``"probable"``."""
    return "proven" if abs(n) < 2**64 else "probable"


# ---------------------------------------------------------------- factoring

def _rho_brent(n: int, rng: random.Random, budget: int) -> int:
    if n % 2 == 0:
        return 2
    spent = 0
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
            spent += r
            if spent > budget:
                raise BudgetExceeded(f"Pollard rho exceeded {budget} iterations on a {len(str(n))}-digit cofactor")
        if g == n:
            while True:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
                if g > 1:
                    break
        if g != n:
            return g


@lru_cache(maxsize=4096)
def _factorize_cached(n: int, digit_budget: int, trial: int, rho: int, seed: int) -> Factorization:
    sign = -1 if n < 0 else 1
    n = abs(n)
    if n > digit_budget:
        raise BudgetExceeded(f"|n| = {n} exceeds the factoring budget {digit_budget}")
    counts: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
    # wheel mod 30
    p, steps, i = 7, (4, 2, 4, 2, 4, 6, 2, 6), 0
    while p <= trial and p * p <= n:
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
        p += steps[i]
        i = (i + 1) % 8
    rng = random.Random(seed)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        f = _rho_brent(m, rng, rho)
        stack += [f, m // f]
    return Factorization(sign, tuple(sorted(counts.items())))


def factorize(n: int) -> Factorization:
    """Exact prime factorization of a nonzero integer."""
    if n == 0:
        raise ValueError("cannot factor 0")
    cfg = get_config()
    return _factorize_cached(n, cfg.digit_budget, cfg.trial_division_bound, cfg.rho_iterations, cfg.seed)


def prime_divisors(n: int) -> list[int]:
    return factorize(n).primes() if n else []


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return ``(s, m)`` with ``n = s*m**2`` and ``s`` squarefree (sign on ``s``)."""
    f = factorize(n)
    s, m = f.sign, 1
    for p, e in f.factors:
        if e % 2:
            s *= p
        m *= p ** (e // 2)
    return s, m


def squarefree_part(n: int | Fraction) -> int:
    """Squarefree integer in the same square class as the nonzero rational ``n``."""
    n = Fraction(n)
    return squarefree_decompose(n.numerator * n.denominator)[0]


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for _, e in factorize(n).factors)


def squarefree_divisors(n: int, signed: bool = True) -> list[int]:
    """Squarefree divisors of ``n`` ordered by absolute value, ``+`` before ``-``."""
    ps = prime_divisors(n)
    divs = [1]
    for p in ps:
        divs += [d * p for d in divs]
    divs.sort()
    if not signed:
        return divs
    return [s * d for d in divs for s in (1, -1)]


# ---------------------------------------------------------------- powers

def integer_nth_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def exact_root(q: int | Fraction, k: int) -> Fraction | None:
    """The rational k-th root of ``q`` if one exists (real root for odd k)."""
    q = Fraction(q)
    if q < 0:
        if k % 2 == 0:
            return None
        r = exact_root(-q, k)
        return None if r is None else -r
    num = integer_nth_root(q.numerator, k)
    den = integer_nth_root(q.denominator, k)
    if num**k == q.numerator and den**k == q.denominator:
        return Fraction(num, den)
    return None


def is_square(n: int | Fraction) -> bool:
    return exact_root(n, 2) is not None


def is_cube(n: int | Fraction) -> bool:
    return exact_root(n, 3) is not None


# ---------------------------------------------------------------- residues

def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def sqrt_mod(a: int, p: int) -> int | None:
    """Square root of ``a`` modulo the odd prime ``p`` (Tonelli-Shanks).

    Returns the representative in ``[0, (p-1)/2]`` or ``None``.
    """
    a %= p
    if a == 0:
        return 0
    if jacobi(a, p) != 1:
        return None
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while jacobi(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return min(r, p - r)


def valuation(n: int | Fraction, p: int) -> float | int:
    """p-adic valuation; ``math.inf`` for zero."""
    n = Fraction(n)
    if n == 0:
        return math.inf
    v, num, den = 0, n.numerator, n.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _unit_part(n: Fraction, p: int) -> int:
    """An integer congruent to the p-adic unit part of n mod p**3."""
    v = valuation(n, p)
    n = n / Fraction(p) ** v
    mod = p**3
    return n.numerator * pow(n.denominator, -1, mod) % mod


def is_padic_square(c: int | Fraction, p: int) -> bool:
    """Whether the rational ``c`` is a square in Q_p (``p = -1`` means R)."""
    c = Fraction(c)
    if c == 0:
        return True
    if p == -1:
        return c > 0
    if valuation(c, p) % 2:
        return False
    u = _unit_part(c, p)
    if p == 2:
        return u % 8 == 1
    return jacobi(u % p, p) == 1


def square_class_bits(c: int | Fraction, p: int) -> int:
    """Image of ``c`` in Q_p*/Q_p*^2 as an F2-vector packed into an int.

    R: 1 bit (sign). Odd p: (valuation parity, non-residue). p = 2:
    (valuation parity, u = 3 mod 4, u = 3 or 5 mod 8).
    """
    c = Fraction(c)
    if c == 0:
        raise ValueError("zero has no square class")
    if p == -1:
        return int(c < 0)
    v = valuation(c, p) % 2
    u = _unit_part(c, p)
    if p == 2:
        return v | ((u % 4 == 3) << 1) | ((u % 8 in (3, 5)) << 2)
    return v | ((jacobi(u % p, p) == -1) << 1)


# ---------------------------------------------------------------- polynomials

def poly_eval(f: Sequence[int], x):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def taylor_coefficients(f: Sequence[int], x0: int) -> list[int]:
    """Coefficients of f(x0 + t) in t."""
    out = list(f)
    n = len(out)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] += x0 * out[j + 1]
    return out


def rational_roots(f: Sequence[int | Fraction]) -> list[Fraction]:
    """Distinct rational roots of a nonzero polynomial, ascending."""
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) for c in reversed(f)], x, domain="QQ")
    return sorted(Fraction(int(r.p), int(r.q)) for r in poly.ground_roots())


def poly_discriminant(f: Sequence[int]) -> int:
    import sympy

    x = sympy.Symbol("x")
    return int(sympy.discriminant(sympy.Poly(list(reversed(f)), x)))


def hensel_solvable(f: Sequence[int], p: int, unit: bool = False, precision: int | None = None) -> bool:
    """Whether ``f`` has a root in Z_p (in Z_p^* when ``unit``).

    Residue classes ``x0 + p^k Z_p`` are refined until each is either
    root-free (constant valuation on the class) or certified to contain a
    root by Hensel's lemma ``v(f(x0)) > 2 v(f'(x0))``.
    """
    f = tuple(int(c) for c in f)
    while len(f) > 1 and f[-1] == 0:
        f = f[:-1]
    if not any(f):
        raise ValueError("zero polynomial")
    if len(f) == 1:
        return False
    if precision is None:
        disc = poly_discriminant(f) if len(f) > 2 else 1
        vd = valuation(disc, p) if disc else 2 * (len(f) + 10)
        precision = 2 * vd + get_config().padic_extra_precision
    stack = [(x0, 1) for x0 in range(p) if not (unit and x0 == 0)]
    while stack:
        x0, k = stack.pop()
        t = taylor_coefficients(f, x0)
        v0 = valuation(t[0], p)
        if v0 == math.inf:
            return True
        spread = min((valuation(c, p) + i * k for i, c in enumerate(t) if i and c), default=math.inf)
        if v0 < spread:
            continue
        mu = valuation(t[1], p)
        if v0 > 2 * mu and v0 - mu >= k:
            return True
        if k >= precision:
            raise PrecisionExceeded(f"no verdict for root existence mod {p}^{k}")
        pk = p**k
        stack.extend((x0 + j * pk, k + 1) for j in range(p))
    return False


def padic_point_on_quartic(g: Sequence[int], p: int, max_depth: int = 60) -> tuple[int, int, int] | None:
    """Find a Q_p-point on the projective curve ``y^2 = g(x)`` (deg g <= 4).

    Returns a witness ``(x0, k, flag)``: every x in ``x0 + p^k Z_p`` (or,
    when ``flag`` is 1, every ``z = 1/x`` in that class for the reversed
    quartic) yields a square ``g(x)``, or the class contains a root of
    ``g``. Returns ``None`` when no point exists.
    """
    g = list(g) + [0] * (5 - len(g))
    e = 3 if p == 2 else 1
    for flag, poly, start in ((0, g, (0, 0)), (1, g[::-1], (0, 1))):
        stack = [start]
        while stack:
            x0, k = stack.pop()
            t = taylor_coefficients(poly, x0)
            v0 = valuation(t[0], p)
            if v0 == math.inf:
                return x0, k, flag
            spread = min((valuation(c, p) + i * k for i, c in enumerate(t) if i and c), default=math.inf)
            if spread >= v0 + e:
                if is_padic_square(t[0], p):
                    return x0, k, flag
                continue
            mu = valuation(t[1], p)
            if v0 > 2 * mu and v0 - mu >= k:
                return x0, k, flag
            if k >= max_depth:
                raise PrecisionExceeded(f"local solvability at {p} undecided at depth {k}")
            pk = p**k
            stack.extend((x0 + j * pk, k + 1) for j in range(p))
    return None


def real_point_on_quartic(g: Sequence[int]) -> bool:
    """Whether ``y^2 = g(x)`` has a real point (projectively)."""
    import sympy

    g = list(g)
    while g and g[-1] == 0:
        g.pop()
    if len(g) < 5 or g[-1] > 0:
        return True
    x = sympy.Symbol("x")
    return sympy.Poly(list(reversed(g)), x).count_roots() > 0


# ---------------------------------------------------------------- sieving

def primes_in_class(residue: int, modulus: int, count: int, start: int = 2) -> list[int]:
    """The first ``count`` primes ``>= start`` congruent to ``residue`` mod ``modulus``."""
    if math.gcd(residue, modulus) != 1:
        raise ValueError("residue and modulus must be coprime")
    n = max(start, 2)
    n += (residue - n) % modulus
    out = []
    while len(out) < count:
        if is_prime(n):
            out.append(n)
        n += modulus
    return out


def squarefree_integers(count: int, start: int = 1) -> list[int]:
    """The first ``count`` squarefree integers ``>= start``."""
    out, n = [], max(start, 1)
    while len(out) < count:
        if is_squarefree(n):
            out.append(n)
        n += 1
    return out
