"""Rank upper bounds by 2-descent, and rank certificates.

Full 2-descent (three rational 2-torsion points) computes the 2-Selmer
group inside (Q*/Q*^2)^2 as the classes whose localizations lie in the
image of E(Q_p)/2E(Q_p) at every bad place. Local images are generated
from rational sample points, each kept as a re-verifiable witness.

Descent via 2-isogeny (one rational 2-torsion point at (0, 0)) tests
everywhere-local solvability of d w^2 = d^2 t^4 + a d t^2 + b on both
sides of the isogeny.
"""
from __future__ import annotations

import dataclasses
import itertools
from fractions import Fraction
from typing import Sequence

from . import ntheory as nt
from .config import Deadline, get_config
from .elliptic import ECPoint, EllipticCurveQ, search_points
from .errors import Inconsistency, PrecisionExceeded
from .heights import LowerBound, rank_lower_bound

REAL = -1


@dataclasses.dataclass(frozen=True)
class LocalWitness:
    """Why a class is locally trivial-compatible at ``place``.

    ``kind`` is 'point' (x-coordinate of a Q_p-point, exact rational),
    'torsion' (image of a 2-torsion point) or 'residue-class' (a class
    x0 + p^k Z_p on the quartic, ``reversed`` meaning the chart z = 1/x).
    """

    place: int
    kind: str
    data: tuple


@dataclasses.dataclass(frozen=True)
class SelmerReport:
    method: str
    dimensions: tuple[int, ...]
    classes: tuple = ()
    rank_upper: int | None = None
    literature_tag: str | None = None
    places: tuple[int, ...] = ()
    witnesses: tuple = ()

    def __post_init__(self):
        if self.rank_upper is not None and self.rank_upper < 0:
            raise Inconsistency("negative rank upper bound")


# ---------------------------------------------------------------- full 2-descent

def _pair_class(d1, d2, p) -> tuple[int, int]:
    return nt.square_class_bits(d1, p), nt.square_class_bits(d2, p)


def _kappa(e, x: Fraction) -> tuple[Fraction, Fraction]:
    """(x - e1, x - e2) with the 2-torsion conventions."""
    e1, e2, e3 = e
    if x == e1:
        return Fraction((e1 - e2) * (e1 - e3)), Fraction(e1 - e2)
    if x == e2:
        return Fraction(e2 - e1), Fraction((e2 - e1) * (e2 - e3))
    return x - e1, x - e2


def _local_image_full(e, p: int, deadline: Deadline):
    """Image of E(Q_p) in (Q_p*/Q_p*^2)^2 with one rational witness per element."""
    expected = 2 if p == REAL else (8 if p == 2 else 4)
    image: dict[tuple[int, int], LocalWitness] = {(0, 0): LocalWitness(p, "torsion", ("O",))}
    for i, ei in enumerate(e[:3]):
        cls = _pair_class(*_kappa(e, Fraction(ei)), p)
        image.setdefault(cls, LocalWitness(p, "torsion", (f"T{i + 1}", ei)))
    if len(image) >= expected:
        return image
    e1, e2, e3 = e
    scale = max(abs(e3 - e1), 1)
    budget = get_config().local_image_samples
    tried = 0
    base = 2 if p == REAL else p
    for k in itertools.count(0):
        for u in range(1, 4 * base + 1):
            for kk in (-k, k) if k else (0,):
                for sgn in (1, -1):
                    for anchor in e:
                        t = Fraction(sgn * u) * Fraction(base) ** kk
                        if p == REAL:
                            t = t * scale / (4 * base)
                        x = anchor + t
                        tried += 1
                        if tried > budget:
                            raise PrecisionExceeded(f"local image at {p} incomplete after {budget} samples")
                        deadline.check()
                        if x in e:
                            continue
                        d1, d2 = x - e1, x - e2
                        if not nt.is_padic_square(d1 * d2 * (x - e3), p):
                            continue
                        cls = _pair_class(d1, d2, p)
                        if cls not in image:
                            image[cls] = LocalWitness(p, "point", (x,))
                            if len(image) == expected:
                                return image
        if k > 64:
            raise PrecisionExceeded(f"local image at {p} incomplete")


def verify_full_witness(e, d1: int, d2: int, w: LocalWitness) -> bool:
    """Re-check a stored local witness for the class (d1, d2)."""
    p = w.place
    if w.kind == "torsion":
        if w.data[0] == "O":
            k1, k2 = Fraction(1), Fraction(1)
        else:
            k1, k2 = _kappa(e, Fraction(w.data[1]))
    else:
        (x,) = w.data
        if not nt.is_padic_square((x - e[0]) * (x - e[1]) * (x - e[2]), p):
            return False
        k1, k2 = _kappa(e, x)
    for c in (k1 / d1, k2 / d2):
        if p == REAL:
            if c < 0:
                return False
            continue
        v = nt.valuation(c, p)
        if v % 2:
            return False
        c = c / Fraction(p) ** v
        n = c.numerator * c.denominator
        if not nt.hensel_solvable((-n, 0, 1), p):
            return False
    return True


def _nullspace_f2(rows: list[int], nbits: int) -> list[int]:
    """Basis of {v : <row, v> = 0 for all rows} over F2 (bitmask vectors)."""
    pivots: dict[int, int] = {}
    for r in rows:
        for bit, pr in pivots.items():
            if r >> bit & 1:
                r ^= pr
        if r:
            bit = r.bit_length() - 1
            for b2 in list(pivots):
                if pivots[b2] >> bit & 1:
                    pivots[b2] ^= r
            pivots[bit] = r
    free = [b for b in range(nbits) if b not in pivots]
    basis = []
    for f in free:
        v = 1 << f
        for bit, pr in pivots.items():
            if pr >> f & 1:
                v |= 1 << bit
        basis.append(v)
    return basis


def _annihilator(vectors, width: int) -> list[int]:
    return _nullspace_f2(list(vectors), width)


def _span(basis: Sequence[int]) -> list[int]:
    out = [0]
    for b in basis:
        out += [v ^ b for v in out]
    return out


def _class_sort_key(d: int):
    return abs(d), d < 0


def full_two_descent(E: EllipticCurveQ | Sequence[int]) -> SelmerReport:
    """2-Selmer group of y^2 = (x - e1)(x - e2)(x - e3), e1 < e2 < e3 integers."""
    if isinstance(E, EllipticCurveQ):
        roots = E.two_torsion_roots()
        if len(roots) != 3:
            raise ValueError("full 2-descent needs three rational 2-torsion points")
    else:
        roots = list(E)
    e = tuple(sorted(int(r) for r in roots))
    if len(set(e)) != 3:
        raise ValueError("roots must be distinct")
    deadline = Deadline("descent", get_config().timeout_descent)
    e1, e2, e3 = e
    primes = nt.prime_divisors(2 * (e1 - e2) * (e1 - e3) * (e2 - e3))
    gens = [-1] + primes
    m = len(gens)
    places = [REAL] + primes
    widths = {REAL: 1, 2: 3}
    constraints = []
    images = {}
    for p in places:
        image = _local_image_full(e, p, deadline)
        images[p] = image
        w = widths.get(p, 2)
        local = [a | (b << w) for a, b in image]
        for ann in _annihilator(local, 2 * w):
            # constraint on the 2m global bits: sum over generators of ann . loc_p(generator)
            row = 0
            for i, g in enumerate(gens):
                c1 = nt.square_class_bits(g, p)
                if bin(ann & c1).count("1") % 2:
                    row |= 1 << i
                if bin((ann >> w) & c1).count("1") % 2:
                    row |= 1 << (m + i)
            constraints.append(row)
    basis = _nullspace_f2(constraints, 2 * m)
    dim = len(basis)

    def unpack(v):
        d1 = d2 = 1
        for i, g in enumerate(gens):
            if v >> i & 1:
                d1 *= g
            if v >> (m + i) & 1:
                d2 *= g
        return d1, d2

    classes = sorted((unpack(v) for v in _span(basis)), key=lambda c: (_class_sort_key(c[0]), _class_sort_key(c[1])))
    witnesses = []
    for d1, d2 in classes:
        per = []
        for p in places:
            cls = _pair_class(d1, d2, p)
            per.append(images[p][cls])
        witnesses.append(((d1, d2), tuple(per)))
    if dim < 2:
        raise Inconsistency("Selmer group smaller than the torsion image")
    return SelmerReport("full_two_descent", (dim,), tuple(classes), dim - 2,
                        places=tuple(places), witnesses=tuple(witnesses))


# ---------------------------------------------------------------- 2-isogeny descent

def _isogeny_side(a: int, b: int, deadline: Deadline):
    """Classes d | b with d w^2 = d^2 t^4 + a d t^2 + b everywhere locally solvable."""
    primes = nt.prime_divisors(2 * b * (a * a - 4 * b))
    survivors, witnesses = [], []
    for d in nt.squarefree_divisors(b):
        deadline.check()
        # homogeneous form N^2 = d M^4 + a M^2 e^2 + (b/d) e^4
        g = (b // d, 0, a, 0, d)
        if not nt.real_point_on_quartic(g):
            continue
        wit = [LocalWitness(REAL, "real", ())]
        for p in primes:
            found = nt.padic_point_on_quartic(g, p)
            if found is None:
                break
            x0, k, flag = found
            wit.append(LocalWitness(p, "residue-class", (x0, k, bool(flag))))
        else:
            survivors.append(d)
            witnesses.append((d, tuple(wit)))
    return survivors, witnesses, primes


def _log2_exact(n: int) -> int:
    k = n.bit_length() - 1
    if 1 << k != n:
        raise Inconsistency(f"Selmer set of size {n} is not a group")
    return k


def two_isogeny_descent(E: EllipticCurveQ) -> SelmerReport:
    """Descent via the 2-isogeny of y^2 = x^3 + a x^2 + b x (2-torsion at (0, 0))."""
    if E.c != 0:
        roots = E.two_torsion_roots()
        if not roots:
            raise ValueError("no rational 2-torsion point")
        E = E.shift(-roots[0])
    a, b = E.a, E.b
    if b == 0 or a * a - 4 * b == 0:
        raise ValueError("singular model")
    deadline = Deadline("descent", get_config().timeout_descent)
    s1, w1, primes1 = _isogeny_side(a, b, deadline)
    s2, w2, primes2 = _isogeny_side(-2 * a, a * a - 4 * b, deadline)
    d1, d2 = _log2_exact(len(s1)), _log2_exact(len(s2))
    return SelmerReport(
        "two_isogeny_descent",
        (d1, d2),
        (tuple(s1), tuple(s2)),
        d1 + d2 - 2,
        places=tuple(sorted(set([REAL] + primes1 + primes2))),
        witnesses=(tuple(w1), tuple(w2)),
    )


def verify_isogeny_witness(a: int, b: int, d: int, w: LocalWitness) -> bool:
    """Re-run the certified local test inside the stored residue class."""
    g = (b // d, 0, a, 0, d)
    if w.place == REAL:
        return nt.real_point_on_quartic(g)
    x0, k, rev = w.data
    poly = list(g)[::-1] if rev else list(g)
    p = w.place
    t = nt.taylor_coefficients(poly, x0)
    v0 = nt.valuation(t[0], p)
    if v0 == float("inf"):
        return True
    e = 3 if p == 2 else 1
    spread = min((nt.valuation(c, p) + i * k for i, c in enumerate(t) if i and c), default=float("inf"))
    if spread >= v0 + e and nt.is_padic_square(t[0], p):
        return True
    mu = nt.valuation(t[1], p)
    return v0 > 2 * mu and v0 - mu >= k


# ---------------------------------------------------------------- certificates

@dataclasses.dataclass(frozen=True)
class RankCertificate:
    curve: EllipticCurveQ
    lower: LowerBound
    upper: SelmerReport | None
    reports: tuple[SelmerReport, ...]
    status: str
    rank: int | None
    conditional_on_literature: bool
    probable_primes: bool

    @property
    def r_lower(self) -> int:
        return self.lower.rank

    @property
    def r_upper(self) -> int | None:
        return None if self.upper is None else self.upper.rank_upper

    @property
    def is_exact(self) -> bool:
        return self.status == "exact"


def descent_reports(E: EllipticCurveQ) -> list[SelmerReport]:
    roots = E.two_torsion_roots()
    reports = []
    if len(roots) == 3:
        reports.append(full_two_descent(E))
    if roots:
        reports.append(two_isogeny_descent(E.shift(-roots[0])))
    return reports


def rank_certificate(E: EllipticCurveQ, search_height: int = 1000, precision: float = 1e-8,
                     literature_hint: int | None = None, literature_tag: str | None = None,
                     extra_points: Sequence[ECPoint] = ()) -> RankCertificate:
    """Combine a point search lower bound with the strongest available upper bound."""
    pts = list(extra_points) + search_points(E, search_height)
    lower = rank_lower_bound(E, pts, precision)
    reports = descent_reports(E)
    upper = min(reports, key=lambda r: r.rank_upper) if reports else None
    conditional = False
    if upper is None and literature_hint is not None:
        upper = SelmerReport("literature", (), rank_upper=literature_hint,
                             literature_tag=literature_tag or "literature rank (not verified here)")
        reports = [upper]
        conditional = True
    if upper is not None and upper.rank_upper < lower.rank:
        if upper.method == "literature":
            raise Inconsistency(f"search found {lower.rank} independent points, literature claims rank {upper.rank_upper}")
        raise Inconsistency(f"descent bound {upper.rank_upper} below {lower.rank} independent points")
    if upper is not None and upper.rank_upper == lower.rank:
        status, rank = "exact", lower.rank
    else:
        status, rank = "interval", None
    big = abs(E.cubic_discriminant) >= 2**64
    return RankCertificate(E, lower, upper, tuple(reports), status, rank, conditional, big)
