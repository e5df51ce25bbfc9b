"""Jacobian rank of a family instance as the sum of its factor ranks."""
from __future__ import annotations

import dataclasses
from typing import Mapping

from .descent import RankCertificate, rank_certificate
from .elliptic import EllipticCurveQ, is_isomorphic_over_Q
from .families import ELLIPTIC_RANKS, GENUS2_RANKS, FamilyInstance, G3


@dataclasses.dataclass(frozen=True)
class FactorRank:
    role: str
    lower: int
    upper: int | None
    provenance: str
    certificate: RankCertificate | None = None
    note: str = ""


@dataclasses.dataclass(frozen=True)
class JacobianRank:
    instance: FamilyInstance
    factors: tuple[FactorRank, ...]
    lower: int
    upper: int | None
    conditional_on_literature: bool

    @property
    def status(self) -> str:
        return "exact" if self.upper == self.lower else "interval"

    @property
    def rank(self) -> int | None:
        return self.lower if self.status == "exact" else None

    def certificates(self) -> dict[str, RankCertificate]:
        return {f.role: f.certificate for f in self.factors if f.certificate is not None}


def literature_rank(E: EllipticCurveQ) -> tuple[int, str] | None:
    for key, (r, _, note) in ELLIPTIC_RANKS.items():
        if is_isomorphic_over_Q(E, EllipticCurveQ(*key)) is not None:
            return r, note
    return None


def jacobian_rank(instance: FamilyInstance, search_height: int = 1000, precision: float = 1e-8,
                  genus2_rank: int | None = None, hints: Mapping[str, int] | None = None) -> JacobianRank:
    """Certify each factor and add. ``hints`` maps a factor role to a literature rank."""
    hints = dict(hints or {})
    out = []
    for f in instance.factors:
        if isinstance(f.curve, EllipticCurveQ):
            hint, tag = hints.get(f.role), "supplied literature rank"
            if hint is None and (lit := literature_rank(f.curve)) is not None:
                hint, tag = lit
            cert = rank_certificate(f.curve, search_height, precision, literature_hint=hint, literature_tag=tag)
            prov = "literature" if cert.conditional_on_literature else "computed"
            out.append(FactorRank(f.role, cert.r_lower, cert.r_upper, prov, cert))
        else:
            r = genus2_rank
            note = "supplied literature rank"
            if r is None and instance.tag == G3:
                key = tuple(instance.param_dict[k] for k in "abcd")
                if key in GENUS2_RANKS:
                    r, _, note = GENUS2_RANKS[key]
            if r is None:
                out.append(FactorRank(f.role, 0, None, "unknown", note="no rank information for this factor"))
            else:
                out.append(FactorRank(f.role, r, r, "literature", note=note))
    lower = sum(f.lower for f in out)
    upper = None if any(f.upper is None for f in out) else sum(f.upper for f in out)
    conditional = any(f.provenance == "literature" for f in out)
    return JacobianRank(instance, tuple(out), lower, upper, conditional)
