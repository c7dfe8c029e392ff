"""Infinitude of Whitehead groups of Z x Z/n and simple-structure verdicts.

Wh(Z x G) splits (Bass-Heller-Swan) as Wh(G) + K~_0(Z[G]) + Nil~_1 + Nil~_1.
For G = Z/n the first summand has rank floor(n/2) + 1 - d(n), the second is
finite, and the Nil terms are infinite exactly when n is not squarefree.
Non-cyclic groups only enter through a small fact table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from .groupring import GroupSpec
from .reports import Report

__all__ = [
    "Unsupported", "wh_rank_cyclic", "nil_infinite", "WhReport", "bhs_is_infinite",
    "SpaceSpec", "structures_verdict", "automorphism_count",
]

CITE_MILNOR = ("Wh(Z/n) has rank (#irreducible real reps) - (#irreducible rational reps) "
               "and is infinite iff n not in {1,2,3,4,6} [Milnor 1966, Cor. 6.5]")
CITE_NIL = "Nil~_1(Z[Z/n]) is nonzero, and then infinite, iff n is not squarefree [Nagy-Nicholson-Powell, Thm. 5.8]"
CITE_SWAN = "K~_0(Z[G]) is finite for every finite group G [Swan 1960, Prop. 9.1]"
CITE_BHS = "Bass-Heller-Swan: Wh(Z x G) = Wh(G) + K~_0(Z[G]) + Nil~_1(Z[G]) + Nil~_1(Z[G]) [Bass 1968]"
CITE_Q8 = "Nil~_1(Z[Q_8]) is infinite [Guaschi et al. 2018, Prop. 52]"
CITE_STRUCTURES = ("Simple structures correspond to orbits of Wh_1(X) under self-equivalences; for nilpotent X with "
                   "infinite pi_1, self-equivalences fixing pi_1 are simple, so with Aut(pi_1) finite every orbit is "
                   "finite and an infinite Wh_1 yields infinitely many structures")
CITE_PU = "pi_1(U(n)/mu_n) = Z x Z/n: det splits off the circle and the kernel PSU(n) has pi_1 = Z/n"


class Unsupported(ValueError):
    """A group outside the families this module can decide."""


def _check_n(n):
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")


def divisor_count(n: int) -> int:
    _check_n(n)
    count = 0
    i = 1
    while i * i <= n:
        if n % i == 0:
            count += 1 if i * i == n else 2
        i += 1
    return count


def wh_rank_cyclic(n: int) -> int:
    """Rank of Wh(Z/n): floor(n/2) + 1 - d(n)."""
    _check_n(n)
    return n // 2 + 1 - divisor_count(n)


def is_squarefree(n: int) -> bool:
    _check_n(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def nil_infinite(n: int) -> bool:
    return not is_squarefree(n)


@dataclass
class WhReport:
    n: int
    wh_rank: int
    nil_infinite: bool
    k0_finite: bool = True
    total_infinite: bool = False
    reasons: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.total_infinite != (self.wh_rank > 0 or self.nil_infinite):
            raise ValueError("total_infinite must equal (wh_rank > 0 or nil_infinite)")

    def to_json(self) -> dict:
        return {"n": self.n, "wh_rank": self.wh_rank, "nil_infinite": self.nil_infinite,
                "k0_finite": self.k0_finite, "total_infinite": self.total_infinite,
                "reasons": list(self.reasons)}


def bhs_is_infinite(n: int) -> WhReport:
    """Is Wh(Z x Z/n) infinite?"""
    rank = wh_rank_cyclic(n)
    nil = nil_infinite(n)
    reasons = [CITE_BHS, CITE_SWAN]
    if rank > 0:
        reasons.append(f"Wh rank: rank Wh(Z/{n}) = {rank} > 0; " + CITE_MILNOR)
    if nil:
        reasons.append(f"Nil: {n} is not squarefree; " + CITE_NIL)
    if not rank and not nil:
        reasons.append(f"Wh(Z/{n}) is finite (rank 0) and {n} is squarefree; " + CITE_MILNOR + "; " + CITE_NIL)
    return WhReport(n, rank, nil, True, rank > 0 or nil, reasons)


def euler_phi(n: int) -> int:
    _check_n(n)
    out, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


def automorphism_count(spec: GroupSpec) -> Optional[int]:
    """|Aut(G)| for G = Z x Z/n or Z; None when Aut(G) is infinite or not covered.

    An automorphism of Z x Z/n sends t to +-t + a (a in Z/n) and the torsion
    generator to a unit multiple of itself, so |Aut| = 2 n phi(n).
    """
    if spec.free_rank >= 2:
        return None
    if spec.free_rank == 1 and not spec.torsion:
        return 2
    if spec.free_rank == 1 and len(spec.torsion) == 1:
        n = spec.torsion[0]
        return 2 * n * euler_phi(n)
    return None


FAMILIES = ("lens_times_circle", "q8_times_circle", "projective_unitary", "custom")


@dataclass
class SpaceSpec:
    """One of the example families; ``pi1`` is derived from the family."""

    family: str
    p: Optional[int] = None
    n: Optional[int] = None
    group: Optional[GroupSpec] = None
    nilpotent: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.family == "lens_times_circle":
            _check_n(self.p)
        if self.family == "projective_unitary":
            _check_n(self.n)
        if self.family == "custom" and self.group is None:
            raise ValueError("custom family needs a group")

    @property
    def pi1(self):
        if self.family == "lens_times_circle":
            return GroupSpec(1, (self.p,) if self.p > 1 else ())
        if self.family == "projective_unitary":
            return GroupSpec(1, (self.n,) if self.n > 1 else ())
        if self.family == "q8_times_circle":
            return "Z x Q8"
        return self.group

    def describe(self) -> str:
        if self.family == "lens_times_circle":
            return f"S^1 x L({self.p}; q)"
        if self.family == "projective_unitary":
            return f"U({self.n})/mu_{self.n}"
        if self.family == "q8_times_circle":
            return "S^1 x S^3/Q8"
        return f"space with pi_1 = {self.group}"

    def to_json(self) -> dict:
        out = {"family": self.family}
        if self.p is not None:
            out["p"] = self.p
        if self.n is not None:
            out["n"] = self.n
        if self.group is not None:
            out["group"] = self.group.to_json()
        return out


# Z x Q8: Aut(Q8) = S4 (24), t -> t^{+-1} z with z central in Q8 (2 x 2)
Q8_FACTS = {"wh_infinite": True, "aut_order": 96, "nilpotent": True, "reasons": [CITE_BHS, CITE_Q8]}


def _abelian_facts(pi1: GroupSpec):
    if pi1.free_rank == 0:
        return {"pi1_infinite": False, "wh_infinite": None, "aut_order": None, "reasons": []}
    if pi1.free_rank >= 2:
        return {"pi1_infinite": True, "wh_infinite": None, "aut_order": None,
                "reasons": [f"Aut({pi1}) contains GL_{pi1.free_rank}(Z), which is infinite"]}
    if len(pi1.torsion) > 1:
        raise Unsupported(f"Whitehead group of {pi1} is not decided here (only Z x Z/n)")
    n = pi1.torsion[0] if pi1.torsion else 1
    rep = bhs_is_infinite(n)
    return {"pi1_infinite": True, "wh_infinite": rep.total_infinite, "aut_order": automorphism_count(pi1),
            "reasons": rep.reasons, "bhs": rep.to_json()}


def structures_verdict(s: SpaceSpec) -> Report:
    """Check the three hypotheses that force infinitely many simple structures."""
    if s.family == "q8_times_circle":
        facts = dict(Q8_FACTS, pi1_infinite=True)
    else:
        facts = _abelian_facts(s.pi1)
        facts["nilpotent"] = s.nilpotent
    reasons = list(facts["reasons"])
    if s.family == "projective_unitary":
        reasons.append(CITE_PU)
    failing = []
    if not facts["pi1_infinite"]:
        failing.append("pi_1 is finite")
    else:
        if facts["aut_order"] is None:
            failing.append("Aut(pi_1) is infinite")
        if facts["wh_infinite"] is False:
            failing.append("Wh_1 is finite")
        elif facts["wh_infinite"] is None:
            failing.append("Wh_1 is not decided for this group")
    if not facts["nilpotent"]:
        failing.append("the space is not nilpotent")
    ok = not failing
    data = {
        "space": s.describe(),
        "family": s.to_json(),
        "pi1": s.pi1 if isinstance(s.pi1, str) else s.pi1.to_json(),
        "hypotheses": {
            "wh_infinite": facts["wh_infinite"],
            "pi1_infinite": facts["pi1_infinite"],
            "aut_finite": facts["aut_order"] is not None,
            "aut_order": facts["aut_order"],
            "nilpotent": facts["nilpotent"],
        },
        "failing": failing,
    }
    if "bhs" in facts:
        data["bhs"] = facts["bhs"]
    verdict = "infinitely many simple structures" if ok else "criterion not satisfied"
    return Report(verdict, data, [CITE_STRUCTURES] + reasons, [])
