"""Torsion values: determinant representatives in K_1 and their Whitehead classes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .groupring import GroupSpec, RingElement, gr_inverse, is_trivial_unit


class NotAUnit(ValueError):
    pass


@dataclass(frozen=True)
class K1Class:
    """A class in K_1(Z[G]) represented by its determinant.

    SK_1 is not modelled: two classes with the same determinant are identified.
    """

    det: RingElement
    over: GroupSpec
    inverse: Optional[RingElement] = None

    def __post_init__(self):
        if self.det.spec != self.over:
            raise ValueError("determinant lives over a different group ring")
        if self.inverse is None:
            inv = gr_inverse(self.det)
            if inv is None:
                raise NotAUnit(f"no inverse found for determinant {self.det!r}")
            object.__setattr__(self, "inverse", inv)
        elif not (self.det * self.inverse).is_one():
            raise NotAUnit("supplied inverse does not invert the determinant")

    @classmethod
    def of(cls, det: RingElement) -> "K1Class":
        return cls(det, det.spec)

    def __mul__(self, other: "K1Class") -> "K1Class":
        return K1Class(self.det * other.det, self.over, self.inverse * other.inverse)

    def is_identity(self) -> bool:
        return self.det.is_one()

    def is_trivial_unit(self) -> bool:
        return is_trivial_unit(self.det)


@dataclass(frozen=True)
class WhClass:
    canonical: RingElement

    def is_trivial(self) -> bool:
        return self.canonical.is_one()


def canonical_associate(u: RingElement) -> RingElement:
    """Normal form of u modulo multiplication by trivial units +-g.

    Free exponents are shifted so that each coordinate's minimum over the support
    is 0; the sign makes the first coefficient positive; among the remaining
    torsion translates the one with the least sorted term list wins.
    """
    spec = u.spec
    if u.is_zero():
        return u
    r = spec.free_rank
    shift = [-min(k[i] for k in u.support()) for i in range(r)]
    best = None
    for t in spec.torsion_elements():
        v = u.shift(tuple(shift) + tuple(t))
        first = next(iter(v.items()))[1]
        if first < 0:
            v = -v
        if best is None or v.sort_key() < best.sort_key():
            best = v
    return best


def to_whitehead(c: K1Class) -> WhClass:
    return WhClass(canonical_associate(c.det))
