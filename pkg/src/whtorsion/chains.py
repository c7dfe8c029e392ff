"""Bounded based free chain complexes over Z[G].

Conventions (fixed once, everything downstream is stated relative to them):

* ``d_k : C_k -> C_{k-1}`` is a matrix acting on column vectors.
* A graded map of degree ``s`` sends ``C_k`` to ``D_{k+s}``.  Its graded
  commutator with the differentials is ``[d, phi] = d phi - (-1)^s phi d``.
* A homotopy ``h`` between chain maps ``f, f'`` satisfies ``dh + hd = f - f'``.
* ``cone(f)_k = D_k (+) C_{k-1}`` with differential ``[[d_D, f], [0, -d_C]]``,
  the D-block listed first.
* The torsion matrix of an acyclic complex is ``d + delta`` restricted to
  ``C_odd -> C_even``, both sides concatenated in ascending degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .groupring import GroupSpec, RingElement, RingMatrix, block_matrix, gr_det, include
from .k1 import K1Class


class InvariantError(ValueError):
    """A structural identity (d^2 = 0, chain map, homotopy) fails."""


class ContractionFailure(RuntimeError):
    """No valid contraction could be assembled from an equivalence pack."""


class NotAcyclic(ValueError):
    pass


class BasedComplex:
    """Free based complex concentrated in degrees ``lo..hi``."""

    def __init__(self, spec: GroupSpec, lo: int, hi: int, ranks: Sequence[int],
                 diffs: Optional[Dict[int, RingMatrix]] = None):
        if hi < lo:
            raise ValueError("empty degree range")
        if len(ranks) != hi - lo + 1 or any(r < 0 for r in ranks):
            raise ValueError("ranks must list one non-negative rank per degree")
        self.spec = spec
        self.lo = lo
        self.hi = hi
        self.ranks = tuple(ranks)
        self.diffs: Dict[int, RingMatrix] = {}
        diffs = diffs or {}
        for k in diffs:
            if not lo < k <= hi:
                raise ValueError(f"differential d_{k} lies outside degrees {lo}..{hi}")
        for k in range(lo + 1, hi + 1):
            m = diffs.get(k)
            shape = (self.rank(k - 1), self.rank(k))
            if m is None:
                m = RingMatrix.zeros(spec, *shape)
            if m.shape != shape:
                raise ValueError(f"d_{k} has shape {m.shape}, expected {shape}")
            if m.spec != spec:
                raise ValueError(f"d_{k} lives over {m.spec}, not {spec}")
            self.diffs[k] = m

    def rank(self, k: int) -> int:
        if self.lo <= k <= self.hi:
            return self.ranks[k - self.lo]
        return 0

    def d(self, k: int) -> RingMatrix:
        m = self.diffs.get(k)
        if m is None:
            return RingMatrix.zeros(self.spec, self.rank(k - 1), self.rank(k))
        return m

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def differential(self) -> "GradedMap":
        return GradedMap(self, self, -1, {k: self.d(k) for k in self.degrees()})

    def identity(self) -> "ChainMap":
        return ChainMap(self, self, {k: RingMatrix.identity(self.spec, self.rank(k)) for k in self.degrees()},
                        check=False)

    def zero_map(self, target: "BasedComplex", degree: int = 0) -> "GradedMap":
        return GradedMap(self, target, degree, {})

    def euler_characteristic(self) -> int:
        return sum((-1) ** (k % 2) * self.rank(k) for k in self.degrees())

    def __eq__(self, other):
        if not isinstance(other, BasedComplex):
            return NotImplemented
        return (self.spec == other.spec and self.lo == other.lo and self.hi == other.hi
                and self.ranks == other.ranks and self.diffs == other.diffs)

    def __hash__(self):
        return hash((self.lo, self.hi, self.ranks))

    def __repr__(self):
        return f"BasedComplex({self.spec}, degrees {self.lo}..{self.hi}, ranks {list(self.ranks)})"

    def to_json(self) -> dict:
        return {
            "group": self.spec.to_json(),
            "degrees": [self.lo, self.hi],
            "ranks": list(self.ranks),
            "diffs": [self.d(k).to_json() for k in range(self.lo + 1, self.hi + 1)],
        }

    @classmethod
    def from_json(cls, obj) -> "BasedComplex":
        spec = GroupSpec.from_json(obj["group"])
        lo, hi = obj["degrees"]
        ranks = obj["ranks"]
        mats = obj.get("diffs", [])
        if len(mats) != hi - lo:
            raise ValueError(f"expected {hi - lo} differentials, got {len(mats)}")
        diffs = {}
        for k, m in zip(range(lo + 1, hi + 1), mats):
            diffs[k] = RingMatrix.from_json(spec, m, ranks[k - 1 - lo], ranks[k - lo])
        return cls(spec, lo, hi, ranks, diffs)


def validate_complex(C: BasedComplex) -> bool:
    return failing_degree(C) is None


def failing_degree(C: BasedComplex) -> Optional[int]:
    """The first k with d_{k-1} d_k != 0, or None."""
    for k in range(C.lo + 2, C.hi + 1):
        if not (C.d(k - 1) @ C.d(k)).is_zero():
            return k
    return None


def check_complex(C: BasedComplex) -> BasedComplex:
    k = failing_degree(C)
    if k is not None:
        raise InvariantError(f"d_{k - 1} o d_{k} != 0 (degree {k})")
    return C


class GradedMap:
    """A family of matrices ``C_k -> D_{k+degree}``; missing components are zero."""

    def __init__(self, source: BasedComplex, target: BasedComplex, degree: int,
                 components: Optional[Dict[int, RingMatrix]] = None):
        if source.spec != target.spec:
            raise ValueError("source and target live over different rings")
        self.source = source
        self.target = target
        self.degree = degree
        self.spec = source.spec
        self.comps: Dict[int, RingMatrix] = {}
        for k, m in (components or {}).items():
            shape = (target.rank(k + degree), source.rank(k))
            if m.shape != shape:
                raise ValueError(f"component at degree {k} has shape {m.shape}, expected {shape}")
            if shape[0] and shape[1]:
                self.comps[k] = m

    def __getitem__(self, k: int) -> RingMatrix:
        m = self.comps.get(k)
        if m is None:
            return RingMatrix.zeros(self.spec, self.target.rank(k + self.degree), self.source.rank(k))
        return m

    def degrees(self):
        return [k for k in self.source.degrees()
                if self.source.rank(k) and self.target.rank(k + self.degree)]

    def _like(self, other):
        if (self.source is not other.source and self.source != other.source) or \
                (self.target is not other.target and self.target != other.target) or \
                self.degree != other.degree:
            raise ValueError("graded maps are not parallel")

    def __add__(self, other):
        self._like(other)
        return GradedMap(self.source, self.target, self.degree,
                         {k: self[k] + other[k] for k in self.degrees()})

    def __sub__(self, other):
        self._like(other)
        return GradedMap(self.source, self.target, self.degree,
                         {k: self[k] - other[k] for k in self.degrees()})

    def __neg__(self):
        return GradedMap(self.source, self.target, self.degree, {k: -m for k, m in self.comps.items()})

    def scale(self, s: RingElement) -> "GradedMap":
        return GradedMap(self.source, self.target, self.degree, {k: m.scale(s) for k, m in self.comps.items()})

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        """Composition ``self o other``."""
        if other.target is not self.source and other.target != self.source:
            raise ValueError("composition of incompatible graded maps")
        comps = {}
        for k, m in other.comps.items():
            mid = k + other.degree
            if mid in self.comps:
                comps[k] = self.comps[mid] @ m
        return GradedMap(other.source, self.target, self.degree + other.degree, comps)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.comps.values())

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        try:
            return (self - other).is_zero()
        except ValueError:
            return False

    __hash__ = None

    def to_json(self) -> dict:
        return {"degree": self.degree,
                "components": {str(k): m.to_json() for k, m in sorted(self.comps.items())}}

    @classmethod
    def from_json(cls, obj, source: BasedComplex, target: BasedComplex, degree: Optional[int] = None):
        deg = obj.get("degree", 0) if degree is None else degree
        if "degree" in obj and obj["degree"] != deg:
            raise ValueError(f"expected a map of degree {deg}, got {obj['degree']}")
        comps = {}
        for ks, m in obj.get("components", {}).items():
            k = int(ks)
            comps[k] = RingMatrix.from_json(source.spec, m, target.rank(k + deg), source.rank(k))
        return cls(source, target, deg, comps)


def commutator_with_d(phi: GradedMap) -> GradedMap:
    """``[d, phi] = d phi - (-1)^s phi d``."""
    left = phi.target.differential() @ phi
    right = phi @ phi.source.differential()
    return left - right if phi.degree % 2 == 0 else left + right


class ChainMap(GradedMap):
    def __init__(self, source, target, components=None, check=True):
        super().__init__(source, target, 0, components)
        if check and not commutator_with_d(self).is_zero():
            raise InvariantError("map does not commute with the differentials")

    @classmethod
    def of(cls, gm: GradedMap, check=True) -> "ChainMap":
        if gm.degree != 0:
            raise ValueError("a chain map has degree 0")
        return cls(gm.source, gm.target, gm.comps, check=check)

    def is_valid(self) -> bool:
        return commutator_with_d(self).is_zero()


class ChainHomotopy(GradedMap):
    """``h`` with ``dh + hd = f - f'`` where ``between = (f, f')``."""

    def __init__(self, between, components=None, check=True):
        f, f2 = between
        super().__init__(f.source, f.target, 1, components)
        self.between = (f, f2)
        if check and not self.is_valid():
            raise InvariantError("dh + hd != f - f'")

    @classmethod
    def of(cls, gm: GradedMap, between, check=True) -> "ChainHomotopy":
        if gm.degree != 1:
            raise ValueError("a chain homotopy has degree 1")
        return cls(between, gm.comps, check=check)

    def is_valid(self) -> bool:
        f, f2 = self.between
        return commutator_with_d(self) == (f - f2)


@dataclass
class EquivalencePack:
    """f : C -> D with homotopy inverse g, h : fg ~ id_D, k : gf ~ id_C."""

    f: GradedMap
    g: GradedMap
    h: GradedMap
    k: GradedMap

    @property
    def source(self):
        return self.f.source

    @property
    def target(self):
        return self.f.target

    def failures(self) -> List[str]:
        out = []
        C, D = self.f.source, self.f.target
        if self.g.source != D or self.g.target != C:
            return ["g does not go back from the target to the source"]
        if not commutator_with_d(self.f).is_zero():
            out.append("f is not a chain map")
        if not commutator_with_d(self.g).is_zero():
            out.append("g is not a chain map")
        if commutator_with_d(self.h) != (self.f @ self.g) - D.identity():
            out.append("h is not a homotopy fg ~ id")
        if commutator_with_d(self.k) != (self.g @ self.f) - C.identity():
            out.append("k is not a homotopy gf ~ id")
        return out

    def is_valid(self) -> bool:
        return not self.failures()

    def validate(self) -> "EquivalencePack":
        bad = self.failures()
        if bad:
            raise InvariantError("; ".join(bad))
        return self

    def is_self_map(self) -> bool:
        return self.f.source == self.f.target

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "f": self.f.to_json(), "g": self.g.to_json(),
                "h": self.h.to_json(), "k": self.k.to_json()}

    @classmethod
    def from_json(cls, obj) -> "EquivalencePack":
        C = BasedComplex.from_json(obj["source"])
        D = BasedComplex.from_json(obj["target"]) if "target" in obj else C
        if D == C:
            D = C
        return cls(GradedMap.from_json(obj["f"], C, D, 0), GradedMap.from_json(obj["g"], D, C, 0),
                   GradedMap.from_json(obj["h"], D, D, 1), GradedMap.from_json(obj["k"], C, C, 1))


def identity_pack(C: BasedComplex) -> EquivalencePack:
    zero = C.zero_map(C, 1)
    return EquivalencePack(C.identity(), C.identity(), zero, zero)


def scalar_pack(C: BasedComplex, u: RingElement, u_inv: RingElement) -> EquivalencePack:
    """Multiplication by a central unit u, with inverse u_inv."""
    if not (u * u_inv).is_one():
        raise ValueError("u_inv does not invert u")
    idc = C.identity()
    zero = C.zero_map(C, 1)
    return EquivalencePack(idc.scale(u), idc.scale(u_inv), zero, zero)


def compose_packs(p: EquivalencePack, q: EquivalencePack) -> EquivalencePack:
    """Pack for ``p.f o q.f``."""
    f = p.f @ q.f
    g = q.g @ p.g
    h = p.h + p.f @ q.h @ p.g
    k = q.k + q.g @ p.k @ q.f
    return EquivalencePack(f, g, h, k)


def perturb_pack(p: EquivalencePack, s: GradedMap) -> EquivalencePack:
    """Replace f by the homotopic map f + [d, s] (s : C -> D of degree 1)."""
    ds = commutator_with_d(s)
    return EquivalencePack(p.f + ds, p.g, p.h + s @ p.g, p.k + p.g @ s)


# -- cones ---------------------------------------------------------------------------------

class ConeComplex(BasedComplex):
    """cone(f) remembering the two blocks: ``top`` = target of f, ``bottom`` = source of f."""

    def __init__(self, f: GradedMap):
        C, D = f.source, f.target
        lo = min(D.lo, C.lo + 1)
        hi = max(D.hi, C.hi + 1)
        ranks = [D.rank(k) + C.rank(k - 1) for k in range(lo, hi + 1)]
        diffs = {}
        for k in range(lo + 1, hi + 1):
            diffs[k] = block_matrix(
                C.spec,
                [[D.d(k), f[k - 1]], [None, -C.d(k - 1)]],
                [D.rank(k - 1), C.rank(k - 2)], [D.rank(k), C.rank(k - 1)],
            )
        super().__init__(C.spec, lo, hi, ranks, diffs)
        self.map = f
        self.top = D
        self.bottom = C


def mapping_cone(f: GradedMap) -> ConeComplex:
    return ConeComplex(f)


def cone_block(src: ConeComplex, tgt: ConeComplex, degree: int,
               dd: Optional[GradedMap] = None, cd: Optional[GradedMap] = None,
               dc: Optional[GradedMap] = None, cc: Optional[GradedMap] = None) -> GradedMap:
    """Graded map of cones given by the block matrix ``[[dd, cd], [dc, cc]]``.

    ``dd`` : top -> top (degree s), ``cd`` : bottom -> top (s+1),
    ``dc`` : top -> bottom (s-1), ``cc`` : bottom -> bottom (s).
    """
    comps = {}
    for k in src.degrees():
        t = k + degree
        rows = [tgt.top.rank(t), tgt.bottom.rank(t - 1)]
        cols = [src.top.rank(k), src.bottom.rank(k - 1)]
        if not sum(rows) or not sum(cols):
            continue
        blocks = [[dd[k] if dd is not None else None, cd[k - 1] if cd is not None else None],
                  [dc[k] if dc is not None else None, cc[k - 1] if cc is not None else None]]
        blocks = [[b if (b is not None and b.rows and b.cols) else None for b in row] for row in blocks]
        comps[k] = block_matrix(src.spec, blocks, rows, cols)
    return GradedMap(src, tgt, degree, comps)


@dataclass
class Contraction:
    complex: BasedComplex
    delta: GradedMap

    def is_valid(self) -> bool:
        return commutator_with_d(self.delta) == self.complex.identity()

    def square_zero(self) -> "Contraction":
        """The contraction delta d delta, whose square vanishes."""
        d = self.complex.differential()
        return Contraction(self.complex, self.delta @ d @ self.delta)


def cone_contraction(p: EquivalencePack) -> Contraction:
    """Explicit contraction of cone(p.f).

    The plain block candidate ``[[-h, 0], [g, k]]`` works when ``hf = fk``.
    Otherwise k is replaced by ``k' = k + g(hf - fk)`` and the off-diagonal
    block becomes ``hfk - hhf``.
    """
    f, g, h, k = p.f, p.g, p.h, p.k
    E = mapping_cone(f)
    raw = Contraction(E, cone_block(E, E, 1, dd=-h, dc=g, cc=k))
    if raw.is_valid():
        return raw
    k2 = k + g @ (h @ f - f @ k)
    b = h @ f @ k - h @ h @ f
    fixed = Contraction(E, cone_block(E, E, 1, dd=-h, cd=b, dc=g, cc=k2))
    if fixed.is_valid():
        return fixed
    raise ContractionFailure("pack does not yield a contraction of the cone (invalid witnesses?)")


def torsion_matrix(C: BasedComplex, delta: GradedMap) -> RingMatrix:
    odd = [k for k in C.degrees() if k % 2 and C.rank(k)]
    even = [k for k in C.degrees() if not k % 2 and C.rank(k)]
    rows = [C.rank(k) for k in even]
    cols = [C.rank(k) for k in odd]
    if sum(rows) != sum(cols):
        raise NotAcyclic(f"odd rank {sum(cols)} != even rank {sum(rows)}; the complex cannot be acyclic")
    blocks = []
    for j in even:
        row = []
        for i in odd:
            if j == i - 1:
                row.append(C.d(i))
            elif j == i + 1:
                row.append(delta[i])
            else:
                row.append(None)
        blocks.append(row)
    return block_matrix(C.spec, blocks, rows, cols)


def boundary_ranks(C: BasedComplex) -> List[int]:
    """Ranks b_lo..b_hi of the boundary modules forced by acyclicity (b_k = c_k - b_{k-1})."""
    out = []
    prev = 0
    for k in C.degrees():
        b = C.rank(k) - prev
        if b < 0:
            raise NotAcyclic(f"ranks {list(C.ranks)} admit no acyclic complex (degree {k})")
        out.append(b)
        prev = b
    if prev != 0:
        raise NotAcyclic(f"odd and even ranks of {list(C.ranks)} differ; the complex cannot be acyclic")
    return out


_MODEL_SIGNS: Dict[tuple, int] = {}


def model_sign(C: BasedComplex) -> int:
    """Determinant (+-1) of the torsion matrix of the elementary model with C's ranks.

    The model is cone(id_B) for B with zero differential and ranks equal to the
    boundary ranks of C, contracted by the identity pack.  Dividing by it makes
    tau(cone(id)) = 1 for every based complex.
    """
    b = boundary_ranks(C)
    key = (C.lo, tuple(b))
    if key not in _MODEL_SIGNS:
        if C.hi == C.lo:
            _MODEL_SIGNS[key] = 1
        else:
            B = BasedComplex(GroupSpec(), C.lo, C.hi - 1, b[:-1])
            E = mapping_cone(B.identity())
            delta = cone_block(E, E, 1, dc=B.identity())
            det = gr_det(torsion_matrix(E, delta))
            _MODEL_SIGNS[key] = det.coefficient(())
    return _MODEL_SIGNS[key]


def torsion_of_acyclic(C: BasedComplex, delta) -> K1Class:
    """K_1 class of an acyclic based complex: det (d + delta)_odd, normalized by the model sign."""
    if isinstance(delta, Contraction):
        delta = delta.delta
    det = gr_det(torsion_matrix(C, delta))
    if model_sign(C) < 0:
        det = -det
    return K1Class.of(det)


def whitehead_torsion(p: EquivalencePack) -> K1Class:
    c = cone_contraction(p)
    return torsion_of_acyclic(c.complex, c.delta)


# -- change of rings -----------------------------------------------------------------------

def induce_complex(C: BasedComplex, target: GroupSpec) -> BasedComplex:
    return BasedComplex(target, C.lo, C.hi, C.ranks,
                        {k: m.map_entries(lambda x: include(x, target), target) for k, m in C.diffs.items()})


def induce_map(phi: GradedMap, source: BasedComplex, target: BasedComplex) -> GradedMap:
    spec = source.spec
    return GradedMap(source, target, phi.degree,
                     {k: m.map_entries(lambda x: include(x, spec), spec) for k, m in phi.comps.items()})


def induce_pack(p: EquivalencePack, C: BasedComplex) -> EquivalencePack:
    """Base change of a self-equivalence pack to the induced complex C."""
    return EquivalencePack(induce_map(p.f, C, C), induce_map(p.g, C, C),
                           induce_map(p.h, C, C), induce_map(p.k, C, C))
