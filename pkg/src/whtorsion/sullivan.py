"""Derivation calculus on free graded-commutative algebras over Q.

A CDGA here is free on finitely many generators of degree >= 1.  Elements are
``GradedPoly`` values: exponent tuples (odd exponents 0/1) mapped to
Fractions, in the fixed generator order.

Elements of ``M (x) Q(t, dt)`` are stored as ``F + dt*G`` with ``dt`` written on
the left and ``F, G`` polynomials in t over M (``TPoly``).  With this
convention

    (F1 + dt G1)(F2 + dt G2) = F1 F2 + dt (G1 F2 + s(F1) G2)
    d(F + dt G)              = dF + dt (d/dt F - dG)

where ``s`` negates odd-degree parts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

__all__ = [
    "GradedPoly", "CDGA", "Derivation", "AlgebraMap", "TPoly", "LineElement", "HomotopyLine",
    "NonNilpotent", "NonUnipotentHomotopy", "check_cdga", "cdga_failure", "bracket", "bracket_with_d",
    "is_nilpotent", "exp_derivation", "in_u_star", "build_homotopy", "augmentation_check",
    "block_lazarev", "random_derivation",
]

Mono = Tuple[int, ...]


class NonNilpotent(ValueError):
    pass


class NonUnipotentHomotopy(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def _frac_json(q: Fraction):
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _mono_mul(degrees: Sequence[int], a: Mono, b: Mono) -> Tuple[int, Optional[Mono]]:
    """Sign and normal-ordered product of two monomials (None if it vanishes)."""
    sign = 1
    odd_seen_after = 0
    # moving b's odd generators left past a's odd generators of larger index
    n = len(degrees)
    for i in range(n - 1, -1, -1):
        if degrees[i] % 2:
            if b[i] and a[i]:
                return 0, None
            if b[i] and odd_seen_after % 2:
                sign = -sign
            if a[i]:
                odd_seen_after += 1
    return sign, tuple(x + y for x, y in zip(a, b))


class GradedPoly:
    """Element of the free graded-commutative algebra on generators of the given degrees."""

    __slots__ = ("degrees", "terms")

    def __init__(self, degrees: Sequence[int], terms: Optional[Dict[Mono, Fraction]] = None):
        self.degrees = tuple(degrees)
        clean = {}
        for m, c in (terms or {}).items():
            c = _frac(c)
            if c:
                if any(m[i] > 1 for i, dg in enumerate(self.degrees) if dg % 2):
                    continue
                clean[tuple(m)] = c
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def zero(cls, degrees):
        return cls(degrees)

    @classmethod
    def const(cls, degrees, c=1):
        return cls(degrees, {(0,) * len(degrees): c})

    @classmethod
    def gen(cls, degrees, i: int, c=1):
        m = [0] * len(degrees)
        m[i] = 1
        return cls(degrees, {tuple(m): c})

    def mono_degree(self, m: Mono) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def is_zero(self) -> bool:
        return not self.terms

    def homogeneous_degree(self) -> Optional[int]:
        degs = {self.mono_degree(m) for m in self.terms}
        if len(degs) > 1:
            raise ValueError("polynomial is not homogeneous")
        return degs.pop() if degs else None

    def is_homogeneous_of(self, k: int) -> bool:
        return all(self.mono_degree(m) == k for m in self.terms)

    def _same(self, other):
        if self.degrees != other.degrees:
            raise ValueError("polynomials over different algebras")

    def __add__(self, other):
        self._same(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return GradedPoly(self.degrees, t)

    def __neg__(self):
        return GradedPoly(self.degrees, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q) -> "GradedPoly":
        q = _frac(q)
        return GradedPoly(self.degrees, {m: c * q for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._same(other)
        t: Dict[Mono, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                s, m = _mono_mul(self.degrees, ma, mb)
                if m is not None:
                    t[m] = t.get(m, 0) + s * ca * cb
        return GradedPoly(self.degrees, t)

    __rmul__ = scale

    def parity_twist(self) -> "GradedPoly":
        """Negate the odd-degree monomials."""
        return GradedPoly(self.degrees, {m: (-c if self.mono_degree(m) % 2 else c) for m, c in self.terms.items()})

    def constant(self) -> Fraction:
        return self.terms.get((0,) * len(self.degrees), Fraction(0))

    def is_decomposable(self) -> bool:
        return all(sum(m) >= 2 for m in self.terms)

    def weight_min(self) -> Optional[int]:
        ws = [sum(e * (d + 1) for e, d in zip(m, self.degrees)) for m in self.terms]
        return min(ws) if ws else None

    def __eq__(self, other):
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self.degrees == other.degrees and self.terms == other.terms

    def __hash__(self):
        return hash((self.degrees, tuple(self.terms.items())))

    def format(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms.items():
            word = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e)
            if not word:
                parts.append(str(c))
            elif c == 1:
                parts.append(word)
            elif c == -1:
                parts.append("-" + word)
            else:
                parts.append(f"{c}*{word}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"GradedPoly({self.format([f'x{i}' for i in range(len(self.degrees))])})"

    def to_json(self, names: Sequence[str]):
        out = []
        for m, c in self.terms.items():
            word = []
            for n, e in zip(names, m):
                word.extend([n] * e)
            out.append([_frac_json(c), word])
        return out

    @classmethod
    def from_json(cls, degrees, names: Sequence[str], obj) -> "GradedPoly":
        index = {n: i for i, n in enumerate(names)}
        total = cls(degrees)
        for item in obj:
            c, word = item
            p = cls.const(degrees, _frac(c))
            for w in word:
                if w not in index:
                    raise ValueError(f"unknown generator {w!r}")
                p = p * cls.gen(degrees, index[w])
            total = total + p
        return total


def _occurrences(m: Mono) -> List[int]:
    out = []
    for i, e in enumerate(m):
        out.extend([i] * e)
    return out


class CDGA:
    """Free graded-commutative algebra with a differential given on generators."""

    def __init__(self, generators: Sequence[Tuple[str, int]], d: Optional[Dict[str, object]] = None):
        names = [g[0] for g in generators]
        degrees = [int(g[1]) for g in generators]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")
        if any(k < 1 for k in degrees):
            raise ValueError("generators must have degree >= 1")
        self.names = tuple(names)
        self.degrees = tuple(degrees)
        self.index = {n: i for i, n in enumerate(names)}
        d = d or {}
        for n in d:
            if n not in self.index:
                raise ValueError(f"differential given on unknown generator {n!r}")
        self.d_gen = tuple(self._coerce(d.get(n)) for n in names)
        self._basis: Dict[int, List[Mono]] = {}

    @property
    def ngens(self):
        return len(self.names)

    def _coerce(self, p) -> GradedPoly:
        if p is None:
            return GradedPoly.zero(self.degrees)
        if isinstance(p, GradedPoly):
            if p.degrees != self.degrees:
                raise ValueError("polynomial over a different algebra")
            return p
        if isinstance(p, str):
            return self.parse(p)
        if isinstance(p, (int, Fraction)):
            return self.one().scale(p)
        return GradedPoly.from_json(self.degrees, self.names, p)

    def parse(self, text: str) -> GradedPoly:
        """Parse sums of products like ``'x*y - 2*a^2 + 1/2*z'``."""
        text = text.replace(" ", "").replace("-", "+-")
        total = self.zero()
        for chunk in text.split("+"):
            if not chunk:
                continue
            sign = 1
            if chunk.startswith("-"):
                sign, chunk = -1, chunk[1:]
            p = self.one().scale(sign)
            for f in chunk.split("*"):
                base, _, exp = f.partition("^")
                e = int(exp) if exp else 1
                if base in self.index:
                    for _ in range(e):
                        p = p * self.gen(base)
                else:
                    p = p.scale(_frac(base) ** e)
            total = total + p
        return total

    def zero(self):
        return GradedPoly.zero(self.degrees)

    def one(self):
        return GradedPoly.const(self.degrees, 1)

    def gen(self, name) -> GradedPoly:
        i = self.index[name] if isinstance(name, str) else name
        return GradedPoly.gen(self.degrees, i)

    def generators(self) -> List[GradedPoly]:
        return [self.gen(i) for i in range(self.ngens)]

    def differential(self) -> "Derivation":
        return Derivation(self, 1, {n: p for n, p in zip(self.names, self.d_gen)}, check=False)

    def d(self, p: GradedPoly) -> GradedPoly:
        return self.differential()(p)

    def basis(self, k: int) -> List[Mono]:
        """Monomials of degree k, in normal order."""
        if k not in self._basis:
            ranges = []
            for dg in self.degrees:
                top = 1 if dg % 2 else k // dg
                ranges.append(range(0, top + 1))
            self._basis[k] = [m for m in iproduct(*ranges)
                              if sum(e * dg for e, dg in zip(m, self.degrees)) == k]
        return self._basis[k]

    def dim(self, k: int) -> int:
        return len(self.basis(k))

    def augmentation(self, p: GradedPoly) -> Fraction:
        return p.constant()

    def format(self, p: GradedPoly) -> str:
        return p.format(self.names)

    def __eq__(self, other):
        return isinstance(other, CDGA) and (self.names, self.degrees, self.d_gen) == \
            (other.names, other.degrees, other.d_gen)

    def __hash__(self):
        return hash((self.names, self.degrees))

    def __repr__(self):
        gens = ", ".join(f"{n}_{k}" for n, k in zip(self.names, self.degrees))
        ds = "; ".join(f"d{n} = {self.format(p)}" for n, p in zip(self.names, self.d_gen) if not p.is_zero())
        return f"CDGA(Lambda({gens}){'; ' + ds if ds else ''})"

    def to_json(self):
        return {"generators": [{"name": n, "degree": k} for n, k in zip(self.names, self.degrees)],
                "d": {n: p.to_json(self.names) for n, p in zip(self.names, self.d_gen) if not p.is_zero()}}

    @classmethod
    def from_json(cls, obj) -> "CDGA":
        gens = [(g["name"], g["degree"]) for g in obj["generators"]]
        return cls(gens, obj.get("d", {}))


def cdga_failure(M: CDGA) -> Optional[str]:
    """First failure among degree, d^2 = 0 and minimality, as a message; None if all hold."""
    d = M.differential()
    for n, k, p in zip(M.names, M.degrees, M.d_gen):
        if not p.is_homogeneous_of(k + 1):
            return f"d{n} is not homogeneous of degree {k + 1}"
    for n, p in zip(M.names, M.d_gen):
        if not d(p).is_zero():
            return f"d(d{n}) = {M.format(d(p))} != 0"
    for n, p in zip(M.names, M.d_gen):
        if not p.is_decomposable():
            return f"d{n} = {M.format(p)} is not decomposable (model not minimal)"
    return None


def check_cdga(M: CDGA) -> bool:
    return cdga_failure(M) is None


def min_weight_increase(M: CDGA) -> Optional[int]:
    """Least weight gained by d on a generator (weight of x is deg x + 1)."""
    out = None
    for k, p in zip(M.degrees, M.d_gen):
        w = p.weight_min()
        if w is not None:
            inc = w - (k + 1)
            out = inc if out is None else min(out, inc)
    return out


class Derivation:
    """Graded derivation of degree ``degree``: D(xy) = D(x) y + (-1)^{degree |x|} x D(y)."""

    def __init__(self, M: CDGA, degree: int, on_generators: Optional[Dict] = None, check: bool = True):
        self.M = M
        self.degree = degree
        on = on_generators or {}
        vals = []
        for i, n in enumerate(M.names):
            p = on.get(n, on.get(i))
            p = M._coerce(p)
            if check and not p.is_homogeneous_of(M.degrees[i] + degree):
                raise ValueError(f"image of {n} must have degree {M.degrees[i] + degree}")
            vals.append(p)
        for key in on:
            if key not in M.index and not (isinstance(key, int) and 0 <= key < M.ngens):
                raise ValueError(f"unknown generator {key!r}")
        self.images = tuple(vals)
        self._cache: Dict[Mono, GradedPoly] = {}

    def on(self, name) -> GradedPoly:
        return self.images[self.M.index[name] if isinstance(name, str) else name]

    def _mono(self, m: Mono) -> GradedPoly:
        if m in self._cache:
            return self._cache[m]
        M = self.M
        occ = _occurrences(m)
        out = M.zero()
        for j, i in enumerate(occ):
            img = self.images[i]
            if img.is_zero():
                continue
            pre = M.one()
            pre_deg = 0
            for a in occ[:j]:
                pre = pre * M.gen(a)
                pre_deg += M.degrees[a]
            post = M.one()
            for a in occ[j + 1:]:
                post = post * M.gen(a)
            term = pre * img * post
            if (self.degree * pre_deg) % 2:
                term = -term
            out = out + term
        self._cache[m] = out
        return out

    def __call__(self, p: GradedPoly) -> GradedPoly:
        out = self.M.zero()
        for m, c in p.terms.items():
            out = out + self._mono(m).scale(c)
        return out

    def power(self, p: GradedPoly, k: int) -> GradedPoly:
        for _ in range(k):
            p = self(p)
        return p

    def __add__(self, other):
        self._same(other)
        return Derivation(self.M, self.degree, {i: a + b for i, (a, b) in enumerate(zip(self.images, other.images))},
                          check=False)

    def __neg__(self):
        return Derivation(self.M, self.degree, {i: -a for i, a in enumerate(self.images)}, check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q):
        return Derivation(self.M, self.degree, {i: a.scale(q) for i, a in enumerate(self.images)}, check=False)

    def _same(self, other):
        if self.M != other.M or self.degree != other.degree:
            raise ValueError("derivations differ in algebra or degree")

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.images)

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.M == other.M and self.degree == other.degree and self.images == other.images

    __hash__ = None

    def __repr__(self):
        parts = [f"{n} -> {self.M.format(p)}" for n, p in zip(self.M.names, self.images) if not p.is_zero()]
        return f"Derivation(deg {self.degree}: {', '.join(parts) or '0'})"

    def to_json(self):
        return {"degree": self.degree,
                "on": {n: p.to_json(self.M.names) for n, p in zip(self.M.names, self.images) if not p.is_zero()}}

    @classmethod
    def from_json(cls, M: CDGA, obj) -> "Derivation":
        return cls(M, obj["degree"], dict(obj.get("on", {})))


def bracket(a: Derivation, b: Derivation) -> Derivation:
    """Graded commutator ab - (-1)^{|a||b|} ba."""
    if a.M != b.M:
        raise ValueError("derivations on different algebras")
    sign = -1 if (a.degree * b.degree) % 2 == 0 else 1
    imgs = {}
    for i in range(a.M.ngens):
        imgs[i] = a(b.images[i]) + b(a.images[i]).scale(sign)
    return Derivation(a.M, a.degree + b.degree, imgs, check=False)


def bracket_with_d(i: Derivation, M: Optional[CDGA] = None) -> Derivation:
    """[i, d] = id + di for a degree -1 derivation i."""
    M = M or i.M
    if i.degree != -1:
        raise ValueError(f"expected a degree -1 derivation, got degree {i.degree}")
    return bracket(i, M.differential())


def is_nilpotent(D: Derivation, M: Optional[CDGA] = None) -> Tuple[bool, int]:
    """(nilpotent?, least k with D^k = 0 on generators) -- or (False, bound).

    On M^n (finite dimensional) a nilpotent operator satisfies D^{dim M^n} = 0,
    so iterating dim M^{|x|} times on each generator x decides the question.
    """
    M = M or D.M
    if D.degree != 0:
        raise ValueError("nilpotency is tested for degree 0 derivations")
    index = 1
    bound = 1
    for i, x in enumerate(M.generators()):
        cap = max(1, M.dim(M.degrees[i]))
        bound = max(bound, cap)
        p = x
        k = 0
        while not p.is_zero():
            if k >= cap:
                return False, max(cap, max(M.dim(dg) for dg in M.degrees))
            p = D(p)
            k += 1
        index = max(index, k)
    return True, index


class AlgebraMap:
    """Graded algebra endomorphism of M given on generators."""

    def __init__(self, M: CDGA, images: Sequence[GradedPoly]):
        self.M = M
        self.images = tuple(images)

    def __call__(self, p: GradedPoly) -> GradedPoly:
        M = self.M
        out = M.zero()
        for m, c in p.terms.items():
            term = M.one().scale(c)
            for i in _occurrences(m):
                term = term * self.images[i]
            out = out + term
        return out

    def compose(self, other: "AlgebraMap") -> "AlgebraMap":
        """self o other."""
        return AlgebraMap(self.M, [self(p) for p in other.images])

    def is_identity(self) -> bool:
        return all(p == g for p, g in zip(self.images, self.M.generators()))

    def commutes_with_d(self) -> bool:
        M = self.M
        return all(M.d(self.images[i]) == self(M.d_gen[i]) for i in range(M.ngens))

    def __eq__(self, other):
        return isinstance(other, AlgebraMap) and self.M == other.M and self.images == other.images

    __hash__ = None

    def __repr__(self):
        return "AlgebraMap(" + ", ".join(f"{n} -> {self.M.format(p)}" for n, p in zip(self.M.names, self.images)) + ")"

    def to_json(self):
        return {n: p.to_json(self.M.names) for n, p in zip(self.M.names, self.images)}


def _exp_series(D: Derivation, p: GradedPoly) -> GradedPoly:
    out = p
    k = 1
    term = p
    while True:
        term = D(term)
        if term.is_zero():
            return out
        out = out + term.scale(Fraction(1, factorial(k)))
        k += 1


def exp_derivation(D: Derivation, M: Optional[CDGA] = None, verify: bool = True) -> AlgebraMap:
    """exp(D) = sum D^k / k! on generators, extended multiplicatively."""
    M = M or D.M
    ok, _ = is_nilpotent(D, M)
    if not ok:
        raise NonNilpotent(f"{D!r} is not nilpotent")
    phi = AlgebraMap(M, [_exp_series(D, x) for x in M.generators()])
    if verify:
        if not bracket(M.differential(), D).is_zero():
            raise ValueError("D does not commute with d; exp(D) would not be a dg map")
        if not phi.commutes_with_d():
            raise AssertionError("exp(D) does not commute with d")
        inv = AlgebraMap(M, [_exp_series(-D, x) for x in M.generators()])
        if not phi.compose(inv).is_identity() or not inv.compose(phi).is_identity():
            raise AssertionError("exp(-D) does not invert exp(D)")
    return phi


def in_u_star(i: Derivation, M: Optional[CDGA] = None) -> bool:
    M = M or i.M
    if i.degree != -1:
        raise ValueError("expected a degree -1 derivation")
    return all(p.is_zero() for p, k in zip(i.images, M.degrees) if k == 1)


# -- M (x) Q(t, dt) ------------------------------------------------------------------------

class TPoly:
    """Polynomial in t with coefficients in M: {power: GradedPoly}."""

    __slots__ = ("degrees", "coeffs")

    def __init__(self, degrees, coeffs: Optional[Dict[int, GradedPoly]] = None):
        self.degrees = tuple(degrees)
        self.coeffs = {k: p for k, p in sorted((coeffs or {}).items()) if not p.is_zero()}

    @classmethod
    def const(cls, p: GradedPoly) -> "TPoly":
        return cls(p.degrees, {0: p})

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        c = dict(self.coeffs)
        for k, p in other.coeffs.items():
            c[k] = c[k] + p if k in c else p
        return TPoly(self.degrees, c)

    def __neg__(self):
        return TPoly(self.degrees, {k: -p for k, p in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        c: Dict[int, GradedPoly] = {}
        for a, p in self.coeffs.items():
            for b, q in other.coeffs.items():
                r = p * q
                c[a + b] = c[a + b] + r if (a + b) in c else r
        return TPoly(self.degrees, c)

    def scale(self, q):
        return TPoly(self.degrees, {k: p.scale(q) for k, p in self.coeffs.items()})

    def times_t(self, n: int = 1):
        return TPoly(self.degrees, {k + n: p for k, p in self.coeffs.items()})

    def map(self, fn) -> "TPoly":
        return TPoly(self.degrees, {k: fn(p) for k, p in self.coeffs.items()})

    def parity_twist(self):
        return self.map(GradedPoly.parity_twist)

    def d_dt(self):
        return TPoly(self.degrees, {k - 1: p.scale(k) for k, p in self.coeffs.items() if k})

    def at(self, t) -> GradedPoly:
        out = GradedPoly.zero(self.degrees)
        for k, p in self.coeffs.items():
            out = out + p.scale(_frac(t) ** k)
        return out

    def integral_01(self) -> GradedPoly:
        out = GradedPoly.zero(self.degrees)
        for k, p in self.coeffs.items():
            out = out + p.scale(Fraction(1, k + 1))
        return out

    def __eq__(self, other):
        return isinstance(other, TPoly) and self.degrees == other.degrees and self.coeffs == other.coeffs

    __hash__ = None

    def format(self, names):
        if not self.coeffs:
            return "0"
        parts = []
        for k, p in self.coeffs.items():
            s = p.format(names)
            if k == 0:
                parts.append(s)
            else:
                tk = "t" if k == 1 else f"t^{k}"
                parts.append(f"{tk}*({s})" if len(p.terms) > 1 else (
                    f"{tk}*{s}" if not s.startswith("-") else f"-{tk}*{s[1:]}"))
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self, names):
        return {str(k): p.to_json(names) for k, p in self.coeffs.items()}

    @classmethod
    def from_json(cls, degrees, names, obj):
        return cls(degrees, {int(k): GradedPoly.from_json(degrees, names, v) for k, v in obj.items()})


@dataclass
class LineElement:
    """F + dt*G in M (x) Q(t, dt)."""

    F: TPoly
    G: TPoly

    @classmethod
    def of(cls, p: GradedPoly) -> "LineElement":
        return cls(TPoly.const(p), TPoly(p.degrees))

    def __add__(self, other):
        return LineElement(self.F + other.F, self.G + other.G)

    def __neg__(self):
        return LineElement(-self.F, -self.G)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q):
        return LineElement(self.F.scale(q), self.G.scale(q))

    def __mul__(self, other):
        return LineElement(self.F * other.F, self.G * other.F + self.F.parity_twist() * other.G)

    def is_zero(self):
        return self.F.is_zero() and self.G.is_zero()

    def endpoint(self, t) -> GradedPoly:
        """Set dt = 0 and evaluate t."""
        return self.F.at(t)

    def __eq__(self, other):
        return isinstance(other, LineElement) and self.F == other.F and self.G == other.G

    __hash__ = None

    def format(self, names):
        out = self.F.format(names)
        if not self.G.is_zero():
            g = self.G.format(names)
            out = f"{out} + dt*({g})" if out != "0" else f"dt*({g})"
        return out


def line_d(M: CDGA, x: LineElement) -> LineElement:
    """d(F + dt G) = dF + dt (dF/dt - dG)."""
    dF = x.F.map(M.d)
    dG = x.G.map(M.d)
    return LineElement(dF, x.F.d_dt() - dG)


class HomotopyLine:
    """Algebra map H : M -> M (x) Q(t, dt) given on generators."""

    def __init__(self, M: CDGA, images: Sequence[LineElement]):
        self.M = M
        self.images = tuple(images)
        if len(self.images) != M.ngens:
            raise ValueError("one image per generator required")

    def __call__(self, p: GradedPoly) -> LineElement:
        M = self.M
        out = LineElement(TPoly(M.degrees), TPoly(M.degrees))
        for m, c in p.terms.items():
            term = LineElement.of(M.one().scale(c))
            for i in _occurrences(m):
                term = term * self.images[i]
            out = out + term
        return out

    def on(self, name) -> LineElement:
        return self.images[self.M.index[name] if isinstance(name, str) else name]

    def endpoint(self, t) -> AlgebraMap:
        return AlgebraMap(self.M, [h.endpoint(t) for h in self.images])

    def commutes_with_d(self) -> bool:
        M = self.M
        return all(line_d(M, self.images[i]) == self(M.d_gen[i]) for i in range(M.ngens))

    @classmethod
    def identity(cls, M: CDGA) -> "HomotopyLine":
        return cls(M, [LineElement.of(x) for x in M.generators()])

    def __repr__(self):
        return "HomotopyLine(" + ", ".join(f"{n} -> {h.format(self.M.names)}"
                                          for n, h in zip(self.M.names, self.images)) + ")"

    def to_json(self):
        names = self.M.names
        return {n: {"F": h.F.to_json(names), "G": h.G.to_json(names)} for n, h in zip(names, self.images)}

    @classmethod
    def from_json(cls, M: CDGA, obj) -> "HomotopyLine":
        ims = []
        for n in M.names:
            h = obj.get(n)
            if h is None:
                ims.append(LineElement.of(M.gen(n)))
            else:
                ims.append(LineElement(TPoly.from_json(M.degrees, M.names, h.get("F", {})),
                                       TPoly.from_json(M.degrees, M.names, h.get("G", {}))))
        return cls(M, ims)


def _line_bracket_step(i: Derivation, D: Derivation, x: LineElement) -> LineElement:
    """[I, d] on M (x) Q(t, dt) with I = t i: F + dt G  |->  t D(F) + dt (i(F) + t D(G))."""
    F = x.F.map(D).times_t()
    G = x.F.map(i) + x.G.map(D).times_t()
    return LineElement(F, G)


def build_homotopy(i: Derivation, M: Optional[CDGA] = None, verify: bool = True) -> HomotopyLine:
    """H(x) = exp([t i, d])(x (x) 1), a homotopy from id to exp([i, d])."""
    M = M or i.M
    D = bracket_with_d(i, M)
    ok, _ = is_nilpotent(D, M)
    if not ok:
        raise NonNilpotent("[i, d] is not nilpotent")
    cap = 2 * max([M.dim(k) for k in M.degrees] + [1]) + 2
    images = []
    for x in M.generators():
        term = LineElement.of(x)
        total = term
        n = 0
        while True:
            n += 1
            term = _line_bracket_step(i, D, term).scale(Fraction(1, n))
            if term.is_zero():
                break
            if n > cap:
                raise NonNilpotent("the homotopy series does not terminate")
            total = total + term
        images.append(total)
    H = HomotopyLine(M, images)
    if verify:
        if not H.endpoint(0).is_identity():
            raise AssertionError("homotopy does not start at the identity")
        if H.endpoint(1) != exp_derivation(D, M, verify=False):
            raise AssertionError("homotopy does not end at exp([i, d])")
        if not H.commutes_with_d():
            raise AssertionError("homotopy does not commute with d")
    return H


def augmentation_check(H: HomotopyLine, M: Optional[CDGA] = None) -> bool:
    """Is every H(x) in (augmentation ideal (x) Q(t, dt)) + Q?"""
    M = M or H.M
    const = (0,) * M.ngens
    for h in H.images:
        for k, p in h.F.coeffs.items():
            if k and const in p.terms:
                return False
        for p in h.G.coeffs.values():
            if const in p.terms:
                return False
    return True


def _F_apply(H: HomotopyLine, p: TPoly) -> TPoly:
    """F extended t-linearly and multiplicatively to M[t]."""
    M = H.M
    out = TPoly(M.degrees)
    for k, q in p.coeffs.items():
        for m, c in q.terms.items():
            term = TPoly.const(M.one().scale(c)).times_t(k)
            for i in _occurrences(m):
                term = term * H.images[i].F
            out = out + term
    return out


def _G_apply(H: HomotopyLine, p: TPoly) -> TPoly:
    """G extended as an F-derivation: G(yz) = G(y) F(z) + (-1)^{|y|} F(y) G(z)."""
    M = H.M
    out = TPoly(M.degrees)
    for k, q in p.coeffs.items():
        for m, c in q.terms.items():
            occ = _occurrences(m)
            for j, gi in enumerate(occ):
                Gx = H.images[gi].G
                if Gx.is_zero():
                    continue
                term = TPoly.const(M.one().scale(c)).times_t(k)
                pre_deg = 0
                for a in occ[:j]:
                    term = term * H.images[a].F
                    pre_deg += M.degrees[a]
                term = term * Gx
                for a in occ[j + 1:]:
                    term = term * H.images[a].F
                out = out + (term if pre_deg % 2 == 0 else -term)
    return out


def _F_inverse(H: HomotopyLine, x: GradedPoly, cap: int) -> TPoly:
    """F^{-1}(x) = sum_k N^k x with N = id - F, which must be nilpotent."""
    total = TPoly.const(x)
    term = TPoly.const(x)
    for _ in range(cap + 1):
        term = term - _F_apply(H, term)
        if term.is_zero():
            return total
        total = total + term
    raise NonUnipotentHomotopy("id - F is not nilpotent; F is not unipotent")


def block_lazarev(H: HomotopyLine, M: Optional[CDGA] = None, verify: bool = True) -> Derivation:
    """i = integral_0^1 G F^{-1} dt, computed term-wise in t."""
    M = M or H.M
    if not H.endpoint(0).is_identity():
        raise NonUnipotentHomotopy("F does not start at the identity")
    imgs = {}
    for idx, x in enumerate(M.generators()):
        cap = max(1, M.dim(M.degrees[idx]))
        finv = _F_inverse(H, x, cap)
        imgs[idx] = _G_apply(H, finv).integral_01()
    i = Derivation(M, -1, imgs)
    if verify:
        if exp_derivation(bracket_with_d(i, M), M, verify=False) != H.endpoint(1):
            raise AssertionError("recovered derivation does not reproduce the endpoint")
    return i


def random_derivation(M: CDGA, rng: random.Random, degree: int = -1, density: float = 0.5,
                      coeff: int = 3, kill_degree_one: bool = False) -> Derivation:
    """Random derivation with small integer coefficients on the monomial basis."""
    imgs = {}
    for i, k in enumerate(M.degrees):
        target = k + degree
        if target < 0 or (kill_degree_one and k == 1):
            continue
        p = M.zero()
        for m in M.basis(target):
            if rng.random() < density:
                c = rng.randint(-coeff, coeff)
                if c:
                    p = p + GradedPoly(M.degrees, {m: c})
        imgs[i] = p
    return Derivation(M, degree, imgs)
