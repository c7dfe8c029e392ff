"""Surjections onto Z from finitely generated groups of unitriangular integer matrices.

If every generator has zero entries on the first m off-diagonals, reading the
(m+1)-th off-diagonal is a homomorphism to Z^{n-m-1}: in a product the cross
terms only reach deeper off-diagonals.  Composing with a functional that is
primitive on the image lattice gives a surjection onto Z.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence

__all__ = [
    "TrivialGroup", "UniMatrix", "UniSubgroup", "ZFunctional", "hermite_normal_form",
    "filtration_level", "graded_image", "surjection_to_Z", "verify_homomorphism",
]


class TrivialGroup(ValueError):
    """Every generator is the identity."""


class UniMatrix:
    __slots__ = ("n", "rows")

    def __init__(self, entries: Sequence[Sequence[int]]):
        rows = tuple(tuple(int(x) for x in r) for r in entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("a unitriangular matrix must be square and non-empty")
        for i in range(n):
            if rows[i][i] != 1:
                raise ValueError(f"diagonal entry ({i},{i}) is {rows[i][i]}, expected 1")
            if any(rows[i][j] for j in range(i)):
                raise ValueError(f"row {i} has a nonzero entry below the diagonal")
        self.n = n
        self.rows = rows

    @classmethod
    def identity(cls, n: int) -> "UniMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def elementary(cls, n: int, i: int, j: int, a: int = 1) -> "UniMatrix":
        """I + a E_ij with 0-based i < j."""
        if not 0 <= i < j < n:
            raise ValueError("elementary matrix needs i < j")
        m = [[int(r == c) for c in range(n)] for r in range(n)]
        m[i][j] = a
        return cls(m)

    def __mul__(self, other: "UniMatrix") -> "UniMatrix":
        if self.n != other.n:
            raise ValueError("size mismatch")
        n = self.n
        a, b = self.rows, other.rows
        return UniMatrix([[sum(a[i][k] * b[k][j] for k in range(i, j + 1)) if j >= i else 0
                           for j in range(n)] for i in range(n)])

    def inverse(self) -> "UniMatrix":
        """Exact inverse by back-substitution (integral since the diagonal is 1)."""
        n = self.n
        a = self.rows
        inv = [[int(i == j) for j in range(n)] for i in range(n)]
        for j in range(n):
            for i in range(j - 1, -1, -1):
                inv[i][j] = -sum(a[i][k] * inv[k][j] for k in range(i + 1, j + 1))
        return UniMatrix(inv)

    def __pow__(self, e: int) -> "UniMatrix":
        base = self if e >= 0 else self.inverse()
        out = UniMatrix.identity(self.n)
        for _ in range(abs(e)):
            out = out * base
        return out

    def is_identity(self) -> bool:
        return all(self.rows[i][j] == int(i == j) for i in range(self.n) for j in range(self.n))

    def offdiag(self, j: int) -> List[int]:
        """Entries (i, i+j), i = 0..n-j-1 (the j-th off-diagonal, 1-based)."""
        return [self.rows[i][i + j] for i in range(self.n - j)]

    def __eq__(self, other):
        return isinstance(other, UniMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"UniMatrix({[list(r) for r in self.rows]})"

    def to_json(self):
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class UniSubgroup:
    n: int
    generators: tuple

    def __init__(self, generators, n: Optional[int] = None):
        gens = tuple(g if isinstance(g, UniMatrix) else UniMatrix(g) for g in generators)
        if n is None:
            if not gens:
                raise ValueError("need the matrix size or at least one generator")
            n = gens[0].n
        if any(g.n != n for g in gens):
            raise ValueError(f"all generators must be {n}x{n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "generators", gens)

    def to_json(self):
        return {"size": self.n, "generators": [g.to_json() for g in self.generators]}

    @classmethod
    def from_json(cls, obj, n: Optional[int] = None):
        if isinstance(obj, dict):
            n = obj.get("size", n)
            obj = obj["generators"]
        return cls(obj, n)


@dataclass(frozen=True)
class ZFunctional:
    """phi(A) = (weights . offdiag_{level+1}(A)) / divisor."""

    level: int
    weights: tuple
    values_on_generators: tuple
    divisor: int = 1

    def raw(self, A: UniMatrix) -> Fraction:
        v = A.offdiag(self.level + 1)
        if len(v) != len(self.weights):
            raise ValueError("functional and matrix sizes disagree")
        return Fraction(sum(w * x for w, x in zip(self.weights, v)), self.divisor)

    def __call__(self, A: UniMatrix):
        val = self.raw(A)
        return int(val) if val.denominator == 1 else val

    def is_surjective(self) -> bool:
        g = 0
        for v in self.values_on_generators:
            g = gcd(g, v)
        return g == 1

    def to_json(self):
        return {"level": self.level, "weights": list(self.weights), "divisor": self.divisor,
                "values_on_generators": list(self.values_on_generators)}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["level"], tuple(obj["weights"]), tuple(obj["values_on_generators"]), obj.get("divisor", 1))


def hermite_normal_form(vectors: Sequence[Sequence[int]]) -> List[List[int]]:
    """Row-style HNF of the lattice spanned by ``vectors``: nonzero rows only,
    positive pivots moving right, entries above each pivot reduced into [0, pivot)."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return []
    ncols = len(rows[0])
    out: List[List[int]] = []
    col = 0
    while rows and col < ncols:
        nz = [r for r in rows if r[col]]
        if not nz:
            col += 1
            continue
        # Euclid on column col among the remaining rows
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for c in range(ncols):
                    r[c] -= q * piv[c]
            nz = [r for r in nz if r[col]]
        piv = nz[0]
        if piv[col] < 0:
            piv[:] = [-x for x in piv]
        rows = [r for r in rows if r is not piv and any(r)]
        for prev in out:
            q = prev[col] // piv[col]
            if q:
                for c in range(ncols):
                    prev[c] -= q * piv[c]
        out.append(piv)
        col += 1
    return out


def filtration_level(S: UniSubgroup) -> int:
    """Largest m such that every generator lies in Uni^m (first m off-diagonals zero)."""
    levels = []
    for g in S.generators:
        for j in range(1, S.n):
            if any(g.offdiag(j)):
                levels.append(j - 1)
                break
    if not levels:
        raise TrivialGroup("all generators are the identity")
    return min(levels)


def graded_image(S: UniSubgroup, m: int) -> List[List[int]]:
    """HNF basis of the lattice in Z^{n-m-1} spanned by the generators' (m+1)-th off-diagonals."""
    level = filtration_level(S)
    if m != level:
        raise ValueError(f"m = {m} but the filtration level of the generators is {level}")
    return hermite_normal_form([g.offdiag(m + 1) for g in S.generators])


def surjection_to_Z(S: UniSubgroup) -> ZFunctional:
    """Coordinate functional at the first HNF pivot column, divided by the pivot.

    Every lattice vector has a multiple of the pivot in that column (later HNF
    rows vanish there), so the values are integers and the first basis vector
    maps to 1.
    """
    m = filtration_level(S)
    basis = graded_image(S, m)
    first = basis[0]
    col = next(c for c, x in enumerate(first) if x)
    weights = tuple(int(c == col) for c in range(len(first)))
    pivot = first[col]
    vals = []
    for g in S.generators:
        v = g.offdiag(m + 1)[col]
        if v % pivot:
            raise AssertionError("lattice vector off the pivot grid")
        vals.append(v // pivot)
    g = 0
    for v in vals:
        g = gcd(g, v)
    if g != 1:
        # cannot happen for an HNF pivot, kept as a guard on the invariant
        vals = [v // g for v in vals]
        pivot *= g
    return ZFunctional(m, weights, tuple(vals), pivot)


def random_word(rng: random.Random, ngens: int, max_length: int = 20):
    """List of (generator index, +-1)."""
    return [(rng.randrange(ngens), rng.choice((1, -1))) for _ in range(rng.randint(0, max_length))]


def evaluate_word(S: UniSubgroup, word) -> UniMatrix:
    out = UniMatrix.identity(S.n)
    inv = {}
    for i, e in word:
        g = S.generators[i]
        if e < 0:
            if i not in inv:
                inv[i] = g.inverse()
            g = inv[i]
        out = out * g
    return out


def verify_homomorphism(phi: ZFunctional, S: UniSubgroup, trials: int = 1000, seed=None,
                        rng: Optional[random.Random] = None) -> bool:
    """Compare phi(word) with the signed sum of phi's stored generator values on random words."""
    rng = rng or random.Random(seed)
    if not S.generators:
        return phi.raw(UniMatrix.identity(S.n)) == 0
    if len(phi.values_on_generators) != len(S.generators):
        return False
    ok = True
    for _ in range(trials):
        word = random_word(rng, len(S.generators))
        lhs = phi.raw(evaluate_word(S, word))
        rhs = sum(e * phi.values_on_generators[i] for i, e in word)
        ok = ok and lhs == rhs
    return ok
