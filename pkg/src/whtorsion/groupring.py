"""Exact arithmetic in integral group rings Z[G] of finitely generated abelian groups.

G is described as Z^r x Z/n_1 x ... x Z/n_k.  A group element is a flat tuple
``(e_1, ..., e_r, a_1, ..., a_k)`` of free exponents followed by residues
``0 <= a_i < n_i``.  Ring elements are finite integer combinations of such
tuples, stored sparsely and kept in canonical (lexicographic) order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Key = Tuple[int, ...]


class SpecMismatch(ValueError):
    """Operands live over different group rings."""


@dataclass(frozen=True)
class GroupSpec:
    free_rank: int = 0
    torsion: Tuple[int, ...] = ()
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(n) for n in self.torsion))
        if self.free_rank < 0:
            raise ValueError("free_rank must be non-negative")
        if any(n < 2 for n in self.torsion):
            raise ValueError("torsion orders must be >= 2")

    @property
    def width(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def torsion_order(self) -> int:
        out = 1
        for n in self.torsion:
            out *= n
        return out

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def identity(self) -> Key:
        return (0,) * self.width

    def reduce(self, key: Sequence[int]) -> Key:
        if len(key) != self.width:
            raise ValueError(f"group element {tuple(key)} has wrong length for {self}")
        r = self.free_rank
        return tuple(key[:r]) + tuple(a % n for a, n in zip(key[r:], self.torsion))

    def op(self, a: Key, b: Key) -> Key:
        cache = self._cache
        out = cache.get((a, b))
        if out is None:
            r = self.free_rank
            out = tuple(x + y for x, y in zip(a[:r], b[:r])) + tuple(
                (x + y) % n for x, y, n in zip(a[r:], b[r:], self.torsion)
            )
            if len(cache) < 200_000:
                cache[(a, b)] = out
        return out

    def inv(self, a: Key) -> Key:
        r = self.free_rank
        return tuple(-x for x in a[:r]) + tuple((-x) % n for x, n in zip(a[r:], self.torsion))

    def torsion_elements(self) -> List[Tuple[int, ...]]:
        return list(itertools.product(*(range(n) for n in self.torsion)))

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, obj) -> "GroupSpec":
        return cls(int(obj.get("free_rank", 0)), tuple(obj.get("torsion", ())))

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Read descriptions like ``"Z x Z/4"``, ``"Z^2 x Z/3 x Z/5"`` or ``"1"``."""
        free, tors = 0, []
        for part in text.replace("*", "x").split("x"):
            part = part.strip()
            if part in ("", "1"):
                continue
            if part == "Z":
                free += 1
            elif part.startswith("Z^"):
                free += int(part[2:])
            elif part.startswith("Z/"):
                tors.append(int(part[2:]))
            else:
                raise ValueError(f"cannot read group factor {part!r}")
        return cls(free, tuple(tors))

    def __str__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{n}" for n in self.torsion]
        return " x ".join(parts) if parts else "1"


class RingElement:
    """An element of Z[G]; immutable, hashable, zero coefficients never stored."""

    __slots__ = ("spec", "_terms", "_hash")

    def __init__(self, spec: GroupSpec, terms=None):
        self.spec = spec
        acc: Dict[Key, int] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for key, c in items:
                k = spec.reduce(key)
                acc[k] = acc.get(k, 0) + int(c)
        self._terms = {k: acc[k] for k in sorted(acc) if acc[k] != 0}
        self._hash = None

    @classmethod
    def _raw(cls, spec, terms):
        # terms already reduced, nonzero and sorted
        obj = cls.__new__(cls)
        obj.spec = spec
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, spec):
        return cls._raw(spec, {})

    @classmethod
    def one(cls, spec):
        return cls._raw(spec, {spec.identity(): 1})

    @classmethod
    def scalar(cls, spec, n: int):
        return cls._raw(spec, {spec.identity(): int(n)} if n else {})

    @classmethod
    def group(cls, spec, key, coeff: int = 1):
        return cls(spec, {tuple(key): coeff})

    @property
    def terms(self) -> Dict[Key, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def support(self) -> List[Key]:
        return list(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_one(self) -> bool:
        return len(self._terms) == 1 and self._terms.get(self.spec.identity()) == 1

    def coefficient(self, key) -> int:
        return self._terms.get(tuple(key), 0)

    def _check(self, other):
        if self.spec != other.spec:
            raise SpecMismatch(f"{self.spec} vs {other.spec}")

    def _coerce(self, other):
        if isinstance(other, int):
            return RingElement.scalar(self.spec, other)
        if isinstance(other, RingElement):
            self._check(other)
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0) + c
        return RingElement._raw(self.spec, {k: acc[k] for k in sorted(acc) if acc[k]})

    __radd__ = __add__

    def __neg__(self):
        return RingElement._raw(self.spec, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return RingElement.zero(self.spec)
        op = self.spec.op
        acc: Dict[Key, int] = {}
        for ka, ca in self._terms.items():
            for kb, cb in other._terms.items():
                k = op(ka, kb)
                acc[k] = acc.get(k, 0) + ca * cb
        return RingElement._raw(self.spec, {k: acc[k] for k in sorted(acc) if acc[k]})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            inv = gr_inverse(self, max(len(self), 1) * self.spec.torsion_order * 4)
            if inv is None:
                raise ValueError("no inverse found for negative power")
            return inv ** (-n)
        out = RingElement.one(self.spec)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, key) -> "RingElement":
        """Multiply by the group element ``key``."""
        return self * RingElement.group(self.spec, key)

    def __eq__(self, other):
        if isinstance(other, int):
            other = RingElement.scalar(self.spec, other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.spec == other.spec and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec.free_rank, self.spec.torsion, tuple(self._terms.items())))
        return self._hash

    def sort_key(self):
        return tuple(self._terms.items())

    def to_json(self) -> list:
        return [[list(k), c] for k, c in self._terms.items()]

    @classmethod
    def from_json(cls, spec: GroupSpec, obj) -> "RingElement":
        if isinstance(obj, int):
            return cls.scalar(spec, obj)
        terms = []
        for pair in obj:
            key, c = pair
            if len(key) != spec.width:
                raise ValueError(f"group element {key} does not match {spec}")
            if not isinstance(c, int):
                raise ValueError(f"coefficient {c!r} is not an integer")
            terms.append((tuple(int(x) for x in key), c))
        return cls(spec, terms)

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*{_fmt_key(self.spec, k)}" for k, c in self._terms.items())


def _fmt_key(spec: GroupSpec, key: Key) -> str:
    if key == spec.identity():
        return "1"
    names = [f"t{i}" for i in range(spec.free_rank)] + [f"g{i}" for i in range(len(spec.torsion))]
    return "".join(f"{n}^{e}" for n, e in zip(names, key) if e)


def gr_mul(a: RingElement, b: RingElement) -> RingElement:
    a._check(b)
    return a * b


def is_trivial_unit(u: RingElement) -> bool:
    """True iff u = +-g for a group element g."""
    if len(u) != 1:
        return False
    (c,) = u._terms.values()
    return c in (1, -1)


def _trivial_inverse(u: RingElement) -> RingElement:
    ((k, c),) = u._terms.items()
    return RingElement._raw(u.spec, {u.spec.inv(k): c})


# -- exact rational linear solve ---------------------------------------------------------

def solve_rational(rows: List[List[int]], rhs: List[int]) -> Optional[List[Fraction]]:
    """Solve an (over/under-determined) system exactly; None when inconsistent.

    Free variables, if any, are set to zero.
    """
    n = len(rows[0]) if rows else 0
    A = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    pivots = []
    row = 0
    for col in range(n):
        piv = next((i for i in range(row, len(A)) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        p = A[row][col]
        A[row] = [x / p for x in A[row]]
        for i in range(len(A)):
            if i != row and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[row])]
        pivots.append(col)
        row += 1
        if row == len(A):
            break
    for i in range(row, len(A)):
        if A[i][n] != 0:
            return None
    sol = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        sol[col] = A[i][n]
    return sol


def _solve_on_box(u: RingElement, unknowns: List[Key]) -> Optional[List[Fraction]]:
    spec = u.spec
    index: Dict[Key, int] = {}
    cols: Dict[Key, Dict[int, int]] = {}
    for j, kv in enumerate(unknowns):
        for ku, cu in u.items():
            k = spec.op(ku, kv)
            cols.setdefault(k, {})
            cols[k][j] = cols[k].get(j, 0) + cu
    one = spec.identity()
    cols.setdefault(one, {})
    eqs = sorted(cols)
    rows = [[cols[k].get(j, 0) for j in range(len(unknowns))] for k in eqs]
    rhs = [1 if k == one else 0 for k in eqs]
    del index
    return solve_rational(rows, rhs)


def gr_inverse(u: RingElement, support_bound: Optional[int] = None) -> Optional[RingElement]:
    """Search for v with u*v = 1 among elements of bounded support.

    Returns None when no inverse is found.  None is *not* a proof that u is not a
    unit: for groups with a free part only finitely many exponent windows are
    searched.  In a commutative ring an inverse is unique, so any rational
    solution of the coefficient system on a window is the inverse itself.
    """
    spec = u.spec
    if u.is_zero():
        return None
    if support_bound is None:
        support_bound = default_support_bound(u)
    if is_trivial_unit(u):
        return _trivial_inverse(u)
    tors = spec.torsion_elements()
    r = spec.free_rank
    if r == 0:
        windows = [[()]]
    else:
        lo = [min(k[i] for k in u.support()) for i in range(r)]
        hi = [max(k[i] for k in u.support()) for i in range(r)]
        windows = []
        w = 0
        while (w + 1) ** r <= max(support_bound, 1) and w <= support_bound:
            ranges = [range(-hi[i] - w, -lo[i] + 1) for i in range(r)]
            for offset in itertools.product(*ranges):
                windows.append([tuple(o + d for o, d in zip(offset, delta))
                                for delta in itertools.product(range(w + 1), repeat=r)])
            w += 1
    for free_box in windows:
        unknowns = [tuple(f) + tuple(t) for f in free_box for t in tors]
        sol = _solve_on_box(u, unknowns)
        if sol is None:
            continue
        if any(x.denominator != 1 for x in sol):
            # u is invertible over Q[G] but not over Z[G]
            return None
        v = RingElement(spec, [(k, int(x)) for k, x in zip(unknowns, sol) if x])
        if (u * v).is_one():
            return v if len(v) <= support_bound else None
    return None


def default_support_bound(u: RingElement) -> int:
    spec = u.spec
    span = 0
    for i in range(spec.free_rank):
        vals = [k[i] for k in u.support()]
        span += max(vals) - min(vals)
    return spec.torsion_order * (2 * span + 3)


# -- matrices ----------------------------------------------------------------------------

class RingMatrix:
    """A rows x cols matrix over Z[G]; matrices act on column vectors."""

    __slots__ = ("spec", "rows", "cols", "entries")

    def __init__(self, spec: GroupSpec, rows: int, cols: int, entries=None):
        self.spec = spec
        self.rows = rows
        self.cols = cols
        if entries is None:
            z = RingElement.zero(spec)
            entries = [[z] * cols for _ in range(rows)]
        else:
            entries = [list(r) for r in entries]
            if len(entries) != rows or any(len(r) != cols for r in entries):
                raise ValueError(f"entry grid does not match shape {rows}x{cols}")
            for r in entries:
                for i, x in enumerate(r):
                    if isinstance(x, int):
                        r[i] = RingElement.scalar(spec, x)
                    elif x.spec != spec:
                        raise SpecMismatch(f"{x.spec} vs {spec}")
        self.entries = tuple(tuple(r) for r in entries)

    @classmethod
    def zeros(cls, spec, rows, cols):
        return cls(spec, rows, cols)

    @classmethod
    def identity(cls, spec, n, scalar: Optional[RingElement] = None):
        s = RingElement.one(spec) if scalar is None else scalar
        z = RingElement.zero(spec)
        return cls(spec, n, n, [[s if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, spec, diag: Sequence[RingElement]):
        n = len(diag)
        z = RingElement.zero(spec)
        return cls(spec, n, n, [[diag[i] if i == j else z for j in range(n)] for i in range(n)])

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.entries for x in r)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._same_shape(other)
        return RingMatrix(self.spec, self.rows, self.cols,
                          [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._same_shape(other)
        return RingMatrix(self.spec, self.rows, self.cols,
                          [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __neg__(self):
        return RingMatrix(self.spec, self.rows, self.cols, [[-a for a in r] for r in self.entries])

    def scale(self, s: RingElement) -> "RingMatrix":
        return RingMatrix(self.spec, self.rows, self.cols, [[s * a for a in r] for r in self.entries])

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"cannot compose {self.shape} with {other.shape}")
        z = RingElement.zero(self.spec)
        cols_b = [[other.entries[k][j] for k in range(other.rows)] for j in range(other.cols)]
        out = []
        for ra in self.entries:
            nz = [(k, a) for k, a in enumerate(ra) if not a.is_zero()]
            row = []
            for cb in cols_b:
                acc = z
                for k, a in nz:
                    b = cb[k]
                    if not b.is_zero():
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return RingMatrix(self.spec, self.rows, other.cols, out)

    def __eq__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return self.spec == other.spec and self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.shape, self.entries))

    def map_entries(self, fn, spec: Optional[GroupSpec] = None) -> "RingMatrix":
        return RingMatrix(spec or self.spec, self.rows, self.cols, [[fn(a) for a in r] for r in self.entries])

    def to_json(self) -> list:
        return [[a.to_json() for a in r] for r in self.entries]

    @classmethod
    def from_json(cls, spec, obj, rows: int, cols: int) -> "RingMatrix":
        if rows == 0 or cols == 0:
            if obj not in ([], [[]] * rows):
                raise ValueError("expected an empty matrix")
            return cls(spec, rows, cols)
        if len(obj) != rows or any(len(r) != cols for r in obj):
            raise ValueError(f"matrix does not have shape {rows}x{cols}")
        return cls(spec, rows, cols, [[RingElement.from_json(spec, a) for a in r] for r in obj])

    def __repr__(self):
        return f"RingMatrix({self.rows}x{self.cols}, {[list(r) for r in self.entries]})"


def block_matrix(spec, blocks: Sequence[Sequence[Optional[RingMatrix]]],
                 row_sizes: Sequence[int], col_sizes: Sequence[int]) -> RingMatrix:
    """Assemble a matrix from blocks; ``None`` blocks are zero."""
    z = RingElement.zero(spec)
    out = [[z] * sum(col_sizes) for _ in range(sum(row_sizes))]
    r0 = 0
    for bi, rs in enumerate(row_sizes):
        c0 = 0
        for bj, cs in enumerate(col_sizes):
            b = blocks[bi][bj]
            if b is not None:
                if b.shape != (rs, cs):
                    raise ValueError(f"block ({bi},{bj}) has shape {b.shape}, expected {(rs, cs)}")
                for i in range(rs):
                    for j in range(cs):
                        out[r0 + i][c0 + j] = b.entries[i][j]
            c0 += cs
        r0 += rs
    return RingMatrix(spec, sum(row_sizes), sum(col_sizes), out)


def submatrix(M: RingMatrix, rows: Sequence[int], cols: Sequence[int]) -> RingMatrix:
    return RingMatrix(M.spec, len(rows), len(cols), [[M.entries[i][j] for j in cols] for i in rows])


# -- determinants ------------------------------------------------------------------------

def det_berkowitz(M: RingMatrix) -> RingElement:
    """Division-free determinant (Berkowitz), valid over any commutative ring."""
    n = M.rows
    spec = M.spec
    if n != M.cols:
        raise ValueError("determinant of a non-square matrix")
    one = RingElement.one(spec)
    zero = RingElement.zero(spec)
    if n == 0:
        return one
    A = [list(r) for r in M.entries]
    # characteristic polynomial coefficients, highest degree first
    poly = [one, -A[0][0]]
    for r in range(1, n):
        # leading principal (r+1)x(r+1) block: [[B, C],[R, a]]
        B = [row[:r] for row in A[:r]]
        C = [A[i][r] for i in range(r)]
        R = A[r][:r]
        a = A[r][r]
        # Toeplitz column: 1, -a, -R C, -R B C, ..., -R B^{r-1} C
        col = [one, -a]
        v = C
        for _ in range(r):
            s = zero
            for x, y in zip(R, v):
                if not x.is_zero() and not y.is_zero():
                    s = s + x * y
            col.append(-s)
            nv = []
            for row in B:
                acc = zero
                for x, y in zip(row, v):
                    if not x.is_zero() and not y.is_zero():
                        acc = acc + x * y
                nv.append(acc)
            v = nv
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, r) + 1):
                if i - j < len(col):
                    p, c = poly[j], col[i - j]
                    if not p.is_zero() and not c.is_zero():
                        acc = acc + c * p
            new.append(acc)
        poly = new
    d = poly[-1]
    return d if n % 2 == 0 else -d


def det_laplace(M: RingMatrix) -> RingElement:
    """Cofactor expansion along rows with memoized column subsets."""
    n = M.rows
    if n != M.cols:
        raise ValueError("determinant of a non-square matrix")
    spec = M.spec
    A = M.entries
    memo = {0: RingElement.one(spec)}
    for row in range(n):
        nxt = {}
        for mask, val in memo.items():
            if val.is_zero():
                continue
            seen = 0
            for j in range(n):
                if mask >> j & 1:
                    seen += 1
                    continue
                a = A[row][j]
                if a.is_zero():
                    continue
                # sign: number of used columns greater than j
                used_above = bin(mask >> (j + 1)).count("1")
                term = val * a
                if used_above % 2:
                    term = -term
                m2 = mask | (1 << j)
                nxt[m2] = nxt[m2] + term if m2 in nxt else term
        memo = nxt
    return memo.get((1 << n) - 1, RingElement.zero(spec))


def gr_det(M: RingMatrix) -> RingElement:
    """Exact determinant over a commutative group ring.

    Gaussian elimination on trivial-unit pivots (no division needed) reduces
    the matrix; whatever remains is handed to the Berkowitz algorithm.
    """
    if M.rows != M.cols:
        raise ValueError(f"determinant of a non-square {M.rows}x{M.cols} matrix")
    spec = M.spec
    n = M.rows
    A = [list(r) for r in M.entries]
    det = RingElement.one(spec)
    col = 0
    while col < n:
        piv = None
        for i in range(col, n):
            a = A[i][col]
            if is_trivial_unit(a) and (piv is None or _row_weight(A[i]) < _row_weight(A[piv])):
                piv = i
        if piv is None:
            if all(A[i][col].is_zero() for i in range(col, n)):
                return RingElement.zero(spec)
            break
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            det = -det
        p = A[col][col]
        det = det * p
        pinv = _trivial_inverse(p)
        prow = A[col]
        for i in range(col + 1, n):
            a = A[i][col]
            if a.is_zero():
                continue
            f = a * pinv
            row = A[i]
            for j in range(col + 1, n):
                if not prow[j].is_zero():
                    row[j] = row[j] - f * prow[j]
        col += 1
    if col < n:
        rest = RingMatrix(spec, n - col, n - col, [r[col:] for r in A[col:]])
        det = det * det_berkowitz(rest)
    return det


def _row_weight(row) -> int:
    return sum(len(x) for x in row)


def include(x: RingElement, target: GroupSpec, position: Optional[int] = None) -> RingElement:
    """Push x along Z[H] -> Z[H x Z] (a new free coordinate inserted at ``position``).

    ``position`` defaults to just after the existing free coordinates.
    """
    src = x.spec
    if position is None:
        position = src.free_rank
    if target.free_rank != src.free_rank + 1 or target.torsion != src.torsion:
        raise SpecMismatch(f"{target} does not extend {src} by one free factor")
    return RingElement(target, [(k[:position] + (0,) + k[position:], c) for k, c in x.items()])
