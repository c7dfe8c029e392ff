"""Random instances for the property suites and the CLI's randomized verifiers.

Every complex is built from a *paired* model (basis vectors ``e`` in degree k
with ``d e = lam e'`` for a trivial unit ``lam``, plus unpaired cycles) and then
conjugated degreewise by based automorphisms whose inverses are tracked.  This
gives non-obvious differentials together with exact contractions and
self-equivalences without solving any equations over the group ring.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd
from typing import Dict, List, Optional, Tuple

from .chains import (
    BasedComplex,
    Contraction,
    EquivalencePack,
    GradedMap,
    commutator_with_d,
    perturb_pack,
)
from .groupring import GroupSpec, RingElement, RingMatrix, gr_inverse

Unit = Tuple[RingElement, RingElement]


def bass_unit(spec: GroupSpec, axis: int, k: int) -> Optional[Unit]:
    """Bass cyclic unit ``(1 + x + ... + x^{k-1})^m + (1 - k^m)/n * N`` on torsion factor ``axis``.

    ``x`` generates the factor (order n), ``m`` is the order of k mod n and N is
    the norm element.  Returns (unit, inverse) or None when k is unsuitable.
    """
    n = spec.torsion[axis]
    if gcd(k, n) != 1 or k % n in (1, n - 1):
        return None
    m = 1
    while pow(k, m, n) != 1:
        m += 1
    key = [0] * spec.width
    key[spec.free_rank + axis] = 1
    x = RingElement.group(spec, key)
    one = RingElement.one(spec)
    s = RingElement.zero(spec)
    p = one
    for _ in range(k):
        s = s + p
        p = p * x
    norm = RingElement.zero(spec)
    p = one
    for _ in range(n):
        norm = norm + p
        p = p * x
    u = s ** m + norm * ((1 - k ** m) // n)
    inv = gr_inverse(u)
    if inv is None:
        return None
    return u, inv


def unit_pool(spec: GroupSpec) -> List[Unit]:
    """A few nontrivial units (with inverses) of Z[G]; empty when none are known."""
    pool = []
    for axis, n in enumerate(spec.torsion):
        for k in range(2, n - 1):
            bu = bass_unit(spec, axis, k)
            if bu is not None:
                pool.append(bu)
            if len(pool) >= 2:
                break
    return pool


class Sampler:
    """Seeded source of random group-ring data over a fixed GroupSpec."""

    def __init__(self, spec: GroupSpec, seed=None, rng: Optional[random.Random] = None):
        self.spec = spec
        self.rng = rng or random.Random(seed)
        self._units = None

    @property
    def units(self) -> List[Unit]:
        if self._units is None:
            self._units = unit_pool(self.spec)
        return self._units

    def group_key(self, spread: int = 1):
        spec = self.spec
        free = [self.rng.randint(-spread, spread) for _ in range(spec.free_rank)]
        tors = [self.rng.randrange(n) for n in spec.torsion]
        return tuple(free + tors)

    def trivial_unit(self) -> Unit:
        key = self.group_key()
        sign = self.rng.choice((1, -1))
        u = RingElement.group(self.spec, key, sign)
        return u, RingElement.group(self.spec, self.spec.inv(u.support()[0]), sign)

    def unit(self, nontrivial_prob: float = 0.3) -> Unit:
        u, ui = self.trivial_unit()
        if self.units and self.rng.random() < nontrivial_prob:
            v, vi = self.rng.choice(self.units)
            if self.rng.random() < 0.5:
                v, vi = vi, v
            u, ui = u * v, ui * vi
        return u, ui

    def element(self, terms: int = 2, coeff: int = 2) -> RingElement:
        out = RingElement.zero(self.spec)
        for _ in range(self.rng.randint(0, terms)):
            c = self.rng.randint(-coeff, coeff)
            if c:
                out = out + RingElement.group(self.spec, self.group_key(), c)
        return out

    def matrix(self, rows: int, cols: int, density: float = 0.4) -> RingMatrix:
        zero = RingElement.zero(self.spec)
        ents = [[self.element() if self.rng.random() < density else zero for _ in range(cols)]
                for _ in range(rows)]
        return RingMatrix(self.spec, rows, cols, ents)

    def automorphism(self, n: int, moves: int = 2) -> Tuple[RingMatrix, RingMatrix]:
        """A based automorphism (product of shears and a trivial-unit diagonal) with its inverse."""
        spec = self.spec
        diag = [self.trivial_unit() for _ in range(n)]
        P = RingMatrix.diagonal(spec, [u for u, _ in diag])
        Pi = RingMatrix.diagonal(spec, [ui for _, ui in diag])
        if n < 2:
            return P, Pi
        for _ in range(self.rng.randint(0, moves)):
            i, j = self.rng.sample(range(n), 2)
            x = self.element(terms=1)
            if x.is_zero():
                continue
            E = _shear(spec, n, i, j, x)
            Ei = _shear(spec, n, i, j, -x)
            P, Pi = E @ P, Pi @ Ei
        return P, Pi

    def graded_map(self, C: BasedComplex, D: BasedComplex, degree: int, density: float = 0.3) -> GradedMap:
        comps = {}
        for k in C.degrees():
            r, c = D.rank(k + degree), C.rank(k)
            if r and c and self.rng.random() < 0.7:
                comps[k] = self.matrix(r, c, density)
        return GradedMap(C, D, degree, comps)


def _shear(spec, n, i, j, x) -> RingMatrix:
    zero = RingElement.zero(spec)
    one = RingElement.one(spec)
    ents = [[one if a == b else (x if (a, b) == (i, j) else zero) for b in range(n)] for a in range(n)]
    return RingMatrix(spec, n, n, ents)


@dataclass
class PairedModel:
    """A complex conjugated from a paired model, remembering how it was built.

    ``pairs[k]`` lists (source index in degree k, target index in degree k-1, lam, lam^-1).
    ``P[k]``/``Pi[k]`` are the conjugating automorphisms, so that
    ``d_k = P[k-1] d0_k Pi[k]``.
    """

    complex: BasedComplex
    pairs: Dict[int, List[tuple]]
    P: Dict[int, RingMatrix]
    Pi: Dict[int, RingMatrix]

    @property
    def spec(self):
        return self.complex.spec

    def conjugate(self, phi0: Dict[int, RingMatrix], degree: int) -> GradedMap:
        C = self.complex
        return GradedMap(C, C, degree, {k: self.P[k + degree] @ m @ self.Pi[k]
                                        for k, m in phi0.items() if C.rank(k) and C.rank(k + degree)})

    def contraction(self) -> Contraction:
        """The contraction inverting each pair; needs an acyclic model."""
        spec = self.spec
        C = self.complex
        comps = {}
        for k in C.degrees():
            if not C.rank(k) or not C.rank(k + 1):
                continue
            m = [[RingElement.zero(spec)] * C.rank(k) for _ in range(C.rank(k + 1))]
            for src, tgt, _, lam_inv in self.pairs.get(k + 1, []):
                m[src][tgt] = lam_inv
            comps[k] = RingMatrix(spec, C.rank(k + 1), C.rank(k), m)
        return Contraction(C, self.conjugate(comps, 1))

    def is_acyclic_model(self) -> bool:
        used = {k: 0 for k in self.complex.degrees()}
        for k, ps in self.pairs.items():
            used[k] += len(ps)
            used[k - 1] += len(ps)
        return all(used[k] == self.complex.rank(k) for k in self.complex.degrees())

    def diagonal_unit(self, sampler: Sampler, nontrivial_prob: float = 0.3) -> Tuple[GradedMap, GradedMap]:
        """A chain automorphism diagonal in the model basis (equal units on paired vectors) and its inverse."""
        C = self.complex
        spec = self.spec
        vals: Dict[Tuple[int, int], Unit] = {}
        for k in sorted(self.pairs, reverse=True):
            for src, tgt, _, _ in self.pairs[k]:
                v = sampler.unit(nontrivial_prob)
                vals[(k, src)] = v
                vals[(k - 1, tgt)] = v
        fwd, bwd = {}, {}
        for k in C.degrees():
            n = C.rank(k)
            if not n:
                continue
            diag = [vals.get((k, i)) or sampler.unit(nontrivial_prob) for i in range(n)]
            fwd[k] = RingMatrix.diagonal(spec, [u for u, _ in diag])
            bwd[k] = RingMatrix.diagonal(spec, [ui for _, ui in diag])
        return self.conjugate(fwd, 0), self.conjugate(bwd, 0)


def paired_model(sampler: Sampler, lo: int, hi: int, ranks: List[int], acyclic: bool = False,
                 moves: int = 2) -> PairedModel:
    """Random complex with the given ranks; if ``acyclic``, ranks must admit a full pairing."""
    spec = sampler.spec
    rng = sampler.rng
    free = {k: list(range(ranks[k - lo])) for k in range(lo, hi + 1)}
    for k in free:
        rng.shuffle(free[k])
    pairs: Dict[int, List[tuple]] = {}
    if acyclic:
        # boundary ranks force how many pairs cross each step
        prev = 0
        bs = []
        for k in range(lo, hi + 1):
            b = ranks[k - lo] - prev
            if b < 0 or (k == hi and b):
                raise ValueError(f"ranks {ranks} admit no acyclic complex")
            bs.append(b)
            prev = b
        for k, b in zip(range(lo, hi + 1), bs):
            for _ in range(b):
                lam, lam_inv = sampler.trivial_unit()
                pairs.setdefault(k + 1, []).append((free[k + 1].pop(), free[k].pop(), lam, lam_inv))
    else:
        for k in range(hi, lo, -1):
            for _ in range(min(len(free[k]), len(free[k - 1]))):
                if rng.random() < 0.6:
                    lam, lam_inv = sampler.trivial_unit()
                    pairs.setdefault(k, []).append((free[k].pop(), free[k - 1].pop(), lam, lam_inv))
    P, Pi, diffs = {}, {}, {}
    for k in range(lo - 1, hi + 2):
        n = ranks[k - lo] if lo <= k <= hi else 0
        P[k], Pi[k] = sampler.automorphism(n, moves)
    zero = RingElement.zero(spec)
    for k in range(lo + 1, hi + 1):
        r, c = ranks[k - 1 - lo], ranks[k - lo]
        m = [[zero] * c for _ in range(r)]
        for src, tgt, lam, _ in pairs.get(k, []):
            m[tgt][src] = lam
        diffs[k] = P[k - 1] @ RingMatrix(spec, r, c, m) @ Pi[k]
    C = BasedComplex(spec, lo, hi, ranks, diffs)
    return PairedModel(C, pairs, P, Pi)


def random_ranks(rng: random.Random, max_rank: int, max_length: int, acyclic: bool = False) -> Tuple[int, List[int]]:
    """(lo, ranks) for a complex of length <= max_length (number of degrees)."""
    lo = rng.randint(-1, 1)
    length = rng.randint(1, max_length)
    if not acyclic:
        return lo, [rng.randint(0, max_rank) for _ in range(length)]
    length = max(length, 2)
    while True:
        b = [rng.randint(0, max_rank) for _ in range(length - 1)] + [0]
        ranks = [b[0]] + [b[k] + b[k - 1] for k in range(1, length)]
        if max(ranks) <= max_rank and sum(ranks):
            return lo, ranks


def random_complex(sampler: Sampler, max_rank: int = 3, max_length: int = 3, acyclic: bool = False) -> PairedModel:
    lo, ranks = random_ranks(sampler.rng, max_rank, max_length, acyclic)
    return paired_model(sampler, lo, lo + len(ranks) - 1, ranks, acyclic)


def second_contraction(sampler: Sampler, c: Contraction, square_zero: Optional[bool] = None) -> Contraction:
    """``delta + ds - sd`` for a random degree-2 map s, optionally made square-zero."""
    C = c.complex
    s = sampler.graded_map(C, C, 2)
    alt = Contraction(C, c.delta + commutator_with_d(s))
    if square_zero is None:
        square_zero = sampler.rng.random() < 0.5
    return alt.square_zero() if square_zero else alt


def random_self_equivalence(sampler: Sampler, model: PairedModel, nontrivial_prob: float = 0.3,
                            perturb: bool = True) -> Tuple[EquivalencePack, GradedMap, GradedMap]:
    """(pack, alpha, s): pack.f = alpha + [d, s] with alpha diagonal in the model basis."""
    C = model.complex
    a, ai = model.diagonal_unit(sampler, nontrivial_prob)
    zero = C.zero_map(C, 1)
    p = EquivalencePack(a, ai, zero, zero)
    s = sampler.graded_map(C, C, 1) if perturb else zero
    return (perturb_pack(p, s) if perturb else p), a, s


def commuting_pair(sampler: Sampler, model: PairedModel, nontrivial_prob: float = 0.3):
    """Self-equivalences f, g with a homotopy ``comm`` : fg ~ gf (so ``[d, comm] = fg - gf``)."""
    f, a, s1 = random_self_equivalence(sampler, model, nontrivial_prob)
    g, b, s2 = random_self_equivalence(sampler, model, nontrivial_prob)
    d1, d2 = commutator_with_d(s1), commutator_with_d(s2)
    comm = a @ s2 - s2 @ a + s1 @ b - b @ s1 + s1 @ d2 - s2 @ d1
    return f, g, comm
