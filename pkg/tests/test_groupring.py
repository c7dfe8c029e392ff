import cmath
import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from whtorsion.groupring import (
    GroupSpec,
    RingElement,
    RingMatrix,
    SpecMismatch,
    det_laplace,
    gr_det,
    gr_inverse,
    gr_mul,
    include,
    is_trivial_unit,
)
from whtorsion.samples import Sampler, bass_unit

Z5 = GroupSpec(0, (5,))
Z = GroupSpec(1, ())
ZZ4 = GroupSpec(1, (4,))
SPECS = [Z5, GroupSpec(0, (12,)), ZZ4, GroupSpec(2, (3,)), GroupSpec(0, (2, 4))]


def gen(spec, *key, c=1):
    return RingElement.group(spec, key, c)


def elements(spec, max_terms=4, coeff=3, spread=2):
    key = st.tuples(*([st.integers(-spread, spread)] * spec.free_rank
                      + [st.integers(0, n - 1) for n in spec.torsion]))
    pair = st.tuples(key, st.integers(-coeff, coeff))
    return st.lists(pair, max_size=max_terms).map(lambda ts: RingElement(spec, ts))


# -- examples ----------------------------------------------------------------------------

def test_exponent_reduction():
    g = gen(Z5, 1)
    assert gr_mul(g, g ** 4).is_one()


def test_laurent_identity():
    t = gen(Z, 1)
    assert (1 + t) * (1 - t) == 1 - t * t


def test_unit_inverse_z5():
    g = gen(Z5, 1)
    u = g + g ** 4 - 1
    v = gr_inverse(u, 5)
    assert v == -1 + g ** 2 + g ** 3
    assert gr_mul(u, v).is_one()


def test_unit_inverse_character_oracle():
    # independent check: u(z) v(z) = 1 at every 5th root of unity
    g = gen(Z5, 1)
    u = g + g ** 4 - 1
    v = gr_inverse(u, 5)
    for j in range(5):
        z = cmath.exp(2j * cmath.pi * j / 5)
        ev = lambda x: sum(c * z ** k[0] for k, c in x.items())
        assert abs(ev(u) * ev(v) - 1) < 1e-12


def test_inverse_trivial_cases():
    assert gr_inverse(RingElement.one(Z5), 1).is_one()
    g = gen(Z5, 1)
    assert gr_inverse(-g, 1) == -(g ** 4)


def test_inverse_not_found_for_nonunit():
    t = gen(Z, 1)
    assert gr_inverse(1 + t, 4) is None
    assert gr_inverse(RingElement.scalar(Z5, 2)) is None


def test_mismatched_specs():
    with pytest.raises(SpecMismatch):
        gr_mul(gen(Z5, 1), gen(Z, 1))


def test_det_examples():
    g = gen(Z5, 1)
    u = g + g ** 4 - 1
    v = gen(Z5, 2) * 3 - 1
    assert gr_det(RingMatrix.identity(Z5, 4)).is_one()
    assert gr_det(RingMatrix.diagonal(Z5, [u, v])) == u * v
    I = RingMatrix.identity(Z5, 3)
    ents = [list(r) for r in I.entries]
    ents[0][2] = u
    assert gr_det(RingMatrix(Z5, 3, 3, ents)).is_one()


def test_det_nonsquare():
    with pytest.raises(ValueError):
        gr_det(RingMatrix.zeros(Z5, 2, 3))


def test_trivial_unit_examples():
    g = gen(Z5, 1)
    assert is_trivial_unit(-g)
    assert is_trivial_unit(RingElement.one(Z5))
    assert not is_trivial_unit(g + g ** 4 - 1)
    assert not is_trivial_unit(RingElement.zero(Z5))
    assert not is_trivial_unit(2 * g)


def test_json_round_trip_exact():
    spec = GroupSpec(1, (3, 4))
    x = RingElement(spec, [((2, 1, 3), 5), ((-1, 0, 0), -7)])
    obj = x.to_json()
    assert obj == [[[-1, 0, 0], -7], [[2, 1, 3], 5]]
    assert RingElement.from_json(spec, obj) == x
    assert GroupSpec.from_json(spec.to_json()) == spec


def test_terms_canonical():
    x = RingElement(Z5, [((7,), 2), ((2,), -2), ((1,), 0)])
    assert x.is_zero()
    y = RingElement(Z5, [((3,), 1), ((1,), 1)])
    assert list(y.terms) == [(1,), (3,)]


def test_include_adds_free_coordinate():
    H = GroupSpec(0, (5,))
    A = GroupSpec(1, (5,))
    x = include(gen(H, 2), A)
    assert x == gen(A, 0, 2)


def test_bass_units_are_units():
    for n in (5, 8, 12):
        spec = GroupSpec(0, (n,))
        u, v = bass_unit(spec, 0, 3 if n != 12 else 5)
        assert (u * v).is_one()
        assert not is_trivial_unit(u)


def test_group_parse():
    assert GroupSpec.parse("Z x Z/4") == ZZ4
    assert GroupSpec.parse("Z^2 x Z/3") == GroupSpec(2, (3,))
    assert GroupSpec.parse("1") == GroupSpec()


# -- sympy determinant oracle -------------------------------------------------------------

def _to_poly(x, n, var):
    return sum(c * var ** k[0] for k, c in x.items())


def _from_poly(expr, n, var):
    p = sympy.Poly(sympy.expand(expr), var)
    red = sympy.rem(p, sympy.Poly(var ** n - 1, var))
    return RingElement(GroupSpec(0, (n,)), [((int(m[0]),), int(c)) for m, c in red.terms()])


@pytest.mark.parametrize("n", [5, 12])
def test_det_matches_sympy(n):
    spec = GroupSpec(0, (n,))
    X = sympy.Symbol("X")
    sm = Sampler(spec, seed=n)
    for size in (2, 3, 4):
        M = sm.matrix(size, size, density=0.8)
        S = sympy.Matrix(size, size, lambda i, j: _to_poly(M[i, j], n, X))
        assert gr_det(M) == _from_poly(S.det(method="berkowitz"), n, X)


# -- properties ---------------------------------------------------------------------------

@settings(max_examples=1000)
@given(st.sampled_from(SPECS).flatmap(lambda s: st.tuples(elements(s), elements(s), elements(s))))
def test_mul_associative_commutative(abc):
    a, b, c = abc
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@settings(max_examples=60)
@given(st.sampled_from(SPECS), st.integers(0, 10 ** 6))
def test_det_multiplicative(spec, seed):
    sm = Sampler(spec, seed=seed)
    A = sm.matrix(3, 3, density=0.7)
    B = sm.matrix(3, 3, density=0.7)
    assert gr_det(A @ B) == gr_det(A) * gr_det(B)


@settings(max_examples=60)
@given(st.sampled_from(SPECS[:3]), st.integers(0, 10 ** 6))
def test_det_matches_laplace(spec, seed):
    sm = Sampler(spec, seed=seed)
    M = sm.matrix(4, 4, density=0.6)
    assert gr_det(M) == det_laplace(M)


@settings(max_examples=100)
@given(st.sampled_from(SPECS), st.integers(0, 10 ** 6))
def test_inverse_multiplies_to_one(spec, seed):
    sm = Sampler(spec, seed=seed)
    u, _ = sm.unit(nontrivial_prob=0.7)
    v = gr_inverse(u)
    assert v is not None and gr_mul(u, v).is_one()
    x = sm.element(terms=3)
    w = gr_inverse(x, 6)
    if w is not None:
        assert gr_mul(x, w).is_one()


@settings(max_examples=200)
@given(st.sampled_from(SPECS), st.integers(0, 10 ** 6))
def test_trivial_units_closed(spec, seed):
    sm = Sampler(spec, seed=seed)
    a, _ = sm.trivial_unit()
    b, _ = sm.trivial_unit()
    assert is_trivial_unit(gr_mul(a, b))


@settings(max_examples=100)
@given(st.sampled_from(SPECS).flatmap(elements))
def test_element_json_round_trip(x):
    assert RingElement.from_json(x.spec, x.to_json()) == x


def test_matrix_json_round_trip():
    sm = Sampler(ZZ4, rng=random.Random(5))
    M = sm.matrix(2, 3, density=0.9)
    assert RingMatrix.from_json(ZZ4, M.to_json(), 2, 3) == M
