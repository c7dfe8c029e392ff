from math import gcd

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from whtorsion.groupring import GroupSpec
from whtorsion.whgroups import (
    CITE_PU,
    CITE_Q8,
    SpaceSpec,
    Unsupported,
    WhReport,
    automorphism_count,
    bhs_is_infinite,
    divisor_count,
    euler_phi,
    is_squarefree,
    nil_infinite,
    structures_verdict,
    wh_rank_cyclic,
)

INFINITE = "infinitely many simple structures"
NOT_SATISFIED = "criterion not satisfied"


def _orbits(n, act):
    seen, count = set(), 0
    for x in range(n):
        if x in seen:
            continue
        count += 1
        stack = [x]
        while stack:
            y = stack.pop()
            if y in seen:
                continue
            seen.add(y)
            stack.extend(act(y))
    return count


def rank_oracle(n):
    # real irreducibles: characters up to complex conjugation
    real = _orbits(n, lambda k: [(-k) % n])
    # rational irreducibles: Galois orbits of characters
    units = [a for a in range(1, n + 1) if gcd(a, n) == 1]
    rational = _orbits(n, lambda k: [(a * k) % n for a in units])
    return real - rational


def test_rank_examples():
    assert wh_rank_cyclic(1) == 0
    assert wh_rank_cyclic(6) == 0
    assert wh_rank_cyclic(5) == 1
    assert wh_rank_cyclic(9) == 2


@pytest.mark.parametrize("n", range(1, 61))
def test_rank_matches_representation_count(n):
    assert wh_rank_cyclic(n) == rank_oracle(n)


def test_bad_n():
    for f in (wh_rank_cyclic, nil_infinite, bhs_is_infinite):
        with pytest.raises(ValueError):
            f(0)


def test_nil_examples():
    assert nil_infinite(4)
    assert not nil_infinite(6)
    assert nil_infinite(12)


def test_squarefree_against_factorization():
    for n in range(1, 10 ** 4 + 1):
        expected = all(e == 1 for e in sympy.factorint(n).values())
        assert is_squarefree(n) == expected, n
        assert nil_infinite(n) == (not expected)


def test_divisors_and_phi():
    for n in range(1, 200):
        assert divisor_count(n) == sympy.divisor_count(n)
        assert euler_phi(n) == sympy.totient(n)


def test_bhs_examples():
    assert not bhs_is_infinite(6).total_infinite
    r4 = bhs_is_infinite(4)
    assert r4.total_infinite and r4.nil_infinite and r4.wh_rank == 0
    assert any(r.startswith("Nil:") for r in r4.reasons)
    r5 = bhs_is_infinite(5)
    assert r5.total_infinite and not r5.nil_infinite
    assert any(r.startswith("Wh rank:") for r in r5.reasons)


def test_bhs_criterion():
    for n in range(1, 61):
        rep = bhs_is_infinite(n)
        assert rep.total_infinite == (n not in (1, 2, 3, 6))
        assert rep.k0_finite


def test_report_invariant_enforced():
    with pytest.raises(ValueError):
        WhReport(5, 1, False, True, False, [])


@given(st.integers(1, 5000))
def test_report_consistency(n):
    rep = bhs_is_infinite(n)
    assert rep.total_infinite == (rep.wh_rank > 0 or rep.nil_infinite)
    assert rep.to_json()["n"] == n


# -- automorphisms ---------------------------------------------------------------------------

def _aut_brute(n):
    # homs of Z x Z/n: t -> (a, b), s -> (0, c); count the bijective ones
    count = 0
    for a in range(-3, 4):
        for b in range(n):
            for c in range(n):
                img = lambda k, l: (k * a, (k * b + l * c) % n)
                hits = {img(k, l) for k in range(-3, 4) for l in range(n)}
                onto = (1, 0) in hits and (0, 1 % n) in hits
                kernel = [(k, l) for k in range(-3, 4) for l in range(n) if img(k, l) == (0, 0)]
                if onto and kernel == [(0, 0)]:
                    count += 1
    return count


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 8])
def test_automorphism_count_brute_force(n):
    assert automorphism_count(GroupSpec(1, (n,))) == _aut_brute(n)


def test_automorphism_count_other():
    assert automorphism_count(GroupSpec(1, ())) == 2
    assert automorphism_count(GroupSpec(2, ())) is None


# -- structures ------------------------------------------------------------------------------

def test_lens_five():
    rep = structures_verdict(SpaceSpec("lens_times_circle", p=5))
    assert rep.verdict == INFINITE
    assert rep.data["failing"] == []
    assert rep.data["hypotheses"]["aut_order"] == 40


def test_lens_three():
    rep = structures_verdict(SpaceSpec("lens_times_circle", p=3))
    assert rep.verdict == NOT_SATISFIED
    assert rep.data["failing"] == ["Wh_1 is finite"]


def test_lens_six_follows_group_criterion():
    assert structures_verdict(SpaceSpec("lens_times_circle", p=6)).verdict == NOT_SATISFIED
    assert structures_verdict(SpaceSpec("lens_times_circle", p=1)).verdict == NOT_SATISFIED
    assert structures_verdict(SpaceSpec("lens_times_circle", p=4)).verdict == INFINITE


def test_q8():
    rep = structures_verdict(SpaceSpec("q8_times_circle"))
    assert rep.verdict == INFINITE
    assert CITE_Q8 in rep.citations
    assert rep.data["hypotheses"]["aut_order"] == 96


def test_projective_unitary():
    rep = structures_verdict(SpaceSpec("projective_unitary", n=12))
    assert rep.verdict == INFINITE
    assert CITE_PU in rep.citations
    assert rep.data["pi1"] == GroupSpec(1, (12,)).to_json()
    assert structures_verdict(SpaceSpec("projective_unitary", n=2)).verdict == NOT_SATISFIED


def test_custom_groups():
    rep = structures_verdict(SpaceSpec("custom", group=GroupSpec(0, (5,))))
    assert rep.verdict == NOT_SATISFIED
    assert "pi_1 is finite" in rep.data["failing"]
    rep = structures_verdict(SpaceSpec("custom", group=GroupSpec(1, (5,)), nilpotent=False))
    assert rep.data["failing"] == ["the space is not nilpotent"]
    with pytest.raises(Unsupported):
        structures_verdict(SpaceSpec("custom", group=GroupSpec(1, (2, 4))))


def test_unknown_family():
    with pytest.raises(ValueError):
        SpaceSpec("torus")
