"""Gersten torsion of self-equivalences and the two vanishing verifiers.

Both verifiers work with the same shape of map: a self-map ``phi`` of a complex
``Y``, a self-equivalence ``g`` of ``Y`` and a witness ``X`` with
``[d, X] = g phi - phi g``.  Then ``[[g, X], [0, g]]`` is a self-map of
``cone(phi)``, and :func:`triangular_pack` builds its full equivalence data out
of g's witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chains import (
    BasedComplex,
    ChainHomotopy,
    ConeComplex,
    EquivalencePack,
    GradedMap,
    InvariantError,
    commutator_with_d,
    cone_block,
    induce_complex,
    induce_pack,
    mapping_cone,
    whitehead_torsion,
)
from .groupring import GroupSpec, RingElement, include, is_trivial_unit
from .k1 import K1Class, WhClass, canonical_associate, to_whitehead
from .reports import Report

__all__ = [
    "K1Class", "WhClass", "to_whitehead", "canonical_associate", "gersten_torsion",
    "triangular_pack", "swindle_check", "TorusSpec", "mapping_torus", "torus_vanishing_check",
]

SWINDLE_CITATION = ("Waldhausen additivity theorem: a self-equivalence of a cofibre sequence "
                    "acting by the same map on sub and quotient has trivial class in K_1")
TORUS_CITATION = ("Vanishing of Gersten torsion for self-equivalences of a space fibred over S^1, "
                  "via the cofibre sequence Y -> Y -> T(m) and the additivity swindle")
SK1_CAVEAT = ("K_1 classes are represented by determinants; SK_1 of this group ring is not modelled, "
              "so triviality is determinant-triviality")


def gersten_torsion(p: EquivalencePack) -> K1Class:
    """K_1 class of the contractible cone of a self-equivalence (no trivial-unit quotient)."""
    if not p.is_self_map():
        raise ValueError("Gersten torsion needs a self-map: source and target differ")
    return whitehead_torsion(p)


def _needs_sk1_caveat(spec: GroupSpec) -> bool:
    return not (spec.free_rank == 0 and len(spec.torsion) <= 1)


def triangular_pack(phi: GradedMap, gp: EquivalencePack, X: GradedMap) -> EquivalencePack:
    """Equivalence data for ``F = [[g, X], [0, g]]`` on ``cone(phi)``.

    Needs ``[d, X] = g phi - phi g``.  The homotopy inverse is
    ``[[g', Y], [0, g']]``; the homotopies carry second-order correction terms
    so that no further hypothesis on g's witnesses is required.
    """
    g, g1, hg, kg = gp.f, gp.g, gp.h, gp.k
    E = mapping_cone(phi)
    c = -X
    # half-adjoint correction of k
    drift = g @ kg - hg @ g
    k1 = kg - g1 @ drift
    rho = hg @ drift

    Y = g1 @ c @ g1 - g1 @ phi @ hg + k1 @ phi @ g1
    Q = hg @ c @ g1 - hg @ phi @ hg - rho @ phi @ g1
    Q1 = -(g1 @ c @ k1) - k1 @ phi @ k1 - g1 @ phi @ rho

    F = cone_block(E, E, 0, dd=g, cd=X, cc=g)
    G = cone_block(E, E, 0, dd=g1, cd=Y, cc=g1)
    H = cone_block(E, E, 1, dd=hg, cd=Q, cc=-hg)
    K = cone_block(E, E, 1, dd=k1, cd=Q1, cc=-k1)
    return EquivalencePack(F, G, H, K)


def _torsion_report(tau: K1Class, citation: str, extra: dict) -> Report:
    wh = to_whitehead(tau)
    det_one = tau.det.is_one()
    trivial_unit = is_trivial_unit(tau.det)
    data = {
        "class_det": tau.det.to_json(),
        "wh_canonical": wh.canonical.to_json(),
        "det_is_one": det_one,
        "trivial": wh.is_trivial(),
        "trivial_unit": trivial_unit,
    }
    data.update(extra)
    caveats = [SK1_CAVEAT] if _needs_sk1_caveat(tau.over) else []
    return Report("trivial" if wh.is_trivial() else "nontrivial", data, [citation], caveats)


def swindle_check(A: BasedComplex, f: EquivalencePack, g: EquivalencePack,
                  comm: GradedMap) -> Report:
    """Torsion of the map induced by g on cone(f), given ``[d, comm] = fg - gf``.

    The report's ``data["det_is_one"]`` records whether the determinant is
    exactly 1.
    """
    for name, p in (("f", f), ("g", g)):
        if p.source != A or p.target != A:
            raise ValueError(f"{name} is not a self-equivalence of A")
        p.validate()
    ChainHomotopy((f.f @ g.f, g.f @ f.f), comm.comps)
    F = triangular_pack(f.f, g, -comm)
    tau = gersten_torsion(F)
    rep = _torsion_report(tau, SWINDLE_CITATION, {"cone_ranks": list(F.source.ranks)})
    rep.verdict = "trivial" if tau.det.is_one() else "nontrivial"
    return rep


@dataclass
class TorusSpec:
    """Fibre complex over Z[H] with a monodromy self-equivalence; ``ambient`` = H x Z."""

    fiber: BasedComplex
    monodromy: EquivalencePack
    ambient: GroupSpec = None

    def __post_init__(self):
        H = self.fiber.spec
        if self.ambient is None:
            self.ambient = GroupSpec(H.free_rank + 1, H.torsion)
        if self.ambient.free_rank != H.free_rank + 1 or self.ambient.torsion != H.torsion:
            raise ValueError(f"{self.ambient} does not extend {H} by one free factor")
        m = self.monodromy
        if m.source != self.fiber or m.target != self.fiber:
            raise ValueError("monodromy is not a self-equivalence of the fibre")
        m.validate()

    @property
    def circle_generator(self) -> RingElement:
        key = [0] * self.ambient.width
        key[self.fiber.spec.free_rank] = 1
        return RingElement.group(self.ambient, key)

    def induced(self):
        Y = induce_complex(self.fiber, self.ambient)
        return Y, induce_pack(self.monodromy, Y)


def torus_difference(t: TorusSpec):
    Y, m = t.induced()
    phi = m.f.scale(t.circle_generator) - Y.identity()
    return Y, m, phi


def mapping_torus(t: TorusSpec) -> ConeComplex:
    """cone(t m - 1) on the fibre complex induced up to Z[H x Z]."""
    _, _, phi = torus_difference(t)
    return mapping_cone(phi)


def torus_vanishing_check(t: TorusSpec, g: EquivalencePack, comm: GradedMap) -> Report:
    """Torsion of the self-map of T(m) induced by g, given ``[d, comm] = gm - mg``."""
    m = t.monodromy
    if g.source != t.fiber or g.target != t.fiber:
        raise ValueError("g is not a self-equivalence of the fibre")
    g.validate()
    ChainHomotopy((g.f @ m.f, m.f @ g.f), comm.comps)
    Y, _, phi = torus_difference(t)
    g_up = induce_pack(g, Y)
    X = GradedMap(Y, Y, 1, {k: mat.map_entries(lambda x: include(x, t.ambient), t.ambient) for k, mat in comm.comps.items()})
    X = X.scale(t.circle_generator)
    if commutator_with_d(X) != (g_up.f @ phi - phi @ g_up.f):
        raise InvariantError("induced commuting witness is inconsistent")
    F = triangular_pack(phi, g_up, X)
    tau = gersten_torsion(F)
    rep = _torsion_report(tau, TORUS_CITATION, {"torus_ranks": list(F.source.ranks)})
    rep.verdict = "trivial" if (rep.data["trivial"] and rep.data["trivial_unit"]) else "nontrivial"
    return rep
