"""Regenerate the JSON fixtures in tests/fixtures (deterministic)."""

import json
import os
import random

from whtorsion.chains import BasedComplex, Contraction, identity_pack, scalar_pack
from whtorsion.cli import AcyclicInput, CdgaTask, SwindleInput, TorusInput, serialize
from whtorsion.groupring import GroupSpec, RingElement, RingMatrix
from whtorsion.nilgroups import UniMatrix, UniSubgroup
from whtorsion.samples import Sampler, commuting_pair, paired_model, random_complex
from whtorsion import sullivan
from whtorsion.torsion import TorusSpec

HERE = os.path.join(os.path.dirname(__file__), "fixtures")


def dump(name, obj):
    with open(os.path.join(HERE, name), "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def main():
    Z5 = GroupSpec(0, (5,))
    g = RingElement.group(Z5, (1,))
    u = g + g ** 4 - 1
    C = BasedComplex(Z5, 0, 0, [1])
    p = scalar_pack(C, u, u ** -1)
    dump("pack_unit_z5.json", serialize(p))
    dump("complex_z5.json", serialize(C))
    dump("swindle_pair.json", SwindleInput(C, p, p, C.zero_map(C, 1)).to_json())
    dump("torus_z5.json", TorusInput(TorusSpec(C, scalar_pack(C, g, g ** 4)), scalar_pack(C, g ** 2, g ** 3),
                                     C.zero_map(C, 1)).to_json())

    sm = Sampler(GroupSpec(1, (4,)), seed=7)
    model = random_complex(sm, acyclic=True)
    dump("acyclic_zz4.json", AcyclicInput(model.complex, model.contraction()).to_json())
    model = paired_model(Sampler(GroupSpec(0, (12,)), seed=3), 0, 2, [2, 3, 1])
    f, gg, comm = commuting_pair(Sampler(GroupSpec(0, (12,)), seed=4), model)
    dump("swindle_random_z12.json", SwindleInput(model.complex, f, gg, comm).to_json())
    dump("pack_random_z12.json", serialize(f))

    E = UniMatrix.elementary
    dump("nil_heisenberg.json", serialize(UniSubgroup([E(3, 0, 1), E(3, 1, 2)])))
    dump("nil_4x4_a.json", serialize(UniSubgroup([E(4, 0, 1) * E(4, 2, 3), E(4, 1, 2)])))
    dump("nil_4x4_b.json", serialize(UniSubgroup([[[1, 2, 0, 0], [0, 1, 1, 0], [0, 0, 1, 5], [0, 0, 0, 1]],
                                                  [[1, 4, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]])))

    heis = sullivan.CDGA([("x", 1), ("y", 1), ("z", 1)], {"z": "x*y"})
    s2u = sullivan.CDGA([("a", 2), ("z", 3), ("u", 4)], {"z": "a^2"})
    dump("cdga_heisenberg.json", CdgaTask(heis, sullivan.Derivation(heis, -1, {"y": "1"})).to_json())
    dump("cdga_s2u.json", CdgaTask(s2u, sullivan.Derivation(s2u, -1, {"u": "z"})).to_json())
    H = sullivan.build_homotopy(sullivan.Derivation(s2u, -1, {"u": "z"}))
    dump("cdga_s2u_homotopy.json", CdgaTask(s2u, homotopy=H).to_json())

    bad = serialize(BasedComplex(Z5, 0, 2, [1, 1, 1], {1: RingMatrix.identity(Z5, 1), 2: RingMatrix.identity(Z5, 1)}))
    dump("complex_dd_nonzero.json", bad)
    with open(os.path.join(HERE, "malformed.json"), "w") as fh:
        fh.write('{"kind": "pack", "source": [1, 2,\n')


if __name__ == "__main__":
    main()
