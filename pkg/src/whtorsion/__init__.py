"""Exact torsion invariants of chain equivalences over integral group rings.

Modules: ``groupring`` (Z[G] arithmetic), ``chains`` (based complexes, cones,
contractions), ``torsion`` (Gersten torsion and the two vanishing verifiers),
``whgroups`` (infinitude of Wh(Z x Z/n)), ``nilgroups`` (surjections of
unitriangular groups onto Z), ``sullivan`` (derivations of Sullivan algebras)
and ``cli``.
"""

from .groupring import GroupSpec, RingElement, RingMatrix, gr_det, gr_inverse, gr_mul, is_trivial_unit
from .chains import (
    BasedComplex,
    ChainHomotopy,
    ChainMap,
    Contraction,
    EquivalencePack,
    cone_contraction,
    mapping_cone,
    torsion_of_acyclic,
    validate_complex,
    whitehead_torsion,
)
from .k1 import K1Class, WhClass, to_whitehead
from .torsion import TorusSpec, gersten_torsion, mapping_torus, swindle_check, torus_vanishing_check
from .whgroups import bhs_is_infinite, nil_infinite, structures_verdict, wh_rank_cyclic
from .reports import Report, emit

__version__ = "0.1.0"
