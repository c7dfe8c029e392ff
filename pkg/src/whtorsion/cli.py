"""Command line front end: ``whtorsion <verb> ...``.

Exit codes: 0 when a verdict was computed (whatever it says), 1 for input
errors (malformed JSON, schema or invariant violations), 2 when an internal
contract fails (for example no contraction can be assembled).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from typing import Optional

from . import nilgroups, sullivan, whgroups
from .chains import (
    BasedComplex,
    ContractionFailure,
    EquivalencePack,
    GradedMap,
    InvariantError,
    NotAcyclic,
    check_complex,
    torsion_of_acyclic,
    whitehead_torsion,
    Contraction,
)
from .groupring import GroupSpec
from .k1 import K1Class, NotAUnit, to_whitehead
from .reports import Report, emit
from .samples import Sampler, commuting_pair, random_complex
from .torsion import (
    SK1_CAVEAT,
    SWINDLE_CITATION,
    TORUS_CITATION,
    TorusSpec,
    _needs_sk1_caveat,
    gersten_torsion,
    swindle_check,
    torus_vanishing_check,
)

CITE_TORSION = "Whitehead torsion of a chain equivalence as the K_1 class of (d + delta) on its contractible mapping cone [Milnor 1966]"
CITE_GERSTEN = "Gersten torsion: the K_1 class of a self-equivalence before dividing by trivial units [Gersten 1967]"
CITE_NIL = ("A finitely generated torsion-free nilpotent group embeds in unitriangular integer matrices; the first "
            "nonzero graded piece of the off-diagonal filtration is free abelian, so the group maps onto Z")
CITE_SULLIVAN = "Derivations [i, d] of a minimal Sullivan algebra are nilpotent and exponentiate to automorphisms homotopic to the identity [Sullivan 1977]"
CITE_BL = "Block-Lazarev: a homotopy F + G dt from the identity ends at exp([integral_0^1 G F^{-1} dt, d])"


class InputError(ValueError):
    """Bad input; ``kind`` is one of parse, schema, invariant."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind} error: {message}")
        self.kind = kind


# -- typed inputs ----------------------------------------------------------------------------

def _pack_on(C: BasedComplex, obj) -> EquivalencePack:
    return EquivalencePack(GradedMap.from_json(obj["f"], C, C, 0), GradedMap.from_json(obj["g"], C, C, 0),
                           GradedMap.from_json(obj["h"], C, C, 1), GradedMap.from_json(obj["k"], C, C, 1))


def _pack_maps(p: EquivalencePack) -> dict:
    return {"f": p.f.to_json(), "g": p.g.to_json(), "h": p.h.to_json(), "k": p.k.to_json()}


@dataclass
class AcyclicInput:
    complex: BasedComplex
    contraction: Contraction

    def to_json(self):
        return {"kind": "acyclic", "complex": self.complex.to_json(), "contraction": self.contraction.delta.to_json()}


@dataclass
class SwindleInput:
    complex: BasedComplex
    f: EquivalencePack
    g: EquivalencePack
    comm: GradedMap

    def to_json(self):
        return {"kind": "swindle", "complex": self.complex.to_json(), "f": _pack_maps(self.f),
                "g": _pack_maps(self.g), "comm": self.comm.to_json()}


@dataclass
class TorusInput:
    torus: TorusSpec
    g: EquivalencePack
    comm: GradedMap

    def to_json(self):
        return {"kind": "torus", "fiber": self.torus.fiber.to_json(), "monodromy": _pack_maps(self.torus.monodromy),
                "g": _pack_maps(self.g), "comm": self.comm.to_json()}


@dataclass
class CdgaTask:
    cdga: sullivan.CDGA
    derivation: Optional[sullivan.Derivation] = None
    homotopy: Optional[sullivan.HomotopyLine] = None

    def to_json(self):
        out = {"kind": "cdga", "cdga": self.cdga.to_json()}
        if self.derivation is not None:
            out["derivation"] = self.derivation.to_json()
        if self.homotopy is not None:
            out["homotopy"] = self.homotopy.to_json()
        return out


def serialize(value) -> dict:
    """JSON form of any value parse_input produces (with a ``kind`` tag)."""
    if isinstance(value, BasedComplex):
        return dict(value.to_json(), kind="complex")
    if isinstance(value, EquivalencePack):
        return dict(value.to_json(), kind="pack")
    if isinstance(value, nilgroups.UniSubgroup):
        return dict(value.to_json(), kind="unisubgroup")
    if isinstance(value, Report):
        return dict(value.to_json(), kind="report")
    return value.to_json()


def _load_text(source: str) -> str:
    s = source.lstrip()
    if s.startswith("{") or s.startswith("["):
        return source
    try:
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError("parse", f"cannot read {source!r}: {e.strerror}") from None


def _decode(obj, kind: Optional[str]):
    kind = kind or (obj.get("kind") if isinstance(obj, dict) else "unisubgroup")
    if kind is None:
        if "schema" in obj:
            kind = "report"
        elif "generators" in obj and "size" in obj:
            kind = "unisubgroup"
        elif "generators" in obj:
            kind = "cdga"
        elif "f" in obj and "source" in obj:
            kind = "pack"
        elif "diffs" in obj or "ranks" in obj:
            kind = "complex"
        else:
            raise InputError("schema", "cannot tell what kind of object this is; add a \"kind\" field")
    if kind == "complex":
        return check_complex(BasedComplex.from_json(obj))
    if kind == "pack":
        p = EquivalencePack.from_json(obj)
        check_complex(p.source)
        check_complex(p.target)
        return p
    if kind == "acyclic":
        C = check_complex(BasedComplex.from_json(obj["complex"]))
        c = Contraction(C, GradedMap.from_json(obj["contraction"], C, C, 1))
        if not c.is_valid():
            raise InvariantError("contraction does not satisfy d delta + delta d = id")
        return AcyclicInput(C, c)
    if kind == "swindle":
        C = check_complex(BasedComplex.from_json(obj["complex"]))
        return SwindleInput(C, _pack_on(C, obj["f"]), _pack_on(C, obj["g"]), GradedMap.from_json(obj["comm"], C, C, 1))
    if kind == "torus":
        C = check_complex(BasedComplex.from_json(obj["fiber"]))
        return TorusInput(TorusSpec(C, _pack_on(C, obj["monodromy"])), _pack_on(C, obj["g"]),
                          GradedMap.from_json(obj["comm"], C, C, 1))
    if kind == "cdga":
        if "cdga" not in obj:
            return CdgaTask(sullivan.CDGA.from_json(obj))
        M = sullivan.CDGA.from_json(obj["cdga"])
        der = sullivan.Derivation.from_json(M, obj["derivation"]) if "derivation" in obj else None
        hom = sullivan.HomotopyLine.from_json(M, obj["homotopy"]) if "homotopy" in obj else None
        return CdgaTask(M, der, hom)
    if kind == "unisubgroup":
        return nilgroups.UniSubgroup.from_json(obj)
    if kind == "report":
        return Report.from_json(obj)
    raise InputError("schema", f"unknown kind {kind!r}")


def parse_input(source: str, kind: Optional[str] = None):
    """Typed value from a path or inline JSON; raises InputError with a distinct kind."""
    text = _load_text(source)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError("parse", f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    try:
        return _decode(obj, kind)
    except InputError:
        raise
    except (InvariantError, NotAcyclic) as e:
        raise InputError("invariant", str(e)) from None
    except (KeyError, TypeError, IndexError) as e:
        raise InputError("schema", f"missing or malformed field: {e}") from None
    except ValueError as e:
        raise InputError("schema", str(e)) from None


# -- verbs -------------------------------------------------------------------------------------

def _class_data(tau: K1Class) -> dict:
    wh = to_whitehead(tau)
    return {"class_det": tau.det.to_json(), "wh_canonical": wh.canonical.to_json(),
            "det_is_one": tau.det.is_one(), "trivial": wh.is_trivial(), "group": tau.over.to_json()}


def _caveats(spec: GroupSpec):
    return [SK1_CAVEAT] if _needs_sk1_caveat(spec) else []


def run_torsion(args) -> Report:
    value = parse_input(args.input)
    if isinstance(value, AcyclicInput):
        tau = torsion_of_acyclic(value.complex, value.contraction)
    elif isinstance(value, EquivalencePack):
        tau = whitehead_torsion(value)
    else:
        raise InputError("schema", "torsion expects a pack or an acyclic complex with a contraction")
    data = _class_data(tau)
    return Report("trivial" if data["trivial"] else "nontrivial", data, [CITE_TORSION], _caveats(tau.over))


def run_gersten(args) -> Report:
    p = parse_input(args.input, "pack")
    if not p.is_self_map():
        raise InputError("schema", "Gersten torsion needs a self-map (source == target)")
    tau = gersten_torsion(p)
    data = _class_data(tau)
    return Report("trivial" if data["det_is_one"] else "nontrivial", data, [CITE_GERSTEN], _caveats(tau.over))


def _random_suite(args, kind: str) -> Report:
    spec = GroupSpec.parse(args.group)
    rng = random.Random(args.seed)
    results = []
    for t in range(args.trials):
        sm = Sampler(spec, rng=rng)
        model = random_complex(sm, args.max_rank, args.max_length)
        f, g, comm = commuting_pair(sm, model)
        if kind == "swindle":
            rep = swindle_check(model.complex, f, g, comm)
        else:
            # g, f roles: [d, comm] = fg - gf, so f is the monodromy's partner
            rep = torus_vanishing_check(TorusSpec(model.complex, g), f, comm)
        results.append(rep)
    bad = [i for i, r in enumerate(results) if r.verdict != "trivial"]
    data = {"group": spec.to_json(), "trials": args.trials, "seed": args.seed, "failures": bad,
            "all_det_one": all(r.data["det_is_one"] for r in results),
            "all_wh_trivial": all(r.data["trivial"] for r in results)}
    cite = SWINDLE_CITATION if kind == "swindle" else TORUS_CITATION
    ambient = spec if kind == "swindle" else GroupSpec(spec.free_rank + 1, spec.torsion)
    return Report("trivial" if not bad else "nontrivial", data, [cite], _caveats(ambient))


def run_swindle(args) -> Report:
    if not args.input:
        return _random_suite(args, "swindle")
    v = parse_input(args.input, "swindle")
    return swindle_check(v.complex, v.f, v.g, v.comm)


def run_torus(args) -> Report:
    if not args.input:
        return _random_suite(args, "torus")
    v = parse_input(args.input, "torus")
    return torus_vanishing_check(v.torus, v.g, v.comm)


def run_wh_rank(args) -> Report:
    r = whgroups.wh_rank_cyclic(args.n)
    return Report(str(r), {"n": args.n, "wh_rank": r, "group": f"Z/{args.n}"}, [whgroups.CITE_MILNOR], [])


def run_wh_infinite(args) -> Report:
    rep = whgroups.bhs_is_infinite(args.n)
    return Report("true" if rep.total_infinite else "false", rep.to_json(), rep.reasons, [])


FAMILY_ALIASES = {"lens": "lens_times_circle", "q8": "q8_times_circle", "pu": "projective_unitary"}


def run_structures(args) -> Report:
    fam = FAMILY_ALIASES.get(args.family, args.family)
    group = GroupSpec.parse(args.group) if args.group else None
    try:
        s = whgroups.SpaceSpec(fam, p=args.p, n=args.n, group=group)
    except ValueError as e:
        raise InputError("schema", str(e)) from None
    return whgroups.structures_verdict(s)


def run_nil_surject(args) -> Report:
    S = parse_input(args.generators, "unisubgroup")
    if args.size is not None and S.n != args.size:
        raise InputError("schema", f"generators are {S.n}x{S.n}, not {args.size}x{args.size}")
    phi = nilgroups.surjection_to_Z(S)
    ok = nilgroups.verify_homomorphism(phi, S, args.trials, seed=args.seed)
    m = phi.level
    data = {"level": m, "image_basis": nilgroups.graded_image(S, m), "functional": phi.to_json(),
            "homomorphism_checked": ok, "trials": args.trials, "seed": args.seed}
    return Report("surjective" if ok and phi.is_surjective() else "check failed", data, [CITE_NIL], [])


def _need(task, attr, verb):
    if getattr(task, attr) is None:
        raise InputError("schema", f"cdga {verb} needs a \"{attr}\" field")
    return getattr(task, attr)


def run_cdga(args) -> Report:
    task = parse_input(args.input, "cdga")
    M = task.cdga
    names = M.names
    if args.action == "check":
        msg = sullivan.cdga_failure(M)
        data = {"valid": msg is None, "failure": msg, "min_weight_increase": sullivan.min_weight_increase(M)}
        return Report("valid" if msg is None else "invalid", data, [], [])
    i = _need(task, "homotopy" if args.action == "bl" else "derivation", args.action)
    if args.action == "bracket":
        D = sullivan.bracket_with_d(i, M)
        nil, k = sullivan.is_nilpotent(D, M)
        data = {"bracket": D.to_json(), "commutes_with_d": sullivan.bracket(M.differential(), D).is_zero(),
                "nilpotent": nil, "index": k, "in_u_star": sullivan.in_u_star(i, M)}
        return Report("nilpotent" if nil else "not nilpotent", data, [CITE_SULLIVAN], [])
    if args.action == "exp":
        D = sullivan.bracket_with_d(i, M) if i.degree == -1 else i
        phi = sullivan.exp_derivation(D, M)
        return Report("automorphism", {"exp": phi.to_json(), "derivation": D.to_json()}, [CITE_SULLIVAN], [])
    if args.action == "homotopy":
        H = sullivan.build_homotopy(i, M)
        aug = sullivan.augmentation_check(H, M)
        data = {"homotopy": H.to_json(), "augmentation_preserving": aug, "in_u_star": sullivan.in_u_star(i, M),
                "endpoint": H.endpoint(1).to_json()}
        return Report("homotopy to exp([i, d])", data, [CITE_SULLIVAN], [])
    if args.action == "bl":
        j = sullivan.block_lazarev(i, M)
        data = {"derivation": j.to_json(), "endpoint": i.endpoint(1).to_json(), "recovered": True}
        return Report("recovered", data, [CITE_BL], [])
    raise InputError("schema", f"unknown cdga action {args.action!r}")


# -- argument parsing ----------------------------------------------------------------------------

def _common(p):
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit JSON")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized verifiers")
    p.add_argument("--trials", type=int, default=argparse.SUPPRESS, help="number of random trials")
    p.add_argument("--input", default=argparse.SUPPRESS, help="input path or inline JSON")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="whtorsion", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", default=False)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--input", default=None)
    sub = ap.add_subparsers(dest="verb", required=True)

    for name, helptext in (("torsion", "Whitehead torsion of a pack or of an acyclic complex"),
                           ("gersten", "Gersten torsion of a self-equivalence pack")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
    for name, helptext in (("swindle", "additivity swindle: fixture, or a random suite without --input"),
                           ("torus", "mapping-torus vanishing: fixture, or a random suite without --input")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("--group", default="Z/5", help="group for random instances, e.g. 'Z x Z/4'")
        p.add_argument("--max-rank", type=int, default=3)
        p.add_argument("--max-length", type=int, default=3)
    for name in ("wh-rank", "wh-infinite"):
        p = sub.add_parser(name, help="rank of Wh(Z/n)" if name == "wh-rank" else "is Wh(Z x Z/n) infinite?")
        p.add_argument("n", type=int)
        _common(p)
    p = sub.add_parser("structures", help="simple-structure verdict for an example family")
    p.add_argument("--family", required=True, choices=["lens", "q8", "pu", "custom",
                                                       "lens_times_circle", "q8_times_circle", "projective_unitary"])
    p.add_argument("--p", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--group", help="pi_1 for --family custom, e.g. 'Z x Z/6'")
    _common(p)
    p = sub.add_parser("nil-surject", help="surjection onto Z from a unitriangular matrix group")
    p.add_argument("--size", type=int)
    p.add_argument("--generators", required=True, help="JSON file (or inline) of integer matrices")
    _common(p)
    p = sub.add_parser("cdga", help="Sullivan-algebra derivation calculus")
    p.add_argument("action", choices=["check", "bracket", "exp", "homotopy", "bl"])
    _common(p)
    return ap


RUNNERS = {
    "torsion": run_torsion, "gersten": run_gersten, "swindle": run_swindle, "torus": run_torus,
    "wh-rank": run_wh_rank, "wh-infinite": run_wh_infinite, "structures": run_structures,
    "nil-surject": run_nil_surject, "cdga": run_cdga,
}

DEFAULT_TRIALS = {"swindle": 10, "torus": 10, "nil-surject": 1000}


def run(args):
    """(Report or None, exit code, error message or None)."""
    if args.trials is None:
        args.trials = DEFAULT_TRIALS.get(args.verb, 1)
    if args.verb in ("torsion", "gersten", "cdga") and not args.input:
        return None, 1, "input error: --input is required"
    try:
        return RUNNERS[args.verb](args), 0, None
    except InputError as e:
        return None, 1, f"input {e}"
    except (whgroups.Unsupported, sullivan.NonNilpotent, sullivan.NonUnipotentHomotopy, InvariantError,
            NotAcyclic) as e:
        return None, 1, f"input error: {e}"
    except (ContractionFailure, NotAUnit, AssertionError) as e:
        return None, 2, f"contract violation: {type(e).__name__}: {e}"
    except ValueError as e:
        return None, 1, f"input error: {e}"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report, code, err = run(args)
    if err:
        sys.stderr.write(err + "\n")
        return code
    out = emit(report, "json" if args.json else "text")
    sys.stdout.buffer.write(out)
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
