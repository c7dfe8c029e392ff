import json
import os
import subprocess
import sys

import pytest

from whtorsion.chains import BasedComplex, EquivalencePack
from whtorsion.cli import InputError, main, parse_input, serialize
from whtorsion.nilgroups import UniSubgroup
from whtorsion.reports import Report, emit

from conftest import FIXTURES

GOOD = sorted(n for n in os.listdir(FIXTURES) if n.endswith(".json") and n not in ("malformed.json", "complex_dd_nonzero.json"))


def cli(capsysbinary, *argv):
    code = main(list(argv))
    out = capsysbinary.readouterr()
    return code, out.out.decode(), out.err.decode()


def fx(name):
    return os.path.join(FIXTURES, name)


# -- parse_input -----------------------------------------------------------------------------

def test_parse_complex():
    C = parse_input(fx("complex_z5.json"))
    assert isinstance(C, BasedComplex)
    assert isinstance(parse_input(fx("pack_unit_z5.json")), EquivalencePack)
    assert isinstance(parse_input(fx("nil_heisenberg.json")), UniSubgroup)


def test_parse_errors_are_distinct():
    with pytest.raises(InputError) as e:
        parse_input(fx("malformed.json"))
    assert e.value.kind == "parse"
    assert "line" in str(e.value)
    with pytest.raises(InputError) as e:
        parse_input(fx("complex_dd_nonzero.json"))
    assert e.value.kind == "invariant"
    assert "degree 2" in str(e.value)
    with pytest.raises(InputError) as e:
        parse_input('{"kind": "complex", "ranks": [1]}')
    assert e.value.kind == "schema"
    with pytest.raises(InputError) as e:
        parse_input("/nonexistent/file.json")
    assert e.value.kind == "parse"


@pytest.mark.parametrize("name", GOOD)
def test_serialize_parse_round_trip(name):
    with open(fx(name)) as fh:
        obj = json.load(fh)
    value = parse_input(fx(name))
    assert serialize(value) == obj
    assert serialize(parse_input(json.dumps(obj))) == obj


# -- run / exit codes ------------------------------------------------------------------------

def test_wh_infinite_six(capsysbinary):
    code, out, _ = cli(capsysbinary, "wh-infinite", "6", "--json")
    assert code == 0
    assert json.loads(out)["verdict"] == "false"


def test_wh_rank(capsysbinary):
    code, out, _ = cli(capsysbinary, "wh-rank", "9", "--json")
    assert code == 0 and json.loads(out)["data"]["wh_rank"] == 2


def test_swindle_fixture(capsysbinary):
    code, out, _ = cli(capsysbinary, "swindle", "--input", fx("swindle_pair.json"), "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "trivial"
    assert rep["data"]["det_is_one"]


def test_torsion_malformed(capsysbinary):
    code, out, err = cli(capsysbinary, "torsion", "--input", fx("malformed.json"))
    assert code == 1 and out == "" and "parse error" in err


def test_torsion_invariant_violation(capsysbinary):
    code, _, err = cli(capsysbinary, "torsion", "--input", fx("complex_dd_nonzero.json"))
    assert code == 1 and "invariant error" in err


def test_torsion_nontrivial_exit_zero(capsysbinary):
    code, out, _ = cli(capsysbinary, "torsion", "--input", fx("pack_unit_z5.json"), "--json")
    assert code == 0
    assert json.loads(out)["data"]["trivial"] is False


def test_torsion_acyclic(capsysbinary):
    code, out, _ = cli(capsysbinary, "torsion", "--input", fx("acyclic_zz4.json"), "--json")
    assert code == 0
    assert "class_det" in json.loads(out)["data"]


def test_gersten_and_torus(capsysbinary):
    code, out, _ = cli(capsysbinary, "gersten", "--input", fx("pack_random_z12.json"), "--json")
    assert code == 0
    code, out, _ = cli(capsysbinary, "torus", "--input", fx("torus_z5.json"), "--json")
    assert code == 0 and json.loads(out)["verdict"] == "trivial"


def test_random_suites(capsysbinary):
    code, out, _ = cli(capsysbinary, "swindle", "--group", "Z x Z/4", "--trials", "3", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "trivial" and rep["data"]["trials"] == 3
    code, out, _ = cli(capsysbinary, "torus", "--group", "Z/4", "--trials", "3", "--json")
    assert code == 0 and json.loads(out)["data"]["all_wh_trivial"]


def test_structures(capsysbinary):
    code, out, _ = cli(capsysbinary, "structures", "--family", "lens", "--p", "5")
    assert code == 0 and out.startswith("verdict: infinitely many simple structures")
    code, _, err = cli(capsysbinary, "structures", "--family", "custom", "--group", "Z x Z/2 x Z/4")
    assert code == 1 and err


def test_nil_surject(capsysbinary):
    code, out, _ = cli(capsysbinary, "nil-surject", "--generators", fx("nil_4x4_b.json"), "--json")
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "surjective"
    assert rep["data"]["functional"]["values_on_generators"] == [1, 2]
    code, _, err = cli(capsysbinary, "nil-surject", "--size", "5", "--generators", fx("nil_4x4_b.json"))
    assert code == 1


def test_cdga_actions(capsysbinary):
    code, out, _ = cli(capsysbinary, "cdga", "check", "--input", fx("cdga_heisenberg.json"), "--json")
    assert code == 0 and json.loads(out)["verdict"] == "valid"
    code, out, _ = cli(capsysbinary, "cdga", "homotopy", "--input", fx("cdga_s2u.json"), "--json")
    assert code == 0 and json.loads(out)["data"]["augmentation_preserving"]
    code, out, _ = cli(capsysbinary, "cdga", "bl", "--input", fx("cdga_s2u_homotopy.json"), "--json")
    assert code == 0 and json.loads(out)["data"]["derivation"]["on"] == {"u": [[1, ["z"]]]}
    code, _, err = cli(capsysbinary, "cdga", "bl", "--input", fx("cdga_s2u.json"))
    assert code == 1 and "homotopy" in err


def test_missing_input(capsysbinary):
    code, _, err = cli(capsysbinary, "torsion")
    assert code == 1 and "--input" in err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "whtorsion.cli", "wh-infinite", "4"], capture_output=True)
    assert out.returncode == 0
    assert out.stdout.startswith(b"verdict: true")


# -- emit ------------------------------------------------------------------------------------

def test_emit_json_round_trip():
    rep = Report("trivial", {"x": [1, 2], "y": {"b": 1, "a": 2}}, ["some theorem"], ["a caveat"])
    assert Report.from_json(json.loads(emit(rep, "json"))) == rep


def test_emit_text_citations_and_caveats():
    rep = Report("trivial", {"x": 1}, ["some theorem"], [])
    text = emit(rep, "text").decode()
    assert "some theorem" in text
    assert "caveats" not in text
    text = emit(Report("trivial", {}, ["c"], ["careful"]), "text").decode()
    assert "caveats:" in text and "careful" in text


def test_theorem_backed_verdicts_cite(capsysbinary):
    for argv in (["wh-infinite", "5"], ["wh-rank", "7"], ["structures", "--family", "q8"],
                 ["swindle", "--input", fx("swindle_pair.json")],
                 ["torus", "--input", fx("torus_z5.json")],
                 ["nil-surject", "--generators", fx("nil_heisenberg.json")]):
        code, out, _ = cli(capsysbinary, *argv, "--json")
        assert code == 0 and json.loads(out)["citations"], argv


def test_deterministic_bytes(capsysbinary):
    for argv in (["swindle", "--trials", "4", "--seed", "9", "--group", "Z/12"],
                 ["nil-surject", "--generators", fx("nil_4x4_a.json"), "--seed", "3"],
                 ["torsion", "--input", fx("pack_random_z12.json")]):
        outs = {cli(capsysbinary, *argv)[1] for _ in range(2)}
        assert len(outs) == 1
        outs = {cli(capsysbinary, *argv, "--json")[1] for _ in range(2)}
        assert len(outs) == 1
