import json
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import FIXTURES, QX, fixture_module, random_bicomplex, random_module
from specseq.cli import format_tuple, main
from specseq.derived import purity_filtration
from specseq.rings import QQ, ZZ
from specseq.serialization import (bicomplex_from_json, bicomplex_to_json, dumps,
                                   filtration_from_json, filtration_to_json, module_from_json,
                                   module_from_text, module_to_json, module_to_text)

MODULES = FIXTURES / "modules"


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["ZZ", "QQ", "QQ[x]"]))
def test_module_roundtrips(seed, ring_name):
    ring = {"ZZ": ZZ, "QQ": QQ, "QQ[x]": QX}[ring_name]
    M = random_module(random.Random(seed), ring)
    assert module_from_text(module_to_text(M)).relations == M.relations
    assert module_from_json(json.loads(dumps(module_to_json(M)))).relations == M.relations


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_bicomplex_roundtrip(seed):
    B = random_bicomplex(random.Random(seed), ZZ)
    C = bicomplex_from_json(json.loads(dumps(bicomplex_to_json(B))))
    assert set(C.objects) == set(B.objects)
    for (p, q) in B.objects:
        assert C.v(p, q) == B.v(p, q) and C.h(p, q) == B.h(p, q)


def test_filtration_roundtrip_on_fixture():
    text = (MODULES / "w6x5_purity_filtration.json").read_text()
    fs = filtration_from_json(json.loads(text))
    again = filtration_from_json(json.loads(dumps(filtration_to_json(fs))))
    assert again.degrees == fs.degrees and again.direction == fs.direction
    for p in fs.degrees:
        assert again[p].matrix == fs[p].matrix
        assert again[p].source.relations == fs[p].source.relations


def test_fixture_text_format():
    W = fixture_module("w6x5.txt")
    assert (W.nrels, W.ngens) == (6, 5)
    assert str(W.ring) == "QQ[x,y,z]"


def test_format_tuple():
    assert format_tuple((1, 1)) == "[ 1, 1 ]"
    assert format_tuple(float("inf")) == "infinity"


# --------------------------------------------------------------------------
# command line

def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_codegree(capsys):
    assert run(["codegree", str(MODULES / "v3x4.txt")], capsys)[:2] == (0, "[ 2 ]\n")
    assert run(["codegree", str(MODULES / "w3x4.txt")], capsys)[:2] == (0, "[ 1, 1 ]\n")
    code, out, _ = run(["codegree", "--json", str(MODULES / "w3x4.txt")], capsys)
    assert code == 0 and json.loads(out) == {"codegree": [1, 1]}


def test_cli_jordan_reports_monic_arrow(capsys):
    code, out, _ = run(["jordan", "--lambda", "1", "--size", "3"], capsys)
    assert code == 0
    assert "level 3 arrow at" in out
    assert "[ x^3-3*x^2+3*x-1 ] (monic)" in out


def test_cli_purity_json(capsys):
    code, out, _ = run(["purity", "--json", str(MODULES / "w6x5.txt")], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["degrees"] == [-3, -2, -1, 0]
    assert data["pure"] is False
    assert data["triangular"]["verified"] == {"well_defined": True, "mono": True, "epi": True}


def test_cli_triangulate(capsys):
    code, out, _ = run(["triangulate", str(MODULES / "w6x5.txt"),
                        str(MODULES / "w6x5_purity_filtration.json")], capsys)
    assert code == 0
    assert out.rstrip().endswith("verified: well_defined=True, mono=True, epi=True")


def test_cli_ss_on_bicomplex_file(capsys):
    code, out, _ = run(["ss", "--which", "second", str(MODULES / "jordan_bicomplex.json")], capsys)
    assert code == 0 and "Level 3:" in out


def test_cli_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("ring: QQ[x]\nrows: 1\ncols: 1\nmatrix: [ x +, ]\n")
    assert run(["codegree", str(bad)], capsys)[0] == 2
    assert run(["codegree", str(tmp_path / "missing.txt")], capsys)[0] == 2
    assert run(["jordan", "--lambda", "1/0"], capsys)[0] == 2
    # a filtration of a different module is a mathematical error
    assert run(["triangulate", str(MODULES / "v3x4.txt"),
                str(MODULES / "w6x5_purity_filtration.json")], capsys)[0] == 1
    with pytest.raises(SystemExit) as err:
        main(["no-such-command"])
    assert err.value.code == 2


def test_cli_output_is_deterministic():
    cmd = [sys.executable, "-m", "specseq.cli", "purity", str(MODULES / "w3x4.txt")]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert a == b and a.startswith("purity filtration with degrees")


def test_cli_purity_matches_library():
    M = fixture_module("v3x4.txt")
    rep = purity_filtration(M)
    cmd = [sys.executable, "-m", "specseq.cli", "purity", "--json", str(MODULES / "v3x4.txt")]
    data = json.loads(subprocess.run(cmd, capture_output=True, text=True, check=True).stdout)
    assert data["degrees"] == rep.degrees
    assert data["pure"] == rep.is_pure
