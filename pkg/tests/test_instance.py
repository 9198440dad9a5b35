import json

import pytest
from hypothesis import given

from conftest import FIXTURES, ROOT
from strategies import filtered
from taufilt.exactalg import ZZ
from taufilt.fixtures import build_fixtures
from taufilt.instance import InstanceError, dumps, instance_to_json, load, loads, schema

MOORE = {
    "format": 1,
    "ring": "Z",
    "filtered": {
        "s_min": 0,
        "below": "constant",
        "above": "zero",
        "degrees": [0, 1],
        "levels": [{"ranks": [1, 1], "d": {"1": [[4]]}}, {"ranks": [1, 1], "d": {"1": [[4]]}}],
        "transitions": [{"0": [[2]], "1": [[2]]}],
    },
}


def err(doc) -> InstanceError:
    text = doc if isinstance(doc, (str, bytes)) else json.dumps(doc, indent=1)
    with pytest.raises(InstanceError) as e:
        loads(text)
    return e.value


def test_minimal_instance_loads():
    inst = loads(json.dumps(MOORE))
    X = inst.filtered
    assert X.s_min == 0 and X.s_max == 1
    assert X.level(0).homology(0).orders == (4,)


@given(filtered())
def test_round_trip(X):
    text = dumps(instance_to_json("x", X.ring, filtered=X))
    Y = loads(text).filtered
    assert (Y.s_min, Y.s_max, Y.below, Y.above) == (X.s_min, X.s_max, X.below, X.above)
    for s in range(X.s_min, X.s_max + 1):
        assert Y.level(s).same_as(X.level(s))
    for s in range(X.s_min + 1, X.s_max + 1):
        assert all(Y.transition(s).f(n) == X.transition(s).f(n) for n in X.degrees)
    assert dumps(instance_to_json("x", Y.ring, filtered=Y)) == text


def test_syntax_error_is_located():
    text = json.dumps(MOORE)[:-20]
    e = err(text)
    assert e.kind == "syntax" and e.offset is not None and e.line == 1


def test_encoding_error():
    assert err(b"\xff\xfe{}").kind == "encoding"


def test_schema_error_has_path_and_line():
    doc = json.loads(json.dumps(MOORE))
    doc["filtered"]["levels"][1]["ranks"] = "two"
    e = err(doc)
    assert e.kind == "schema"
    assert e.path == "$.filtered.levels[1].ranks"
    assert e.line is not None and e.line > 1


def test_unknown_ring():
    doc = dict(MOORE, ring="F4")
    assert err(doc).kind in ("ring", "schema")


def test_d_squared_error():
    doc = json.loads(json.dumps(MOORE))
    doc["filtered"]["degrees"] = [0, 2]
    doc["filtered"]["levels"] = [{"ranks": [1, 1, 1], "d": {"1": [[1]], "2": [[1]]}}] * 2
    doc["filtered"]["transitions"] = [{"0": [[1]], "1": [[1]], "2": [[1]]}]
    e = err(doc)
    assert e.kind == "d_squared"
    assert e.path.startswith("$.filtered.levels[0]")


def test_chain_map_error():
    doc = json.loads(json.dumps(MOORE))
    doc["filtered"]["transitions"] = [{"0": [[1]], "1": [[2]]}]
    e = err(doc)
    assert e.kind == "chain_map" and e.path.startswith("$.filtered.transitions[0]")


def test_dimension_error():
    doc = json.loads(json.dumps(MOORE))
    doc["filtered"]["levels"][0]["d"] = {"1": [[4, 1]]}
    assert err(doc).kind == "dimension"


def test_error_text_names_the_place():
    doc = json.loads(json.dumps(MOORE))
    doc["filtered"]["transitions"] = [{"0": [[1]], "1": [[2]]}]
    text = str(err(doc))
    assert "chain_map error at $.filtered.transitions[0]" in text


def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load(tmp_path / "nope.json")


def test_documented_schema_is_the_package_schema():
    assert json.loads((ROOT / "docs" / "instance.schema.json").read_text()) == schema()


def test_shipped_fixtures_are_current():
    for name, doc in build_fixtures().items():
        assert (FIXTURES / f"{name}.json").read_text(encoding="utf-8") == dumps(doc)
        inst = load(FIXTURES / f"{name}.json")
        assert inst.name == name


def test_fixture_payloads():
    assert load(FIXTURES / "koszul.json").dga is not None
    assert load(FIXTURES / "bz2.json").cosimplicial is not None
    inst = load(FIXTURES / "exterior.json")
    assert inst.hopf is not None and inst.ext_bounds == (8, 8)
    assert load(FIXTURES / "sphere.json").ring == ZZ
