import json

import numpy as np
import pytest

from cartanflow.corpus import CORPUS_NAMES, complex_corpus, corpus
from cartanflow.errors import StructureError, ValidationError
from cartanflow.formats import dumps_algebra, load_algebra, loads_algebra, save_algebra

SL2_DOC = {
    "dim": 3,
    "basis": ["h", "e", "f"],
    "brackets": [
        {"i": 0, "j": 1, "coeffs": {"1": 2.0}},
        {"i": 0, "j": 2, "coeffs": {"2": -2}},
        {"i": 1, "j": 2, "coeffs": {"0": 1.0}},
    ],
}


def test_hand_written_sl2_matches_corpus():
    alg = loads_algebra(json.dumps(SL2_DOC))
    assert np.array_equal(alg.c, corpus("sl2R").c)
    assert alg.labels == ("h", "e", "f")


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_roundtrip_bitwise(name, tmp_path):
    alg = corpus(name)
    path = tmp_path / f"{name}.json"
    save_algebra(alg, path)
    back = load_algebra(path)
    assert back.c.tobytes() == alg.c.tobytes()
    assert back.labels == alg.labels and back.field_tag == alg.field_tag
    if alg.J is not None:
        assert np.array_equal(back.J, alg.J)


def test_only_upper_entries_written():
    doc = json.loads(dumps_algebra(corpus("sl2R")))
    assert all(b["i"] < b["j"] for b in doc["brackets"])
    assert len(doc["brackets"]) == 3


def test_complex_document_is_realified():
    text = dumps_algebra(complex_corpus("sl3C"))
    doc = json.loads(text)
    assert doc["field"] == "complex"
    first = next(iter(doc["brackets"][0]["coeffs"].values()))
    assert isinstance(first, list) and len(first) == 2
    alg = loads_algebra(text)
    assert alg.dim == 16 and alg.field_tag == "complex-realified"


def test_force_complex_on_real_document():
    alg = loads_algebra(json.dumps(SL2_DOC), complex_field=True)
    assert alg.dim == 6 and np.array_equal(alg.c, corpus("sl2C").c)


def test_malformed_json_reports_line():
    with pytest.raises(StructureError, match="line 3"):
        loads_algebra('{"dim": 2,\n "brackets": [\n  {"i": 0 "j": 1}]}')


@pytest.mark.parametrize("doc,msg", [
    ({"brackets": []}, "missing key"),
    ({"dim": 0, "brackets": []}, "positive"),
    ({"dim": 2, "brackets": [{"i": 1, "j": 0, "coeffs": {}}]}, "i < j"),
    ({"dim": 2, "brackets": [{"i": 0, "j": 1, "coeffs": {"5": 1}}]}, "out of range"),
    ({"dim": 2, "brackets": [{"i": 0, "j": 1, "coeffs": {"1": "x"}}]}, "number"),
    ({"dim": 2, "brackets": [{"i": 0, "j": 1, "coeffs": {}}, {"i": 0, "j": 1, "coeffs": {}}]}, "duplicate"),
    ({"dim": 2, "basis": ["a"], "brackets": []}, "basis"),
])
def test_bad_documents(doc, msg):
    with pytest.raises(StructureError, match=msg):
        loads_algebra(json.dumps(doc))


def test_jacobi_failure_rejected_on_load():
    doc = {"dim": 3, "brackets": [
        {"i": 0, "j": 1, "coeffs": {"1": 1.0}},
        {"i": 1, "j": 2, "coeffs": {"0": 1.0}},
    ]}
    with pytest.raises(ValidationError):
        loads_algebra(json.dumps(doc))
    assert loads_algebra(json.dumps(doc), check=False).dim == 3
