import json

import numpy as np
import pytest

from fcslab import fixtures, serialize, systems


def test_system_roundtrip():
    sys_ = fixtures.aklt()
    text = serialize.dumps_system(sys_, metadata={"name": "aklt"})
    back, rho, meta = serialize.loads_system(text)
    assert back.n == sys_.n and back.d == sys_.d
    assert np.allclose(back.ops, sys_.ops)
    assert meta == {"name": "aklt"}


def test_rho_roundtrip():
    sys_ = fixtures.aklt()
    rho = np.eye(2, dtype=complex) / 2
    text = serialize.dumps_system(sys_, rho=rho)
    _, rho_back, _ = serialize.loads_system(text)
    assert np.allclose(rho_back, rho)


def test_invalid_json_rejected():
    with pytest.raises(serialize.ParseError):
        serialize.loads_system("{not json")


def test_missing_fields_rejected():
    with pytest.raises(serialize.ParseError):
        serialize.loads_system(json.dumps({"n": 2, "d": 3}))


def test_shape_mismatch_rejected():
    doc = serialize.system_to_dict(fixtures.aklt())
    doc["n"] = 3
    with pytest.raises(serialize.ParseError):
        serialize.system_from_dict(doc)


def test_unit_defect_rejected_at_validation():
    doc = serialize.system_to_dict(fixtures.aklt())
    doc["v"][0][0][0] = [5.0, 0.0]
    with pytest.raises(systems.ValidationError):
        serialize.system_from_dict(doc)


def test_unsupported_version_rejected():
    doc = serialize.system_to_dict(fixtures.aklt())
    doc["version"] = 99
    with pytest.raises(serialize.ParseError):
        serialize.system_from_dict(doc)


def test_report_serialization_is_stable():
    from fcslab import purity
    rep = purity.purity_battery(fixtures.bernoulli_uniform())
    doc = serialize.report_to_dict(rep, provenance={"tol": 1e-9})
    one = serialize.dumps_report(doc)
    two = serialize.dumps_report(json.loads(one))
    assert one == two
    assert one.endswith("\n")
