import json

import numpy as np
import pytest
from hypothesis import given

from widthlab import fileio, instances
from widthlab.errors import InvalidArgument
from widthlab.setfn import CHFunction, MaxFunction, SymmetricFunction, additive

from strategies import functions

SAMPLES = [
    instances.all_pairs(4),
    SymmetricFunction(3, [0, 1, 1, 2]),
    CHFunction(4, 0.5, [0b0011], 2),
    MaxFunction([additive([1, 0, 2]), additive([0, 3, 0])]),
    instances.hard_cm_instance(instances.HardCMParams.make(1, 1, 3, m=32)),
    instances.hard_wm_instance(instances.HardWMParams.make(1, 1, 2, 2))[0],
]


@pytest.mark.parametrize("f", SAMPLES, ids=lambda f: f.kind)
def test_round_trip_by_kind(f, tmp_path):
    path = tmp_path / "f.json"
    fileio.save_function(f, path)
    g = fileio.load_function(path)
    assert type(g) is type(f)
    for S in [0, 1, 3, 5, (1 << f.m) - 1, (1 << f.m) - 2]:
        assert g.eval(S) == f.eval(S)


@given(functions)
def test_round_trip_tables(f):
    g = fileio.function_from_dict(json.loads(fileio.dumps(fileio.function_to_dict(f))))
    assert np.array_equal(g.table(), f.table())


def test_explicit_round_trip():
    f = instances.random_monotone(4, 1)
    g = fileio.function_from_dict(fileio.function_to_dict(f))
    assert np.array_equal(g.table(), f.table())


@pytest.mark.parametrize("obj", [
    [],
    {"m": 2},
    {"m": 2, "kind": "weird"},
    {"m": "2", "kind": "explicit", "table": [0, 1, 1, 2]},
    {"m": 2, "kind": "explicit", "table": [0, 1, 1]},
    {"m": 2, "kind": "hypergraph", "edges": [{"set": [0, 5], "w": 1}]},
    {"m": 2, "kind": "hypergraph", "edges": [{"set": [0, 0], "w": 1}]},
    {"m": 2, "kind": "symmetric"},
    {"m": 2, "kind": "symmetric", "levels": [0, 1]},
])
def test_rejects_malformed(obj):
    with pytest.raises(InvalidArgument):
        fileio.function_from_dict(obj)


def test_profiles(tmp_path):
    p = tmp_path / "p.json"
    fileio.save_json({"agents": [fileio.function_to_dict(f) for f in SAMPLES[:2]]}, p)
    assert len(fileio.load_profile(p)) == 2
    q = tmp_path / "q.json"
    fileio.save_function(SAMPLES[0], q)
    assert len(fileio.load_profile(q)) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidArgument):
        fileio.load_profile(bad)
    with pytest.raises(InvalidArgument):
        fileio.load_profile(tmp_path / "missing.json")
    fileio.save_json({"agents": []}, bad)
    with pytest.raises(InvalidArgument):
        fileio.load_profile(bad)


def test_dumps_canonical():
    assert fileio.dumps({"b": 1, "a": [1, 2]}) == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'
    with pytest.raises(ValueError):
        fileio.dumps({"x": float("nan")})


def test_schemas_ship():
    for name in ("widths", "maximize", "approx", "auction", "reproduce", "function", "profile", "error"):
        assert fileio.load_schema(name)["$id"] == f"{name}.schema.json"
    with pytest.raises(InvalidArgument):
        fileio.load_schema("nope")
