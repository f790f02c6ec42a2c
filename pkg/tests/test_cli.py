import io
import json
import subprocess
import sys

import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from widthlab import cli, instances
from widthlab.setfn import ExplicitFunction
from widthlab.fileio import function_to_dict, load_schema, save_function, save_json

SCHEMAS = ("widths", "maximize", "approx", "auction", "reproduce", "function", "profile", "error")
REGISTRY = Registry().with_resources(
    (f"{n}.schema.json", Resource.from_contents(load_schema(n))) for n in SCHEMAS)


def validate(obj, name):
    Draft202012Validator(load_schema(name), registry=REGISTRY).validate(obj)


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def threshold6(tmp_path):
    p = tmp_path / "threshold_m6.json"
    save_function(instances.threshold_any_two(6), p)
    return str(p)


def test_schemas_are_valid():
    for n in SCHEMAS:
        Draft202012Validator.check_schema(load_schema(n))


def test_widths_threshold(threshold6):
    code, out, _ = call("widths", threshold6)
    assert code == 0
    rep = json.loads(out)
    validate(rep, "widths")
    assert (rep["sd"], rep["smw"], rep["saw"]) == (5, 1, 1)
    assert rep["ph_level"] == "not-ph"


def test_instance_then_widths(tmp_path):
    f = tmp_path / "f.json"
    code, out, _ = call("instance", "all-pairs", "--m", "4", "-o", str(f))
    assert code == 0
    validate(json.loads(out), "function")
    code, out, _ = call("widths", str(f), "--max-d", "2")
    rep = json.loads(out)
    validate(rep, "widths")
    assert (rep["smw"], rep["saw"], rep["ph_level"]) == (3, 3, 2)
    assert rep["mph_at_most"] == {"1": False, "2": True}


def test_widths_text_and_csv(threshold6):
    code, out, _ = call("widths", threshold6, "--report", "text")
    assert code == 0 and "smw: 1\n" in out
    code, out, _ = call("--format", "csv", "widths", threshold6)
    assert out.splitlines()[0] == "metric,value"
    assert "sd,5" in out.splitlines()


@pytest.mark.parametrize("name,args", [
    ("threshold-any-two", ["--m", "5"]),
    ("pair-matching", ["--t", "2"]),
    ("symmetric-two-level", ["--m", "4"]),
    ("hard-cm", ["--d", "1", "--c1", "1", "--c2", "3", "--m", "32"]),
    ("random", ["--m", "5", "--seed", "3", "--style", "coverage"]),
])
def test_instance_functions(name, args):
    code, out, _ = call("instance", name, *args)
    assert code == 0
    validate(json.loads(out), "function")


@pytest.mark.parametrize("name,args", [
    ("hard-wm", ["--d", "1", "--c1", "1", "--c2", "2", "--n", "2"]),
    ("projective-plane", ["--q", "2"]),
    ("single-bid-pos", ["--d", "2", "--eps", "0.1"]),
])
def test_instance_profiles(name, args):
    code, out, _ = call("instance", name, *args)
    assert code == 0
    validate(json.loads(out), "profile")


def test_maximize_constrained(threshold6):
    code, out, _ = call("maximize", "constrained", threshold6, "--k", "3", "--auto-width", "--brute-force")
    assert code == 0
    rep = json.loads(out)
    validate(rep, "maximize")
    assert rep["d"] == 1 and rep["value"] == rep["opt"] == 1.0


def test_maximize_welfare(tmp_path):
    p = tmp_path / "p.json"
    fs = [instances.random_monotone(5, 1), instances.random_monotone(5, 2, "coverage")]
    save_json({"agents": [function_to_dict(f) for f in fs]}, p)
    code, out, _ = call("maximize", "welfare", str(p), "--d", "1", "--brute-force")
    assert code == 0
    rep = json.loads(out)
    validate(rep, "maximize")
    assert len(rep["allocation"]) == 2
    assert rep["ratio"] >= 1 / 3 - 1e-9


def test_approx(tmp_path):
    f = tmp_path / "f.json"
    save_function(instances.pair_matching(3), f)
    code, out, _ = call("approx", str(f), "--d", "1", "--target-set", "0b111111")
    assert code == 0
    rep = json.loads(out)
    validate(rep, "approx")
    assert rep["verified"] and rep["beta"] == 1.0


def test_auction_single_bid(tmp_path):
    p = tmp_path / "p.json"
    call("instance", "single-bid-pos", "--d", "2", "--eps", "0.1", "-o", str(p))
    code, out, _ = call("auction", "single-bid", "--valuations", str(p), "--grid", "0.05",
                        "--enumerate-nash", "--rounds", "300", "--seed", "2")
    assert code == 0
    rep = json.loads(out)
    validate(rep, "auction")
    assert rep["nash_count"] >= 1 and rep["dynamics"]["rounds"] == 300


def test_auction_sia_supports(tmp_path):
    p = tmp_path / "p.json"
    call("instance", "projective-plane", "--q", "2", "-o", str(p))
    lines = instances.projective_plane_instance(2).lines
    sup = [f"--support={i}:{ln}" for i, ln in enumerate(lines)]
    code, out, _ = call("auction", "sia", "--valuations", str(p), "--levels", "0.3333333333333333",
                        "0.6666666666666666", "1", "--enumerate-nash", *sup)
    assert code == 0
    rep = json.loads(out)
    validate(rep, "auction")
    assert rep["nash_count"] == 7 and rep["opt"] == 1.0


def test_reproduce_propositions_reports_failures():
    code, out, _ = call("reproduce", "--suite", "propositions")
    rep = json.loads(out)
    validate(rep, "reproduce")
    assert rep["total"] == 6
    # the two-level fixture measures smw = 3, not the stated 4 (see decisions ledger)
    failed = [c["id"] for c in rep["checks"] if not c["passed"]]
    assert failed == ["prop-two-level"]
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["widths"],
    ["widths", "/nonexistent.json"],
    ["maximize", "constrained", "/nonexistent.json", "--k", "1", "--d", "0"],
    ["instance", "threshold-any-two"],
    ["reproduce", "--suite", "nope"],
    ["--format", "xml", "widths", "x.json"],
])
def test_invalid_arguments_exit_2(argv):
    code, out, err = call(*argv)
    assert code == 2 and out == ""
    payload = json.loads(err)
    validate(payload, "error")
    assert payload["kind"] == "invalid-argument"


def test_resource_limit_exit_3(tmp_path):
    f = tmp_path / "big.json"
    save_function(ExplicitFunction([0.0] * (1 << 13)), f)
    code, _, err = call("widths", str(f))
    assert code == 3
    assert json.loads(err)["kind"] == "resource-limit"


def test_env_validation(monkeypatch, threshold6):
    monkeypatch.setenv("WIDTHLAB_THREADS", "0")
    assert call("widths", threshold6)[0] == 2
    monkeypatch.setenv("WIDTHLAB_THREADS", "4")
    assert call("widths", threshold6)[0] == 0
    monkeypatch.setenv("WIDTHLAB_SEED", "abc")
    assert call("instance", "random", "--m", "4")[0] == 2


def test_env_seed_changes_default(monkeypatch):
    monkeypatch.delenv("WIDTHLAB_SEED", raising=False)
    a = call("instance", "random", "--m", "5")[1]
    assert a == call("instance", "random", "--m", "5", "--seed", "0")[1]
    monkeypatch.setenv("WIDTHLAB_SEED", "9")
    b = call("instance", "random", "--m", "5")[1]
    assert b == call("instance", "random", "--m", "5", "--seed", "9")[1]
    assert a != b


def test_byte_identical_output(threshold6):
    runs = [call("widths", threshold6)[1] for _ in range(2)]
    assert runs[0] == runs[1]


def test_console_script(threshold6):
    proc = subprocess.run([sys.executable, "-m", "widthlab.cli", "widths", threshold6],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["sd"] == 5
