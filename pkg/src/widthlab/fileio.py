"""JSON encoding of set functions and valuation profiles.

A function file is one object with ``"m"`` and ``"kind"``::

    {"m": 3, "kind": "explicit", "table": [0, 1, 1, 2, 1, 2, 2, 3]}
    {"m": 3, "kind": "hypergraph", "edges": [{"set": [0, 1], "w": 2.0}]}
    {"m": 3, "kind": "symmetric", "levels": [0, 0, 1, 1]}
    {"m": 4, "kind": "ch", "base": 0.5, "blocks": [[0, 1]], "d": 2}
    {"m": 3, "kind": "max", "components": [{...}, {...}]}
    {"m": 32, "kind": "hard-cm", "d": 1, "c1": 1, "c2": 3, "R": [29, 30, 31]}
    {"m": 12, "kind": "hard-wm", "d": 1, "c1": 1, "c2": 2, "R": [9, 10, 11]}

A profile file is ``{"agents": [<function>, ...]}``; a bare function object
is read as a one-agent profile.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import InvalidArgument
from .instances import HardCMFunction, HardCMParams, HardWMFunction
from .setfn import (CHFunction, ExplicitFunction, HypergraphFunction, MaxFunction,
                    SetFunction, SymmetricFunction, elements, mask_of)

KINDS = ("explicit", "hypergraph", "symmetric", "ch", "max", "hard-cm", "hard-wm")


def _items(obj: dict, key: str, m: int) -> int:
    raw = obj.get(key)
    if not isinstance(raw, list) or not all(isinstance(x, int) for x in raw):
        raise InvalidArgument(f"{key!r} must be a list of item indices")
    if any(not 0 <= x < m for x in raw):
        raise InvalidArgument(f"{key!r} has an index outside [0, {m})")
    if len(set(raw)) != len(raw):
        raise InvalidArgument(f"{key!r} repeats an item")
    return mask_of(raw)


def function_from_dict(obj: Any) -> SetFunction:
    if not isinstance(obj, dict):
        raise InvalidArgument("function description must be a JSON object")
    kind = obj.get("kind")
    m = obj.get("m")
    if kind not in KINDS:
        raise InvalidArgument(f"unknown function kind {kind!r}; expected one of {KINDS}")
    if not isinstance(m, int) or isinstance(m, bool):
        raise InvalidArgument("'m' must be an integer")
    try:
        if kind == "explicit":
            table = obj.get("table")
            if not isinstance(table, list) or len(table) != 1 << m:
                raise InvalidArgument(f"explicit table must have length 2**m = {1 << m}")
            return ExplicitFunction(table)
        if kind == "hypergraph":
            weights: dict[int, float] = {}
            for e in obj.get("edges", []):
                mask = _items(e, "set", m)
                weights[mask] = weights.get(mask, 0.0) + float(e["w"])
            return HypergraphFunction(m, weights)
        if kind == "symmetric":
            return SymmetricFunction(m, obj["levels"])
        if kind == "ch":
            blocks = [_items({"b": b}, "b", m) for b in obj.get("blocks", [])]
            return CHFunction(m, obj["base"], blocks, obj["d"])
        if kind == "max":
            comps = [function_from_dict(c) for c in obj.get("components", [])]
            if any(c.m != m for c in comps):
                raise InvalidArgument("max components must share m")
            return MaxFunction(comps)
        if kind == "hard-cm":
            p = HardCMParams(int(obj["d"]), int(obj["c1"]), int(obj["c2"]), m, _items(obj, "R", m))
            p.validate()
            return HardCMFunction(p)
        return HardWMFunction(int(obj["d"]), int(obj["c1"]), int(obj["c2"]), m, _items(obj, "R", m))
    except KeyError as exc:
        raise InvalidArgument(f"{kind} function is missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidArgument):
            raise
        raise InvalidArgument(f"malformed {kind} function: {exc}") from None


def function_to_dict(f: SetFunction) -> dict:
    m = f.m
    if isinstance(f, HardCMFunction):
        p = f.params
        return {"m": m, "kind": "hard-cm", "d": p.d, "c1": p.c1, "c2": p.c2, "R": elements(p.R)}
    if isinstance(f, HardWMFunction):
        return {"m": m, "kind": "hard-wm", "d": f.d, "c1": f.c1, "c2": f.c2, "R": elements(f.R)}
    if isinstance(f, HypergraphFunction):
        return {"m": m, "kind": "hypergraph",
                "edges": [{"set": elements(e), "w": w} for e, w in f.weights.items()]}
    if isinstance(f, SymmetricFunction):
        return {"m": m, "kind": "symmetric", "levels": list(f.levels)}
    if isinstance(f, CHFunction):
        return {"m": m, "kind": "ch", "base": f.base, "blocks": [elements(q) for q in f.blocks],
                "d": f.block_bound}
    if isinstance(f, MaxFunction):
        return {"m": m, "kind": "max", "components": [function_to_dict(c) for c in f.components]}
    return {"m": m, "kind": "explicit", "table": [float(x) for x in f.table()]}


def _read_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidArgument(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None


def load_function(path) -> SetFunction:
    return function_from_dict(_read_json(path))


def load_profile(path) -> list[SetFunction]:
    obj = _read_json(path)
    if isinstance(obj, dict) and "agents" in obj:
        agents = obj["agents"]
        if not isinstance(agents, list) or not agents:
            raise InvalidArgument("'agents' must be a nonempty list")
        return [function_from_dict(a) for a in agents]
    return [function_from_dict(obj)]


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def save_json(obj: Any, path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def save_function(f: SetFunction, path) -> None:
    save_json(function_to_dict(f), path)


def load_schema(name: str) -> dict:
    """JSON schema shipped for report ``name`` (e.g. ``"widths"``)."""
    try:
        text = resources.files("widthlab").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    except FileNotFoundError:
        raise InvalidArgument(f"no schema named {name!r}") from None
    return json.loads(text)
