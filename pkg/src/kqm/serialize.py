"""JSON problem files: schema, validation and conversion to model objects.

Rationals travel as strings ``"p/q"`` (or ``"p"``); plain integers are also
accepted on input.  Floats are rejected so nothing inexact sneaks in.
"""

from __future__ import annotations

import json
from fractions import Fraction

import jsonschema

from .errors import SchemaError
from .exact import Poly, fmt
from .graph import BranchRule, CircuitGraph, MeasureModel
from .shift import ShiftCompletion, ShiftProblem
from .wcompops import WeightFunction, WeightRule

RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]*[1-9][0-9]*)?$"},
    ]
}
POSINT = {"type": "integer", "minimum": 1}
RATLIST = {"type": "array", "items": {"$ref": "#/$defs/rational"}}

SHIFT_PAYLOAD = {
    "type": "object",
    "additionalProperties": False,
    "required": ["m", "k", "weights"],
    "properties": {
        "m": POSINT,
        "k": POSINT,
        "weights": {**RATLIST, "minItems": 1},
        "filler": RATLIST,
        "squared_weights": RATLIST,
        "tail_poly": RATLIST,
        "tail_from": {"type": "integer"},
    },
}

BRANCH = {
    "type": "object",
    "additionalProperties": False,
    "required": ["r", "i", "tail"],
    "properties": {
        "r": POSINT,
        "i": POSINT,
        "prefix": RATLIST,
        "tail": {
            "type": "object",
            "additionalProperties": False,
            "required": ["coeffs"],
            "properties": {
                "coeffs": {**RATLIST, "minItems": 1},
                "from_j": POSINT,
                "ratio": {"$ref": "#/$defs/rational"},
            },
        },
    },
}

WEIGHT_BRANCH = {
    "type": "object",
    "additionalProperties": False,
    "required": ["r", "i", "tail"],
    "properties": {
        "r": POSINT,
        "i": POSINT,
        "prefix": RATLIST,
        "tail": {"$ref": "#/$defs/rational"},
    },
}

GRAPH_PAYLOAD = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kappa", "etas"],
    "properties": {
        "kappa": POSINT,
        "etas": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "circuit_masses": RATLIST,
        "branches": {"type": "array", "items": BRANCH},
        "m": POSINT,
        "k": POSINT,
        "initial_masses": RATLIST,
        "weight_pi": {
            "type": "object",
            "additionalProperties": False,
            "required": ["circuit"],
            "properties": {
                "circuit": RATLIST,
                "branches": {"type": "array", "items": WEIGHT_BRANCH},
            },
        },
    },
}

PROBLEM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": {"rational": RATIONAL},
    "type": "object",
    "additionalProperties": False,
    "required": ["kind", "payload"],
    "properties": {
        "kind": {"enum": ["shift", "graph", "weighted"]},
        "payload": {"type": "object"},
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "depth": POSINT,
                "t": {"oneOf": [{"$ref": "#/$defs/rational"}, {"const": "auto"}]},
                "filler": {"$ref": "#/$defs/rational"},
                "approx_digits": POSINT,
                "literal": {"type": "boolean"},
            },
        },
        "result": {"type": "object"},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "shift"}}},
         "then": {"properties": {"payload": SHIFT_PAYLOAD}},
         "else": {"properties": {"payload": GRAPH_PAYLOAD}}},
    ],
}

_VALIDATOR = jsonschema.Draft202012Validator(PROBLEM_SCHEMA)


def json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def validate(doc) -> dict:
    errors = list(_VALIDATOR.iter_errors(doc))
    if errors:
        # the payload schema depends on the kind, so a bad kind is reported first
        kind_errors = [e for e in errors if list(e.absolute_path) == ["kind"]]
        err = kind_errors[0] if kind_errors else jsonschema.exceptions.best_match(errors)
        raise SchemaError(err.message, json_path(err.absolute_path))
    return doc


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from exc
    return validate(doc)


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def rat(x) -> Fraction:
    return Fraction(x)


def rats(xs) -> tuple:
    return tuple(Fraction(x) for x in xs)


def fmts(xs) -> list:
    return [fmt(x) for x in xs]


# ---------------------------------------------------------------------------
# Shift payloads
# ---------------------------------------------------------------------------

def shift_problem(payload: dict, options: dict) -> ShiftProblem:
    return ShiftProblem(
        m=payload["m"], k=payload["k"], weights=rats(payload["weights"]),
        filler=rats(payload["filler"]) if "filler" in payload else None,
        filler_constant=rat(options.get("filler", 1)),
        t=options.get("t", "auto") if options.get("t", "auto") == "auto" else rat(options["t"]),
    )


def shift_completion(payload: dict) -> ShiftCompletion | None:
    if not {"squared_weights", "tail_poly", "tail_from"} <= payload.keys():
        return None
    w = Poly(rats(payload["tail_poly"]))
    return ShiftCompletion(m=payload["m"], k=payload["k"], w=w,
                           squared_prefix=rats(payload["squared_weights"]),
                           tail_from=payload["tail_from"], strict=w.degree == payload["m"] - 1)


def completion_payload(problem_payload: dict, c: ShiftCompletion) -> dict:
    out = dict(problem_payload)
    out.update(squared_weights=fmts(c.squared_prefix), tail_poly=fmts(c.w.coeffs),
               tail_from=c.tail_from)
    return out


# ---------------------------------------------------------------------------
# Graph payloads
# ---------------------------------------------------------------------------

def path_of(*parts) -> str:
    return json_path(("payload",) + parts)


def graph_of(payload: dict) -> CircuitGraph:
    return CircuitGraph(payload["kappa"], tuple(payload["etas"]))


def measure_model(payload: dict, need_circuit: bool = False) -> MeasureModel:
    g = graph_of(payload)
    branches = {}
    for n, b in enumerate(payload.get("branches", [])):
        key = (b["r"], b["i"])
        if key in branches:
            raise SchemaError(f"duplicate branch {key}", path_of("branches", n))
        tail = b["tail"]
        branches[key] = BranchRule(prefix=rats(b.get("prefix", [])), tail=Poly(rats(tail["coeffs"])),
                                   from_j=tail.get("from_j"), ratio=rat(tail.get("ratio", 1)))
    cm = payload.get("circuit_masses")
    if need_circuit and cm is None:
        raise SchemaError("circuit masses are required here", path_of("circuit_masses"))
    return MeasureModel(g, branches, None if cm is None else rats(cm))


def weight_function(payload: dict) -> WeightFunction:
    g = graph_of(payload)
    spec = payload.get("weight_pi")
    if spec is None:
        return WeightFunction.constant(g)
    branches = {}
    for b in spec.get("branches", []):
        branches[(b["r"], b["i"])] = WeightRule(rats(b.get("prefix", [])), rat(b["tail"]))
    return WeightFunction(g, rats(spec["circuit"]), branches)


def branch_json(key: tuple, rule: BranchRule) -> dict:
    return {"r": key[0], "i": key[1], "prefix": fmts(rule.prefix),
            "tail": {"coeffs": fmts(rule.tail.coeffs), "from_j": rule.from_j, "ratio": fmt(rule.ratio)}}


def model_payload(mu: MeasureModel, base: dict | None = None, pi: WeightFunction | None = None) -> dict:
    out = dict(base or {})
    out.update(kappa=mu.graph.kappa, etas=list(mu.graph.etas),
               branches=[branch_json(key, mu.branches[key]) for key in sorted(mu.branches)])
    if mu.circuit_masses is not None:
        out["circuit_masses"] = fmts(mu.circuit_masses)
    if pi is not None:
        out["weight_pi"] = {
            "circuit": fmts(pi.circuit),
            "branches": [{"r": r, "i": i, "prefix": fmts(w.prefix), "tail": fmt(w.tail)}
                         for (r, i), w in sorted(pi.branches.items())],
        }
    return out
