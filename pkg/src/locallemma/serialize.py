"""JSON formats for graphs, CSPs, labelings, weights and reports.

Rationals serialize as "num/den" strings, canonical forms as hex, labels
as integers or nested {"t": ...}/{"s": ...} objects.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict

from .csp import Constraint, Csp
from .engine import WeightedGroundSet
from .graphs import StructuredGraph, build_graph
from .labels import label_from_json, label_to_json


def fraction_str(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def fraction_from_str(text: str) -> Fraction:
    return Fraction(text)


def graph_to_json(graph: StructuredGraph) -> dict:
    return {
        "vertices": list(graph.vertices),
        "edges": sorted([u, v] for (u, v) in graph.edges),
        "structure": [
            {"tuple": list(tup), "label": label_to_json(label)}
            for tup, label in sorted(graph.structure.items())
        ],
        "tuple_bound": graph.tuple_bound,
    }


def graph_from_json(data: dict) -> StructuredGraph:
    structure = {
        tuple(entry["tuple"]): label_from_json(entry["label"])
        for entry in data.get("structure", [])
    }
    return build_graph(data["vertices"], [tuple(e) for e in data.get("edges", [])],
                       structure, data.get("tuple_bound"))


PREDICATES = {}


def register_predicate(name):
    def wrap(factory):
        PREDICATES[name] = factory
        return factory
    return wrap


@register_predicate("all_equal")
def _all_equal(params, m):
    return lambda values: len(set(values)) <= 1


@register_predicate("constant")
def _constant(params, m):
    target = int(params["value"])
    return lambda values: all(v == target for v in values)


@register_predicate("parity")
def _parity(params, m):
    residue = int(params.get("residue", 0))
    return lambda values: sum(v - 1 for v in values) % 2 == residue


def csp_to_json(csp: Csp) -> dict:
    constraints = []
    for c in csp.constraints:
        if c.members is not None:
            constraints.append({
                "domain": list(c.domain),
                "forbidden": sorted(list(member) for member in c.members),
            })
        else:
            if not c.tag.startswith("predicate:"):
                raise ValueError("only registered predicate constraints serialize")
            name, params = json.loads(c.tag[len("predicate:"):])
            constraints.append({"domain": list(c.domain),
                                "predicate": {"name": name, "params": params}})
    return {"ground": list(csp.ground), "m": csp.m, "constraints": constraints}


def csp_from_json(data: dict) -> Csp:
    constraints = []
    m = int(data["m"])
    for entry in data["constraints"]:
        domain = [int(x) for x in entry["domain"]]
        if "forbidden" in entry:
            constraints.append(Constraint.explicit(
                domain, m, [tuple(v) for v in entry["forbidden"]]))
        elif "predicate" in entry:
            name = entry["predicate"]["name"]
            params = entry["predicate"].get("params", {})
            if name not in PREDICATES:
                raise ValueError(f"unknown predicate {name!r}")
            pred = PREDICATES[name](params, m)
            constraints.append(Constraint.from_predicate(
                domain, m, pred,
                tag="predicate:" + json.dumps([name, params], sort_keys=True)))
        else:
            raise ValueError("constraint needs 'forbidden' or 'predicate'")
    return Csp(tuple(data["ground"]), m, tuple(constraints))


def labeling_to_json(values: Dict[int, int]) -> dict:
    return {"values": sorted([int(v), int(c)] for v, c in values.items())}


def labeling_from_json(data: dict) -> Dict[int, int]:
    return {int(v): int(c) for v, c in data["values"]}


def trace_to_json(trace) -> dict:
    """PartialSolutionTrace as JSON: partition classes, chosen branch,
    dangerous-set snapshots, estimator values, coverage."""
    return {
        "mode": trace.mode,
        "classes": [list(cls) for cls in trace.classes],
        "chosen": list(trace.chosen),
        "dangerous": [sorted(d) for d in trace.dangerous],
        "phi": [phi.as_json() for phi in trace.phi],
        "covered_weight": fraction_str(trace.covered_weight),
        "p": fraction_str(trace.p),
    }


def weights_to_json(wts: WeightedGroundSet) -> dict:
    return {"weights": sorted([int(x), fraction_str(w)] for x, w in wts.weights.items())}


def weights_from_json(data: dict) -> WeightedGroundSet:
    return WeightedGroundSet({int(x): fraction_from_str(w) for x, w in data["weights"]})


def dump_json(data, path) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path):
    with open(path) as fh:
        return json.load(fh)
