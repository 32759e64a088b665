"""Encoding a CSP into a structured graph so local rules can read it.

Every ordering of a constraint's domain gets a structure entry holding the
position-relabeled bodies (a set of sets of value tuples), and the range
size rides along as a global layer, so one round suffices for a vertex to
learn every constraint involving it.
"""

from __future__ import annotations

from typing import Dict, List

from .canonical import CanonicalForm
from .csp import Constraint, Csp, DEFAULT_CAP_BITS
from .errors import GraphBuildError
from .graphs import (
    LAYER_MARK,
    TAG_OUTPUT,
    TAG_RANGE,
    StructuredGraph,
    base_structure,
    layer_value,
)
from .localrun import LclProblem, LocalAlgorithm

ENTRY_BUDGET = 200_000


def encode_graph_csp(graph: StructuredGraph, csp: Csp,
                     cap_bits: int = DEFAULT_CAP_BITS) -> StructuredGraph:
    """Structured graph carrying `csp` in its structure map.

    Requires all pairs of distinct elements of each constraint domain to be
    adjacent in `graph`, nonempty constraint domains, and no duplicated
    (domain, body) pairs (the structure stores bodies as a set).
    """
    if tuple(graph.vertices) != tuple(csp.ground):
        raise GraphBuildError("graph vertices must equal the CSP ground set")
    from itertools import permutations
    from math import factorial

    seen = set()
    by_domain: Dict[tuple, List[frozenset]] = {}
    total_entries = 0
    for c in csp.constraints:
        if c.arity() == 0:
            raise GraphBuildError("cannot encode a constraint with empty domain")
        explicit = c.materialize(cap_bits)
        dom = explicit.domain
        for i in range(len(dom)):
            for j in range(i + 1, len(dom)):
                if not graph.adjacent(dom[i], dom[j]):
                    raise GraphBuildError(
                        f"domain pair ({dom[i]}, {dom[j]}) not adjacent in the carrier graph")
        key = (dom, explicit.members)
        if key in seen:
            raise GraphBuildError(f"duplicate constraint on domain {dom}")
        seen.add(key)
        by_domain.setdefault(dom, []).append(explicit.members)
        total_entries += factorial(len(dom))
        if total_entries > ENTRY_BUDGET:
            raise GraphBuildError("constraint domains too large to encode exhaustively")

    structure: dict = {(): (LAYER_MARK, (TAG_RANGE, csp.m))}
    for dom, bodies in by_domain.items():
        index = {x: i for i, x in enumerate(dom)}
        for perm in permutations(dom):
            relabeled = frozenset(
                frozenset(tuple(member[index[x]] for x in perm) for member in body)
                for body in bodies
            )
            structure[perm] = relabeled
    return StructuredGraph(graph.vertices, graph.edges, structure,
                           max(csp.bound(), 1))


def decode_graph_csp(encoded: StructuredGraph):
    """Inverse of encode_graph_csp (up to constraint order)."""
    m = layer_value_global(encoded)
    constraints = []
    for tup, label in base_structure(encoded).items():
        if tup != tuple(sorted(tup)) or len(set(tup)) != len(tup):
            continue
        if not isinstance(label, frozenset):
            continue
        for body in sorted(label, key=_body_key):
            constraints.append(Constraint.explicit(tup, m, body))
    carrier = StructuredGraph(encoded.vertices, encoded.edges, {}, 1)
    constraints.sort(key=lambda c: (c.domain, _body_key(c.members)))
    return carrier, Csp(encoded.vertices, m, tuple(constraints))


def _body_key(body) -> tuple:
    return tuple(sorted(body))


def layer_value_global(encoded: StructuredGraph) -> int:
    entry = encoded.structure.get(())
    if not (isinstance(entry, tuple) and entry and entry[0] == LAYER_MARK):
        raise GraphBuildError("missing range layer on the encoded graph")
    for pair in entry[1:]:
        if isinstance(pair, tuple) and len(pair) == 2 and pair[0] == TAG_RANGE:
            return int(pair[1])
    raise GraphBuildError("missing range layer on the encoded graph")


def constraints_at_root(decoded: StructuredGraph, root: int):
    """(domain tuple, bodies) pairs whose ascending domain contains root."""
    out = []
    for tup, label in base_structure(decoded).items():
        if not isinstance(label, frozenset) or root not in tup:
            continue
        if tup != tuple(sorted(tup)) or len(set(tup)) != len(tup):
            continue
        out.append((tup, label))
    return out


def csp_to_lcl(m: int, b: int, p, d: int) -> LclProblem:
    """Radius-1 verifier for encoded graph-CSP instances: a vertex accepts
    iff its value is in [m] and no constraint containing it is violated by
    the candidate assignment layer."""

    def verify(form: CanonicalForm) -> int:
        decoded, root = form.decode()
        values = {}
        for v in decoded.vertices:
            val = layer_value(decoded, v, TAG_OUTPUT)
            if val is not None:
                values[v] = val
        own = values.get(root)
        if own is None or not (isinstance(own, int) and 1 <= own <= m):
            return 0
        for dom, bodies in constraints_at_root(decoded, root):
            if any(x not in values for x in dom):
                return 0
            pattern = tuple(values[x] for x in dom)
            if any(pattern in body for body in bodies):
                return 0
        return 1

    verifier = LocalAlgorithm(
        name="csp-verifier",
        rule=verify,
        params={"m": int(m), "b": int(b), "p": str(p), "d": int(d)},
    )
    return LclProblem(t=1, verifier=verifier)
