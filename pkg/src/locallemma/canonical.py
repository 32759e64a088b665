"""Canonical codes for rooted structured graphs.

Equal codes iff the rooted structured graphs are isomorphic (root to root,
adjacency preserved, structure map transported).  The code is the minimal
serialization over all root-preserving bijections compatible with an
iterated invariant refinement of the vertices; the refinement (degree,
root distance, structure participation, neighbor multisets) is what makes
the exhaustive search tractable at desk scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import permutations

from .errors import CanonicalizationCapError
from .graphs import RootedBall, StructuredGraph
from .labels import label_from_json, label_key, label_to_json

DEFAULT_SIZE_CAP = 12
DEFAULT_SEARCH_BUDGET = 100_000


def _key(obj) -> bytes:
    """Total-order key for nested tuples of ints / bytes / labels."""
    if isinstance(obj, bytes):
        return b"b" + obj
    if isinstance(obj, int):
        digits = str(obj).encode()
        return b"i" + b"%08d" % len(digits) + digits
    if isinstance(obj, tuple):
        return b"t(" + b",".join(_key(x) for x in obj) + b")"
    raise TypeError(obj)


def _refine(graph: StructuredGraph, root: int):
    """Iterated invariant partition; returns v -> color id (root is alone
    in its cell, colors ordered by an isomorphism-invariant signature)."""
    dist = graph.distances_from(root)
    participation = {v: [] for v in graph.vertices}
    for tup, label in graph.structure.items():
        for pos, v in enumerate(tup):
            participation[v].append((tup, pos, label))

    color = {
        v: (0 if v == root else 1, dist[v], graph.degree(v)) for v in graph.vertices
    }

    def normalize(sigs):
        order = sorted(set(sigs.values()), key=_key)
        index = {s: i for i, s in enumerate(order)}
        return {v: index[s] for v, s in sigs.items()}

    color = normalize(color)
    while True:
        sigs = {}
        for v in graph.vertices:
            nb = tuple(sorted(color[w] for w in graph.neighbors(v)))
            struct = tuple(
                sorted(
                    (
                        len(tup),
                        pos,
                        label_key(label),
                        tuple(color[x] for x in tup),
                    )
                    for (tup, pos, label) in participation[v]
                    if len(tup) > 0
                )
            )
            sigs[v] = (color[v], nb, struct)
        new = normalize(sigs)
        if len(set(new.values())) == len(set(color.values())):
            return new
        color = new


def _code_bytes(graph: StructuredGraph, mapping) -> bytes:
    n = len(graph.vertices)
    edges = sorted((min(mapping[u], mapping[v]), max(mapping[u], mapping[v]))
                   for (u, v) in graph.edges)
    entries = sorted(
        ((tuple(mapping[x] for x in tup), label) for tup, label in graph.structure.items()),
        key=lambda e: (e[0], label_key(e[1])),
    )
    payload = {
        "n": n,
        "edges": [list(e) for e in edges],
        "structure": [[list(t), label_to_json(l)] for t, l in entries],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


@dataclass(frozen=True)
class CanonicalForm:
    code: bytes

    def hex(self) -> str:
        return self.code.hex()

    @staticmethod
    def from_hex(text: str) -> "CanonicalForm":
        return CanonicalForm(bytes.fromhex(text))

    def decode(self):
        """Canonical representative: (graph on vertices 0..n-1, root 0)."""
        payload = json.loads(self.code.decode())
        structure = {
            tuple(t): label_from_json(l) for t, l in payload["structure"]
        }
        graph = StructuredGraph(range(payload["n"]), payload["edges"], structure)
        return graph, 0


def canonical_type(b: RootedBall, cap: int = DEFAULT_SIZE_CAP,
                   budget: int = DEFAULT_SEARCH_BUDGET) -> CanonicalForm:
    """Canonical code of a rooted ball, invariant under relabeling."""
    graph, root = b.graph, b.root
    n = len(graph.vertices)
    if n > cap:
        raise CanonicalizationCapError(n, cap)
    color = _refine(graph, root)
    cells = {}
    for v in graph.vertices:
        cells.setdefault(color[v], []).append(v)
    cell_list = [sorted(cells[c]) for c in sorted(cells)]

    total = 1
    for cell in cell_list:
        for i in range(2, len(cell) + 1):
            total *= i
        if total > budget:
            raise CanonicalizationCapError(total, budget, what="bijection search")

    offsets = []
    at = 0
    for cell in cell_list:
        offsets.append(at)
        at += len(cell)

    best = None

    def assign(idx, mapping):
        nonlocal best
        if idx == len(cell_list):
            code = _code_bytes(graph, mapping)
            if best is None or code < best:
                best = code
            return
        cell = cell_list[idx]
        base = offsets[idx]
        for perm in permutations(cell):
            for j, v in enumerate(perm):
                mapping[v] = base + j
            assign(idx + 1, mapping)

    assign(0, {})
    return CanonicalForm(best)


def are_isomorphic(b1: RootedBall, b2: RootedBall) -> bool:
    """Brute-force root-preserving isomorphism test (test oracle).

    Tries every bijection matching roots; exponential, only for tiny balls.
    """
    g1, g2 = b1.graph, b2.graph
    v1 = [v for v in g1.vertices if v != b1.root]
    v2 = [v for v in g2.vertices if v != b2.root]
    if len(v1) != len(v2):
        return False
    struct1 = g1.structure
    for perm in permutations(v2):
        phi = {b1.root: b2.root}
        phi.update(zip(v1, perm))
        if any(g2.adjacent(phi[u], phi[v]) != g1.adjacent(u, v)
               for i, u in enumerate(g1.vertices) for v in g1.vertices[i + 1:]):
            continue
        mapped = {tuple(phi[x] for x in t): l for t, l in struct1.items()}
        if mapped == g2.structure:
            return True
    return False
