"""Builtin local algorithms and locally checkable problems.

Each builtin comes with its declared round count as a function of the
instance size and the problem it solves.  Rules operate on the canonical
representative of the ball, so they can only use information that survives
relabeling: adjacency, structure layers (orientation, identifiers,
randomness, candidate outputs) and the root.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log2
from typing import Callable, Dict, Optional

from .canonical import CanonicalForm
from .graphs import (
    TAG_IDS,
    TAG_OUTPUT,
    TAG_RAND,
    StructuredGraph,
    base_structure,
    layer_value,
)
from .localrun import LclProblem, LocalAlgorithm


def proper_coloring_problem(k: Optional[int]) -> LclProblem:
    """Radius-1 verifier for proper coloring; k = None drops the palette
    bound and only checks that adjacent outputs differ."""

    def verify(form: CanonicalForm) -> int:
        graph, root = form.decode()
        values = {}
        for v in graph.vertices:
            val = layer_value(graph, v, TAG_OUTPUT)
            if val is None or not isinstance(val, int):
                return 0
            values[v] = val
        if k is not None and not (1 <= values[root] <= k):
            return 0
        for (u, v) in graph.edges:
            if values[u] == values[v]:
                return 0
        return 1

    name = f"proper-{k}-coloring" if k is not None else "proper-coloring"
    return LclProblem(t=1, verifier=LocalAlgorithm(name=name, rule=verify,
                                                   params={"k": k}))


def _successor_map(graph: StructuredGraph) -> Dict[int, int]:
    """Orientation layer: entry (u, v) -> 1 means an edge directed u -> v."""
    succ = {}
    for tup, label in base_structure(graph).items():
        if len(tup) == 2 and label == 1 and graph.adjacent(*tup):
            succ[tup[0]] = tup[1]
    return succ


def cole_vishkin_steps(n: int) -> int:
    """Iterations of id-bit reduction needed to reach colors in [0, 5]."""
    value = max(n - 1, 0)
    steps = 0
    while value > 5:
        value = 2 * (value.bit_length() - 1) + 1
        steps += 1
    return steps


def cole_vishkin_rounds(n: int) -> int:
    return cole_vishkin_steps(n) + 3


def _cole_vishkin_rule(n: int) -> Callable[[CanonicalForm], int]:
    steps = cole_vishkin_steps(n)

    def rule(form: CanonicalForm) -> int:
        graph, root = form.decode()
        succ = _successor_map(graph)
        pred = {v: u for u, v in succ.items()}
        colors = {}
        for v in graph.vertices:
            ident = layer_value(graph, v, TAG_IDS)
            if ident is None or not isinstance(ident, int):
                return 0
            colors[v] = ident - 1
        known = set(graph.vertices)
        for _ in range(steps):
            nxt = {}
            for v in known:
                s = succ.get(v)
                if s is None or s not in known:
                    continue
                diff = colors[v] ^ colors[s]
                if diff == 0:
                    nxt[v] = 0  # broken identifiers; verification will catch it
                    continue
                i = (diff & -diff).bit_length() - 1
                nxt[v] = 2 * i + ((colors[v] >> i) & 1)
            known = set(nxt)
            colors = nxt
        for kill in (5, 4, 3):
            nxt = {}
            for v in known:
                s, p = succ.get(v), pred.get(v)
                if s not in known or p not in known:
                    continue
                if colors[v] == kill:
                    nxt[v] = min({0, 1, 2} - {colors[s], colors[p]})
                else:
                    nxt[v] = colors[v]
            known = set(nxt)
            colors = nxt
        if root not in colors:
            return 0
        return colors[root] + 1

    return rule


def _id_echo_rule(form: CanonicalForm) -> int:
    graph, root = form.decode()
    ident = layer_value(graph, root, TAG_IDS)
    return int(ident) if isinstance(ident, int) else 0


def trial_coloring_rounds(n: int) -> int:
    # per-round survival of an uncolored vertex is bounded away from 1, so
    # failure decays geometrically; 4 log2 n + 2 keeps it under 1/n at desk
    # scale with a comfortable margin
    return max(1, ceil(4 * log2(max(n, 2)))) + 2


def _trial_coloring_rule(delta: int, rounds: int) -> Callable[[CanonicalForm], int]:
    palette = delta + 1

    def digit(theta: int, r: int) -> int:
        return ((theta - 1) // palette**r) % palette + 1

    def rule(form: CanonicalForm) -> int:
        graph, root = form.decode()
        theta = {}
        for v in graph.vertices:
            val = layer_value(graph, v, TAG_RAND)
            if val is None or not isinstance(val, int):
                return 0
            theta[v] = val
        final: Dict[int, int] = {}
        for r in range(rounds):
            cand = {v: digit(theta[v], r) for v in graph.vertices if v not in final}
            settled = {}
            for v, cv in cand.items():
                ok = True
                for u in graph.neighbors(v):
                    if final.get(u) == cv or (u in cand and cand[u] == cv):
                        ok = False
                        break
                if ok:
                    settled[v] = cv
            final.update(settled)
            if root in final:
                break
        return final.get(root, 0)

    return rule


def _collect_constraints(graph: StructuredGraph):
    """Ascending-domain constraint entries of an encoded graph-CSP ball."""
    out = []
    for tup, label in base_structure(graph).items():
        if not isinstance(label, frozenset) or not tup:
            continue
        if tup != tuple(sorted(tup)) or len(set(tup)) != len(tup):
            continue
        out.append((tup, label))
    return out


def parallel_resample_logic_rounds(n: int, c: int = 8) -> int:
    return max(1, ceil(c / 2 * log2(max(n, 2))))


def _parallel_resample_rule(m0: int, logic_rounds: int) -> Callable[[CanonicalForm], int]:
    def digit(theta: int, r: int) -> int:
        return ((theta - 1) // m0**r) % m0 + 1

    def rule(form: CanonicalForm) -> int:
        graph, root = form.decode()
        theta = {}
        ids = {}
        for v in graph.vertices:
            t = layer_value(graph, v, TAG_RAND)
            i = layer_value(graph, v, TAG_IDS)
            if t is None or i is None:
                return 0
            theta[v], ids[v] = t, i
        constraints = _collect_constraints(graph)
        ident = {dom: tuple(sorted(ids[v] for v in dom)) for dom, _ in constraints}
        current = {v: digit(theta[v], 0) for v in graph.vertices}
        for r in range(1, logic_rounds + 1):
            violated = []
            for dom, bodies in constraints:
                pattern = tuple(current[v] for v in dom)
                if any(pattern in body for body in bodies):
                    violated.append(dom)
            if not violated:
                break
            vset = set(violated)
            resample = set()
            for dom in violated:
                others = [d for d in vset if d != dom and set(d) & set(dom)]
                if all(ident[dom] <= ident[d] for d in others):
                    resample.update(dom)
            for v in resample:
                current[v] = digit(theta[v], r)
        return current[root]

    return rule


@dataclass(frozen=True)
class BuiltinSpec:
    """Algorithm plus its declared complexity and target problem."""

    name: str
    algorithm: LocalAlgorithm
    rounds: Callable[[int], int]
    problem: LclProblem
    graph_class: str
    randomized: bool
    seed_range: Optional[Callable[[int], int]] = None


def builtin_algorithm(name: str, params: Optional[dict] = None) -> BuiltinSpec:
    """Registered algorithms: cole_vishkin_3color, trial_coloring,
    parallel_resample, id_echo."""
    params = dict(params or {})
    if name == "cole_vishkin_3color":
        n = int(params["n"])
        alg = LocalAlgorithm("cole_vishkin_3color", _cole_vishkin_rule(n), {"n": n})
        return BuiltinSpec(
            name=name, algorithm=alg, rounds=cole_vishkin_rounds,
            problem=proper_coloring_problem(3),
            graph_class="directed cycles and paths with an identifier layer",
            randomized=False,
        )
    if name == "id_echo":
        alg = LocalAlgorithm("id_echo", _id_echo_rule, {})
        return BuiltinSpec(
            name=name, algorithm=alg, rounds=lambda n: 0,
            problem=proper_coloring_problem(None),
            graph_class="graphs with a distinct identifier layer",
            randomized=False,
        )
    if name == "trial_coloring":
        delta = int(params["delta"])
        n = int(params["n"])
        rounds = trial_coloring_rounds(n)
        alg = LocalAlgorithm("trial_coloring", _trial_coloring_rule(delta, rounds),
                             {"delta": delta, "n": n})
        return BuiltinSpec(
            name=name, algorithm=alg, rounds=trial_coloring_rounds,
            problem=proper_coloring_problem(delta + 1),
            graph_class=f"graphs of maximum degree {delta} with a randomness layer",
            randomized=True,
            seed_range=lambda nn: (delta + 1) ** trial_coloring_rounds(nn),
        )
    if name == "parallel_resample":
        m0 = int(params["m0"])
        n = int(params["n"])
        c = int(params.get("c", 8))
        logic = parallel_resample_logic_rounds(n, c)
        alg = LocalAlgorithm("parallel_resample", _parallel_resample_rule(m0, logic),
                             {"m0": m0, "n": n, "c": c})
        from .graphcsp import csp_to_lcl

        return BuiltinSpec(
            name=name, algorithm=alg,
            rounds=lambda nn: 2 * parallel_resample_logic_rounds(nn, c),
            problem=csp_to_lcl(m0, 0, "compiled", 0),
            graph_class="encoded graph-CSP instances with identifier and randomness layers",
            randomized=True,
            seed_range=lambda nn: m0 ** (parallel_resample_logic_rounds(nn, c) + 1),
        )
    raise KeyError(f"unknown builtin algorithm {name!r}")
