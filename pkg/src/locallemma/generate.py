"""Graph generators and the degree-reduction gadget.

The gadget takes a graph G with max degree d and a target palette size k
(with c := d - k satisfying c(c+1) >= d) and produces a graph H of max
degree d - 1 whose k-colorability matches G's.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

from .errors import InfeasibleParamsError
from .graphs import StructuredGraph, build_graph
from .rng import derived_rng


def generate(kind: str, params: dict, seed: int = 0) -> StructuredGraph:
    """Deterministic generator: path, cycle, directed_cycle, torus_grid,
    random_regular, random_tree."""
    if kind == "path":
        n = int(params["n"])
        if n < 1:
            raise InfeasibleParamsError("path needs n >= 1")
        return build_graph(range(n), [(i, i + 1) for i in range(n - 1)])
    if kind == "cycle":
        n = int(params["n"])
        if n < 3:
            raise InfeasibleParamsError("cycle needs n >= 3")
        return build_graph(range(n), [(i, (i + 1) % n) for i in range(n)])
    if kind == "directed_cycle":
        n = int(params["n"])
        if n < 3:
            raise InfeasibleParamsError("directed cycle needs n >= 3")
        edges = [(i, (i + 1) % n) for i in range(n)]
        # orientation layer: ordered pair (u, v) labeled 1 iff edge points u -> v
        structure = {(i, (i + 1) % n): 1 for i in range(n)}
        return build_graph(range(n), edges, structure, tuple_bound=2)
    if kind == "torus_grid":
        rows, cols = int(params["rows"]), int(params["cols"])
        if rows < 3 or cols < 3:
            raise InfeasibleParamsError("torus grid needs rows, cols >= 3")
        def vid(i, j):
            return i * cols + j
        edges = set()
        for i in range(rows):
            for j in range(cols):
                edges.add(tuple(sorted((vid(i, j), vid((i + 1) % rows, j)))))
                edges.add(tuple(sorted((vid(i, j), vid(i, (j + 1) % cols)))))
        return build_graph(range(rows * cols), edges)
    if kind == "random_regular":
        n, d = int(params["n"]), int(params["d"])
        if n * d % 2 != 0 or d >= n or d < 0:
            raise InfeasibleParamsError("need n*d even and 0 <= d < n")
        rng = derived_rng(seed, "random_regular", n, d)
        for _ in range(10_000):
            stubs = [v for v in range(n) for _ in range(d)]
            rng.shuffle(stubs)
            edges = set()
            ok = True
            for i in range(0, len(stubs), 2):
                u, v = stubs[i], stubs[i + 1]
                if u == v or tuple(sorted((u, v))) in edges:
                    ok = False
                    break
                edges.add(tuple(sorted((u, v))))
            if ok:
                return build_graph(range(n), edges)
        raise InfeasibleParamsError("pairing model failed to produce a simple graph")
    if kind == "random_tree":
        n = int(params["n"])
        if n < 1:
            raise InfeasibleParamsError("tree needs n >= 1")
        if n <= 2:
            return build_graph(range(n), [(0, 1)] if n == 2 else [])
        rng = derived_rng(seed, "random_tree", n)
        prufer = [rng.randrange(n) for _ in range(n - 2)]
        degree = [1] * n
        for v in prufer:
            degree[v] += 1
        edges = []
        import heapq
        leaves = [v for v in range(n) if degree[v] == 1]
        heapq.heapify(leaves)
        for v in prufer:
            leaf = heapq.heappop(leaves)
            edges.append((leaf, v))
            degree[v] -= 1
            if degree[v] == 1:
                heapq.heappush(leaves, v)
        u, v = heapq.heappop(leaves), heapq.heappop(leaves)
        edges.append((u, v))
        return build_graph(range(n), edges)
    raise InfeasibleParamsError(f"unknown generator kind {kind!r}")


@dataclass(frozen=True)
class GadgetLayout:
    """Vertex-id scheme of the gadget: per source vertex x (by position in
    the source vertex order) a block of c+1 "u" vertices then k-1 "v"
    vertices."""
    k: int
    c: int
    source_order: Tuple[int, ...]

    @property
    def block(self) -> int:
        return self.c + 1 + (self.k - 1)

    def u_id(self, x: int, alpha: int) -> int:
        return self.source_order.index(x) * self.block + alpha

    def v_id(self, x: int, i: int) -> int:
        return self.source_order.index(x) * self.block + (self.c + 1) + (i - 1)

    def u_ids(self):
        return [self.u_id(x, a) for x in self.source_order for a in range(self.c + 1)]

    def v_ids(self):
        return [self.v_id(x, i) for x in self.source_order for i in range(1, self.k)]


def gadget_layout(graph: StructuredGraph, k: int) -> GadgetLayout:
    d = graph.max_degree()
    c = d - k
    if k < 2 or d < k:
        raise InfeasibleParamsError("gadget needs 2 <= k <= max degree")
    if c * (c + 1) < d:
        raise InfeasibleParamsError(f"need c(c+1) >= d, got c={c}, d={d}")
    return GadgetLayout(k=k, c=c, source_order=tuple(graph.vertices))


def ordered_neighbor_classes(graph: StructuredGraph, x: int, c: int) -> Dict[int, list]:
    """Split the neighbors of x, enumerated in ascending vertex-id order as
    N_1(x) < N_2(x) < ..., into classes by index mod (c+1)."""
    classes: Dict[int, list] = {a: [] for a in range(c + 1)}
    for i, y in enumerate(sorted(graph.neighbors(x)), start=1):
        classes[i % (c + 1)].append(y)
    return classes


def gadget_build(graph: StructuredGraph, k: int) -> StructuredGraph:
    """Degree-reduction gadget H on one (c+1)+(k-1)-vertex block per source
    vertex; max degree drops to d-1 while k-colorability is preserved."""
    layout = gadget_layout(graph, k)
    c = layout.c
    edges = []
    for x in graph.vertices:
        vs = [layout.v_id(x, i) for i in range(1, k)]
        us = [layout.u_id(x, a) for a in range(c + 1)]
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                edges.append((vs[i], vs[j]))
        for v in vs:
            for u in us:
                edges.append((v, u))
    classes = {x: ordered_neighbor_classes(graph, x, c) for x in graph.vertices}
    for x in graph.vertices:
        for alpha in range(c + 1):
            for y in classes[x][alpha]:
                for beta in range(c + 1):
                    if x in classes[y][beta]:
                        u1, u2 = layout.u_id(x, alpha), layout.u_id(y, beta)
                        if u1 < u2:
                            edges.append((u1, u2))
    n = len(graph.vertices) * layout.block
    return build_graph(range(n), set(edges))


def lift_coloring(graph: StructuredGraph, k: int, coloring: Dict[int, int]) -> Dict[int, int]:
    """Lift a proper k-coloring of the source graph to the gadget: every
    u-vertex of x gets the color of x, the v-vertices get the other k-1."""
    layout = gadget_layout(graph, k)
    out = {}
    for x in graph.vertices:
        fx = coloring[x]
        for a in range(layout.c + 1):
            out[layout.u_id(x, a)] = fx
        rest = [col for col in range(1, k + 1) if col != fx]
        for i, col in enumerate(rest, start=1):
            out[layout.v_id(x, i)] = col
    return out
