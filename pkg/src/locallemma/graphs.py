"""Finite structured graphs: a simple graph plus a partial labeling of
short vertex tuples.

Orientations, identifiers, randomness and candidate colorings all attach
as labeling "layers" on singleton tuples, each under its own reserved tag,
so a local rule can tell the layers apart after canonicalization.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, Iterable, Mapping, Optional, Tuple

from .errors import GraphBuildError
from .labels import Label, is_label

VertexLabeling = Dict[int, int]

# Reserved layer marker and tags.  A layered singleton label has the shape
# (LAYER_MARK, (tag, value), ...); the empty-tuple entry records which
# layers a graph carries (and global parameters such as a CSP range).
LAYER_MARK: frozenset = frozenset()
TAG_BASE = 0
TAG_INPUT = 1
TAG_IDS = 2
TAG_RAND = 3
TAG_OUTPUT = 4
TAG_RANGE = 5


class StructuredGraph:
    """Immutable graph + structure map. Vertices are distinct ints."""

    __slots__ = ("vertices", "edges", "structure", "tuple_bound", "_nbrs", "_vset")

    def __init__(self, vertices, edges, structure=None, tuple_bound=None):
        vertices = tuple(vertices)
        if len(set(vertices)) != len(vertices):
            raise GraphBuildError("duplicate vertex ids")
        vset = frozenset(vertices)
        norm = set()
        for e in edges:
            u, v = e
            if u == v:
                raise GraphBuildError(f"self-loop at vertex {u}")
            if u not in vset or v not in vset:
                raise GraphBuildError(f"edge {e} uses unknown vertex")
            norm.add((u, v) if u < v else (v, u))
        struct: Dict[tuple, Label] = {}
        for tup, label in (structure or {}).items() if isinstance(structure, Mapping) else (structure or []):
            tup = tuple(tup)
            if any(x not in vset for x in tup):
                raise GraphBuildError(f"structure tuple {tup} uses unknown vertex")
            if not is_label(label):
                raise GraphBuildError(f"invalid label for tuple {tup}: {label!r}")
            if tup in struct:
                raise GraphBuildError(f"duplicate structure entry for tuple {tup}")
            struct[tup] = label
        max_len = max((len(t) for t in struct), default=0)
        if tuple_bound is None:
            tuple_bound = max(max_len, 1)
        if max_len > tuple_bound:
            raise GraphBuildError(f"tuple of length {max_len} exceeds bound {tuple_bound}")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", frozenset(norm))
        object.__setattr__(self, "structure", struct)
        object.__setattr__(self, "tuple_bound", int(tuple_bound))
        nbrs = {v: [] for v in vertices}
        for u, v in sorted(norm):
            nbrs[u].append(v)
            nbrs[v].append(u)
        object.__setattr__(self, "_nbrs", {v: tuple(ws) for v, ws in nbrs.items()})
        object.__setattr__(self, "_vset", vset)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("StructuredGraph is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, StructuredGraph)
            and self.vertices == other.vertices
            and self.edges == other.edges
            and self.structure == other.structure
            and self.tuple_bound == other.tuple_bound
        )

    def __repr__(self):
        return (
            f"StructuredGraph(|V|={len(self.vertices)}, |E|={len(self.edges)}, "
            f"|sigma|={len(self.structure)})"
        )

    def has_vertex(self, v) -> bool:
        return v in self._vset

    def neighbors(self, v) -> Tuple[int, ...]:
        return self._nbrs[v]

    def degree(self, v) -> int:
        return len(self._nbrs[v])

    def max_degree(self) -> int:
        return max((len(ws) for ws in self._nbrs.values()), default=0)

    def adjacent(self, u, v) -> bool:
        return ((u, v) if u < v else (v, u)) in self.edges

    def distances_from(self, x, limit: Optional[int] = None) -> Dict[int, int]:
        """BFS distances from x, truncated at `limit` when given."""
        if x not in self._vset:
            raise GraphBuildError(f"unknown vertex {x}")
        dist = {x: 0}
        frontier = deque([x])
        while frontier:
            v = frontier.popleft()
            d = dist[v]
            if limit is not None and d >= limit:
                continue
            for w in self._nbrs[v]:
                if w not in dist:
                    dist[w] = d + 1
                    frontier.append(w)
        return dist

    def induced(self, vertices: Iterable[int]) -> "StructuredGraph":
        keep = [v for v in self.vertices if v in set(vertices)]
        kset = set(keep)
        edges = [(u, v) for (u, v) in self.edges if u in kset and v in kset]
        struct = {t: l for t, l in self.structure.items() if all(x in kset for x in t)}
        return StructuredGraph(keep, edges, struct, self.tuple_bound)

    def replace_structure(self, structure, tuple_bound=None) -> "StructuredGraph":
        return StructuredGraph(
            self.vertices, self.edges, structure,
            self.tuple_bound if tuple_bound is None else tuple_bound,
        )


class RootedBall:
    """Induced substructure on all vertices within `radius` of `root`."""

    __slots__ = ("graph", "root", "radius")

    def __init__(self, graph: StructuredGraph, root: int, radius: int):
        if not graph.has_vertex(root):
            raise GraphBuildError(f"root {root} not in ball graph")
        if radius < 0:
            raise GraphBuildError("radius must be nonnegative")
        dist = graph.distances_from(root)
        far = [v for v in graph.vertices if dist.get(v, radius + 1) > radius]
        if far:
            raise GraphBuildError(f"vertices {far} beyond radius {radius} of root")
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "radius", int(radius))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("RootedBall is immutable")

    def __repr__(self):
        return f"RootedBall(root={self.root}, R={self.radius}, |V|={len(self.graph.vertices)})"


def build_graph(vertices, edges, structure=None, tuple_bound=None) -> StructuredGraph:
    """Validated constructor; rejects self-loops, unknown vertices and
    duplicate structure entries."""
    return StructuredGraph(vertices, edges, structure, tuple_bound)


def ball(graph: StructuredGraph, x: int, radius: int) -> RootedBall:
    """Rooted ball of the given radius: induced structured subgraph on the
    vertices at distance <= radius from x."""
    if not graph.has_vertex(x):
        raise GraphBuildError(f"unknown vertex {x}")
    if radius < 0:
        raise GraphBuildError("radius must be nonnegative")
    dist = graph.distances_from(x, limit=radius)
    return RootedBall(graph.induced(dist.keys()), x, radius)


def distance_pairs(graph: StructuredGraph, k: int):
    """All unordered pairs at graph distance between 1 and k."""
    pairs = set()
    if k <= 0:
        return pairs
    for v in graph.vertices:
        dist = graph.distances_from(v, limit=k)
        for w, d in dist.items():
            if 1 <= d and v < w:
                pairs.add((v, w))
    return pairs


def power_graph(graph: StructuredGraph, k: int) -> StructuredGraph:
    """Same vertex set, x ~ y iff 1 <= dist(x, y) <= k; structure dropped."""
    if k < 1:
        raise GraphBuildError("power requires k >= 1")
    return StructuredGraph(graph.vertices, distance_pairs(graph, k), {}, 1)


def greedy_coloring(graph: StructuredGraph, order) -> VertexLabeling:
    """First-fit proper coloring along `order` with colors 1, 2, ...;
    never uses more than max_degree + 1 colors."""
    order = list(order)
    if sorted(order) != sorted(graph.vertices):
        raise GraphBuildError("order must be a permutation of the vertex set")
    colors: VertexLabeling = {}
    for v in order:
        used = {colors[w] for w in graph.neighbors(v) if w in colors}
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    return colors


def _layer_pairs(label) -> Optional[tuple]:
    if isinstance(label, tuple) and label and label[0] == LAYER_MARK:
        return label[1:]
    return None


def is_layered(label) -> bool:
    return _layer_pairs(label) is not None


def with_labeling(graph: StructuredGraph, values: Mapping[int, int],
                  tag: int = TAG_OUTPUT) -> StructuredGraph:
    """Attach a vertex labeling as a new structure layer under `tag`.

    Existing singleton labels are preserved (wrapped under TAG_BASE), and
    the empty-tuple entry records the layer so that even an empty labeling
    changes the structure; repeated application nests.
    """
    bad = [v for v in values if not graph.has_vertex(v)]
    if bad:
        raise GraphBuildError(f"labeling mentions unknown vertices {bad}")
    struct = dict(graph.structure)

    def append_pair(tup, pair):
        old = struct.get(tup)
        if old is None:
            struct[tup] = (LAYER_MARK, pair)
        else:
            pairs = _layer_pairs(old)
            if pairs is None:
                struct[tup] = (LAYER_MARK, (TAG_BASE, old), pair)
            else:
                struct[tup] = (LAYER_MARK,) + pairs + (pair,)

    append_pair((), (tag, 0))
    for v, value in values.items():
        if not is_label(value):
            raise GraphBuildError(f"invalid layer value for {v}: {value!r}")
        append_pair((v,), (tag, value))
    return graph.replace_structure(struct, max(graph.tuple_bound, 1))


def layer_value(graph: StructuredGraph, v: int, tag: int):
    """Last value attached at vertex v under `tag`, or None."""
    pairs = _layer_pairs(graph.structure.get((v,)))
    if pairs is None:
        return None
    found = None
    for p in pairs:
        if isinstance(p, tuple) and len(p) == 2 and p[0] == tag:
            found = p[1]
    return found


def layer_values(graph: StructuredGraph, tag: int) -> VertexLabeling:
    out = {}
    for v in graph.vertices:
        val = layer_value(graph, v, tag)
        if val is not None:
            out[v] = val
    return out


def graph_layer_tags(graph: StructuredGraph) -> tuple:
    pairs = _layer_pairs(graph.structure.get(()))
    if pairs is None:
        return ()
    return tuple(p[0] for p in pairs if isinstance(p, tuple) and len(p) == 2)


def base_structure(graph: StructuredGraph) -> Dict[tuple, Label]:
    """Structure entries with layer wrapping undone (TAG_BASE unwrapped,
    pure layer entries dropped)."""
    out = {}
    for tup, label in graph.structure.items():
        pairs = _layer_pairs(label)
        if pairs is None:
            if tup != ():
                out[tup] = label
            continue
        for p in pairs:
            if isinstance(p, tuple) and len(p) == 2 and p[0] == TAG_BASE:
                out[tup] = p[1]
    return out
