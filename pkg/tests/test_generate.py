import itertools

import pytest

from locallemma.errors import InfeasibleParamsError
from locallemma.generate import (
    gadget_build,
    gadget_layout,
    generate,
    lift_coloring,
    ordered_neighbor_classes,
)
from locallemma.graphs import build_graph


def test_cycle_basic():
    g = generate("cycle", {"n": 4})
    assert len(g.vertices) == 4 and len(g.edges) == 4
    assert all(g.degree(v) == 2 for v in g.vertices)


def test_directed_cycle_orientation():
    g = generate("directed_cycle", {"n": 5})
    assert g.structure[(0, 1)] == 1
    assert (1, 0) not in g.structure


def test_torus_grid_degrees():
    g = generate("torus_grid", {"rows": 3, "cols": 3})
    assert len(g.vertices) == 9
    assert all(g.degree(v) == 4 for v in g.vertices)


def test_random_regular():
    g = generate("random_regular", {"n": 10, "d": 3}, seed=7)
    assert all(g.degree(v) == 3 for v in g.vertices)
    assert len(g.edges) == 15
    # determinism given the seed
    g2 = generate("random_regular", {"n": 10, "d": 3}, seed=7)
    assert g2.edges == g.edges


def test_random_regular_parity_rejected():
    with pytest.raises(InfeasibleParamsError):
        generate("random_regular", {"n": 5, "d": 3})


def test_random_tree():
    g = generate("random_tree", {"n": 12}, seed=3)
    assert len(g.edges) == 11
    assert len(g.distances_from(0)) == 12  # connected


def is_k_colorable(graph, k):
    order = sorted(graph.vertices, key=lambda v: -graph.degree(v))
    colors = {}

    def assign(i):
        if i == len(order):
            return True
        v = order[i]
        used = {colors[w] for w in graph.neighbors(v) if w in colors}
        for c in range(1, k + 1):
            if c not in used:
                colors[v] = c
                if assign(i + 1):
                    return True
                del colors[v]
        return False

    return assign(0)


def test_gadget_star_example():
    # star K_{1,4} with k = 2: d = 4, c = 2
    g = build_graph(range(5), [(0, 1), (0, 2), (0, 3), (0, 4)])
    layout = gadget_layout(g, 2)
    assert layout.c == 2
    classes = ordered_neighbor_classes(g, 0, layout.c)
    assert classes[1] == [1, 4] and classes[2] == [2] and classes[0] == [3]
    assert all(len(ys) <= layout.c for ys in classes.values())
    h = gadget_build(g, 2)
    assert h.max_degree() == 3  # = d - 1


def test_gadget_v_vertex_degrees_exact():
    g = build_graph(range(5), [(0, 1), (0, 2), (0, 3), (0, 4)])
    layout = gadget_layout(g, 2)
    h = gadget_build(g, 2)
    d = g.max_degree()
    for vid in layout.v_ids():
        assert h.degree(vid) == d - 1


def test_gadget_precondition():
    g = generate("cycle", {"n": 5})  # d = 2, k = 2 gives c = 0
    with pytest.raises(InfeasibleParamsError):
        gadget_build(g, 2)


def test_gadget_lift_coloring_proper():
    g = build_graph(range(5), [(0, 1), (0, 2), (0, 3), (0, 4)])
    f = {0: 1, 1: 2, 2: 2, 3: 2, 4: 2}
    h = gadget_build(g, 2)
    lifted = lift_coloring(g, 2, f)
    for (u, v) in h.edges:
        assert lifted[u] != lifted[v]
    assert max(lifted.values()) <= 2


def test_gadget_chromatic_preserved_small():
    # all graphs on 5 vertices with max degree 4, k = 2
    for mask in range(1 << 10):
        edges = [e for i, e in enumerate(itertools.combinations(range(5), 2))
                 if mask >> i & 1]
        g = build_graph(range(5), edges)
        if g.max_degree() != 4:
            continue
        h = gadget_build(g, 2)
        assert h.max_degree() <= 3
        if is_k_colorable(g, 2):
            assert is_k_colorable(h, 2)
