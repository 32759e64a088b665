import random

import pytest

from locallemma.canonical import CanonicalForm, are_isomorphic, canonical_type
from locallemma.errors import CanonicalizationCapError
from locallemma.generate import generate
from locallemma.graphs import TAG_OUTPUT, ball, build_graph, with_labeling


def random_rooted(rng, n_max=5, with_structure=True):
    n = rng.randint(1, n_max)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5]
    structure = {}
    if with_structure and n > 1:
        for _ in range(rng.randint(0, 2)):
            k = rng.randint(1, 2)
            tup = tuple(rng.randrange(n) for _ in range(k))
            structure[tup] = rng.randint(0, 2)
    g = build_graph(range(n), edges, structure)
    root = 0
    comp = g.distances_from(root)
    return ball(g.induced(comp.keys()), root, n)


def relabeled(b, rng):
    g = b.graph
    perm = list(g.vertices)
    rng.shuffle(perm)
    mapping = dict(zip(g.vertices, perm))
    edges = [(mapping[u], mapping[v]) for (u, v) in g.edges]
    structure = {tuple(mapping[x] for x in t): l for t, l in g.structure.items()}
    g2 = build_graph(sorted(perm), edges, structure, g.tuple_bound)
    return type(b)(g2, mapping[b.root], b.radius)


def test_rotations_of_cycle_agree():
    g = generate("cycle", {"n": 6})
    forms = {canonical_type(ball(g, v, 2)).hex() for v in g.vertices}
    assert len(forms) == 1


def test_root_degree_distinguishes():
    path = generate("path", {"n": 4})
    c1 = canonical_type(ball(path, 0, 1))
    c2 = canonical_type(ball(path, 1, 1))
    assert c1 != c2


def test_structure_label_distinguishes():
    g1 = build_graph([0, 1], [(0, 1)])
    g2 = build_graph([0, 1], [(0, 1)], [((0, 1), 1)])
    assert canonical_type(ball(g1, 0, 1)) != canonical_type(ball(g2, 0, 1))


def test_invariance_under_relabeling():
    rng = random.Random(7)
    for _ in range(200):
        b = random_rooted(rng)
        b2 = relabeled(b, rng)
        assert canonical_type(b) == canonical_type(b2)


def test_iso_completeness_against_brute_force():
    # code equality must match the exhaustive isomorphism search
    rng = random.Random(13)
    agree = 0
    for _ in range(500):
        b1 = random_rooted(rng, n_max=4)
        b2 = relabeled(b1, rng) if rng.random() < 0.5 else random_rooted(rng, n_max=4)
        same_code = canonical_type(b1) == canonical_type(b2)
        same_iso = are_isomorphic(b1, b2)
        assert same_code == same_iso
        agree += 1
    assert agree == 500


def test_decode_round_trip():
    rng = random.Random(3)
    for _ in range(50):
        b = random_rooted(rng)
        form = canonical_type(b)
        decoded, root = form.decode()
        assert root == 0
        redone = canonical_type(type(b)(decoded, 0, b.radius))
        assert redone == form


def test_labeling_changes_code():
    g = generate("cycle", {"n": 4})
    f = {0: 1, 1: 2, 2: 1, 3: 2}
    labeled = with_labeling(g, f, TAG_OUTPUT)
    c0 = canonical_type(ball(labeled, 0, 1))
    c1 = canonical_type(ball(labeled, 1, 1))
    assert c0 != c1  # adjacent roots carry different layer values


def test_symmetric_labeling_equal_codes():
    g = build_graph([0, 1], [(0, 1)])
    labeled = with_labeling(g, {0: 1, 1: 1}, TAG_OUTPUT)
    assert canonical_type(ball(labeled, 0, 1)) == canonical_type(ball(labeled, 1, 1))


def test_size_cap_enforced():
    g = generate("cycle", {"n": 30})
    with pytest.raises(CanonicalizationCapError):
        canonical_type(ball(g, 0, 8), cap=12)


def test_hex_round_trip():
    g = generate("path", {"n": 3})
    form = canonical_type(ball(g, 1, 1))
    assert CanonicalForm.from_hex(form.hex()) == form
