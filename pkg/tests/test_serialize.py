from fractions import Fraction

from locallemma.csp import probability, stats
from locallemma.engine import WeightedGroundSet
from locallemma.generate import generate
from locallemma.labels import label_from_json, label_key, label_to_json
from locallemma.randgen import random_small_csp
from locallemma.serialize import (
    csp_from_json,
    csp_to_json,
    fraction_from_str,
    fraction_str,
    graph_from_json,
    graph_to_json,
    labeling_from_json,
    labeling_to_json,
    weights_from_json,
    weights_to_json,
)


def test_label_round_trip():
    values = [0, 7, (1, 2), frozenset([1, (2, 3)]), ((0,), frozenset())]
    for v in values:
        assert label_from_json(label_to_json(v)) == v


def test_label_key_orders_ints_numerically():
    assert label_key(2) < label_key(10) < label_key(100)


def test_graph_round_trip_with_structure():
    g = generate("directed_cycle", {"n": 5})
    data = graph_to_json(g)
    assert data["tuple_bound"] == 2
    g2 = graph_from_json(data)
    assert g2 == g


def test_fraction_strings():
    f = Fraction(22, 7)
    assert fraction_from_str(fraction_str(f)) == f


def test_csp_round_trip_explicit():
    for seed in range(20):
        csp = random_small_csp(seed)
        data = csp_to_json(csp)
        back = csp_from_json(data)
        assert back.ground == csp.ground and back.m == csp.m
        assert stats(back) == stats(csp)


def test_csp_predicate_from_json():
    data = {
        "ground": [0, 1, 2],
        "m": 3,
        "constraints": [
            {"domain": [0, 1], "predicate": {"name": "all_equal", "params": {}}},
            {"domain": [2], "predicate": {"name": "constant", "params": {"value": 2}}},
        ],
    }
    csp = csp_from_json(data)
    assert probability(csp.constraints[0]) == Fraction(1, 3)
    assert probability(csp.constraints[1]) == Fraction(1, 3)
    again = csp_from_json(csp_to_json(csp))
    assert stats(again) == stats(csp)


def test_labeling_round_trip():
    values = {3: 1, 0: 2, 7: 5}
    assert labeling_from_json(labeling_to_json(values)) == values


def test_weights_round_trip():
    wts = WeightedGroundSet({0: Fraction(1, 3), 1: Fraction(1, 3), 2: Fraction(1, 3)})
    assert weights_from_json(weights_to_json(wts)).weights == wts.weights
