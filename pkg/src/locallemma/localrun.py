"""Round-based execution of local rules and verification of locally
checkable coloring problems.

A local algorithm is a pure function of the canonical type of the rooted
radius-T ball; running it for T rounds means evaluating that function at
every vertex independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import log, sqrt
from typing import Callable, List, Optional

from .canonical import CanonicalForm, canonical_type
from .errors import EnumerationCapError, PipelineError
from .graphs import (
    TAG_IDS,
    TAG_OUTPUT,
    TAG_RAND,
    StructuredGraph,
    VertexLabeling,
    ball,
    distance_pairs,
    greedy_coloring,
    with_labeling,
)
from .rng import derived_rng


@dataclass(frozen=True)
class LocalAlgorithm:
    """Named deterministic rule from canonical ball types to outputs."""

    name: str
    rule: Callable[[CanonicalForm], int]
    params: dict = field(default_factory=dict)

    def __call__(self, form: CanonicalForm) -> int:
        return int(self.rule(form))


@dataclass(frozen=True)
class LclProblem:
    """Locally checkable problem: verifier runs t rounds, outputs 0/1."""

    t: int
    verifier: LocalAlgorithm

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("verification radius must be nonnegative")


@dataclass
class RunReport:
    outputs: VertexLabeling
    rounds_used: int
    valid: bool
    violating_vertices: List[int]
    trials: Optional[int] = None
    failures: Optional[int] = None
    checks: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.valid != (not self.violating_vertices):
            raise ValueError("valid must mirror an empty violator list")


def run_deterministic(alg: LocalAlgorithm, graph: StructuredGraph, rounds: int,
                      canon_cap: int = None, canon_budget: int = None) -> VertexLabeling:
    """Evaluate alg at every vertex on the canonical type of its
    radius-`rounds` ball."""
    if rounds < 0:
        raise ValueError("rounds must be nonnegative")
    kwargs = {}
    if canon_cap is not None:
        kwargs["cap"] = canon_cap
    if canon_budget is not None:
        kwargs["budget"] = canon_budget
    out: VertexLabeling = {}
    for x in graph.vertices:
        form = canonical_type(ball(graph, x, rounds), **kwargs)
        out[x] = int(alg(form))
    return out


def verify_lcl(problem: LclProblem, graph: StructuredGraph, labeling: VertexLabeling,
               canon_cap: int = None) -> RunReport:
    """Run the verifier on the graph with `labeling` attached as the output
    layer; valid iff every vertex reports 1."""
    missing = [v for v in graph.vertices if v not in labeling]
    if missing:
        raise ValueError(f"labeling must be total; missing {missing[:5]}")
    attached = with_labeling(graph, labeling, TAG_OUTPUT)
    results = run_deterministic(problem.verifier, attached, problem.t, canon_cap=canon_cap)
    violators = sorted(v for v, bit in results.items() if bit != 1)
    return RunReport(
        outputs=dict(labeling),
        rounds_used=problem.t,
        valid=not violators,
        violating_vertices=violators,
    )


def det_pipeline(alg: LocalAlgorithm, problem: LclProblem, graph: StructuredGraph,
                 n: int, rounds: int, order=None, canon_cap: int = None) -> RunReport:
    """Deterministic pipeline: greedy-color the distance-2R power graph
    with at most n colors, attach the colors as identifiers (distinct
    inside every 2R-ball), run alg, verify.
    """
    radius = rounds + problem.t
    max_ball = max((len(graph.distances_from(x, limit=2 * radius)) for x in graph.vertices),
                   default=0)
    if max_ball > n:
        raise PipelineError(f"ball size precondition fails: max |B(x,2R)| = {max_ball} > n = {n}")
    pairs = distance_pairs(graph, 2 * radius)
    power = StructuredGraph(graph.vertices, pairs, {}, 1)
    ids = greedy_coloring(power, order if order is not None else graph.vertices)
    colors_used = max(ids.values(), default=0)
    if colors_used > n:
        raise PipelineError(f"greedy used {colors_used} colors > n = {n}")
    outputs = run_deterministic(alg, with_labeling(graph, ids, TAG_IDS), rounds,
                                canon_cap=canon_cap)
    report = verify_lcl(problem, graph, outputs, canon_cap=canon_cap)
    report.rounds_used = rounds
    report.checks = {
        "n": n,
        "rounds": rounds,
        "radius": radius,
        "max_ball_2R": max_ball,
        "identifier_colors": colors_used,
    }
    return report


def hoeffding_radius(trials: int, alpha: float = 0.01) -> float:
    """Distribution-free two-sided confidence radius at level 1 - alpha."""
    return sqrt(log(2.0 / alpha) / (2.0 * trials))


@dataclass
class FailureEstimate:
    rate: Fraction
    radius: float
    trials: int
    failures: int


def estimate_randomized_failure(alg: LocalAlgorithm, problem: LclProblem,
                                graph: StructuredGraph, rounds: int, m: int,
                                trials: int, seed: int = 0,
                                canon_cap: int = None) -> FailureEstimate:
    """Empirical failure fraction over uniform seed layers, with a 99%
    confidence radius."""
    if trials < 1 or m < 1:
        raise ValueError("need trials >= 1 and m >= 1")
    failures = 0
    for trial in range(trials):
        rng = derived_rng(seed, "rand-trial", trial)
        theta = {v: rng.randint(1, m) for v in graph.vertices}
        attached = with_labeling(graph, theta, TAG_RAND)
        outputs = run_deterministic(alg, attached, rounds, canon_cap=canon_cap)
        report = verify_lcl(problem, graph, outputs, canon_cap=canon_cap)
        if not report.valid:
            failures += 1
    return FailureEstimate(
        rate=Fraction(failures, trials),
        radius=hoeffding_radius(trials),
        trials=trials,
        failures=failures,
    )


def exact_randomized_failure(alg: LocalAlgorithm, problem: LclProblem,
                             graph: StructuredGraph, rounds: int, m: int,
                             cap_bits: int = 20, canon_cap: int = None) -> Fraction:
    """Exact failure probability by enumerating all m^|V| seed maps;
    capped at |V| * log2(m) <= cap_bits."""
    from itertools import product

    n = len(graph.vertices)
    bits = n * log(m, 2) if m > 1 else 0
    if bits > cap_bits:
        raise EnumerationCapError(bits, cap_bits, what="seed enumeration")
    failures = 0
    total = 0
    for values in product(range(1, m + 1), repeat=n):
        theta = dict(zip(graph.vertices, values))
        attached = with_labeling(graph, theta, TAG_RAND)
        outputs = run_deterministic(alg, attached, rounds, canon_cap=canon_cap)
        report = verify_lcl(problem, graph, outputs, canon_cap=canon_cap)
        total += 1
        if not report.valid:
            failures += 1
    return Fraction(failures, total)
