"""Constraints and CSPs with exact rational probabilities.

A constraint is a set of forbidden total assignments on its domain, stored
either explicitly (tuples of values aligned with the sorted domain) or as
a membership predicate with an optional exact count.  Values live in
[m] = {1, ..., m}.  Every probability is an exact Fraction; enumeration
behind predicate bodies is capped at `cap_bits` bits of state.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import log2
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .errors import EnumerationCapError
from .graphs import StructuredGraph, greedy_coloring
from .rng import derived_rng

DEFAULT_CAP_BITS = 20

PartialAssignment = Dict[int, int]


@dataclass(frozen=True)
class Constraint:
    """Forbidden-pattern set over `domain` with range [m].

    Exactly one of `members` / `predicate` is set.  `count` caches |body|
    for predicate constraints; `restrict_hook`, when present, builds the
    restriction without losing exact counting (used by the binary range
    encoding, whose bodies are far too large to enumerate).
    """

    domain: Tuple[int, ...]
    m: int
    members: Optional[frozenset] = None
    predicate: Optional[Callable[[Tuple[int, ...]], bool]] = None
    count: Optional[int] = None
    restrict_hook: Optional[Callable[[PartialAssignment], "Constraint"]] = None
    tag: str = ""

    @staticmethod
    def explicit(domain, m: int, members: Iterable) -> "Constraint":
        domain = tuple(sorted(domain))
        if len(set(domain)) != len(domain):
            raise ValueError("constraint domain has repeated elements")
        body = set()
        for member in members:
            if isinstance(member, dict):
                if set(member) != set(domain):
                    raise ValueError("member must be total on exactly the domain")
                member = tuple(member[x] for x in domain)
            member = tuple(int(v) for v in member)
            if len(member) != len(domain):
                raise ValueError("member arity mismatch")
            if any(not (1 <= v <= m) for v in member):
                raise ValueError(f"member values out of range [1..{m}]")
            body.add(member)
        if not body:
            domain = ()  # the empty constraint has empty domain
        return Constraint(domain=domain, m=int(m), members=frozenset(body))

    @staticmethod
    def from_predicate(domain, m: int, predicate, count: Optional[int] = None,
                       restrict_hook=None, tag: str = "") -> "Constraint":
        domain = tuple(sorted(domain))
        if len(set(domain)) != len(domain):
            raise ValueError("constraint domain has repeated elements")
        return Constraint(domain=domain, m=int(m), predicate=predicate,
                          count=None if count is None else int(count),
                          restrict_hook=restrict_hook, tag=tag)

    def __post_init__(self):
        if (self.members is None) == (self.predicate is None):
            raise ValueError("constraint needs exactly one of members/predicate")

    def is_explicit(self) -> bool:
        return self.members is not None

    def arity(self) -> int:
        return len(self.domain)

    def contains(self, values: Tuple[int, ...]) -> bool:
        """Membership of a value tuple aligned with the sorted domain."""
        if self.members is not None:
            return tuple(values) in self.members
        return bool(self.predicate(tuple(values)))

    def violated_by(self, assignment: Dict[int, int]) -> bool:
        return self.contains(tuple(assignment[x] for x in self.domain))

    def body_size(self, cap_bits: int = DEFAULT_CAP_BITS) -> int:
        if self.members is not None:
            return len(self.members)
        if self.count is not None:
            return self.count
        bits = self.arity() * log2(self.m) if self.m > 1 else 0
        if bits > cap_bits:
            raise EnumerationCapError(bits, cap_bits, what="constraint body count")
        total = 0
        for values in product(range(1, self.m + 1), repeat=self.arity()):
            if self.predicate(values):
                total += 1
        object.__setattr__(self, "count", total)
        return total

    def materialize(self, cap_bits: int = DEFAULT_CAP_BITS) -> "Constraint":
        """Explicit version of a predicate constraint (capped)."""
        if self.members is not None:
            return self
        bits = self.arity() * log2(self.m) if self.m > 1 else 0
        if bits > cap_bits:
            raise EnumerationCapError(bits, cap_bits, what="constraint materialization")
        body = [values for values in product(range(1, self.m + 1), repeat=self.arity())
                if self.predicate(values)]
        return Constraint.explicit(self.domain, self.m, body)


def probability(constraint: Constraint, cap_bits: int = DEFAULT_CAP_BITS) -> Fraction:
    """Exact P[B] = |B| / m^|dom(B)|."""
    return Fraction(constraint.body_size(cap_bits), constraint.m ** constraint.arity())


@dataclass
class ProbabilityEstimate:
    value: Fraction
    radius: float
    trials: int


def probability_estimate(constraint: Constraint, trials: int, seed: int = 0) -> ProbabilityEstimate:
    """Monte Carlo estimate for bodies above the enumeration cap; clearly
    typed so it is never mistaken for an exact value."""
    from .localrun import hoeffding_radius

    rng = derived_rng(seed, "prob-estimate", constraint.tag, len(constraint.domain))
    hits = 0
    for _ in range(trials):
        values = tuple(rng.randint(1, constraint.m) for _ in constraint.domain)
        if constraint.contains(values):
            hits += 1
    return ProbabilityEstimate(Fraction(hits, trials), hoeffding_radius(trials), trials)


def restrict_constraint(constraint: Constraint, g: PartialAssignment) -> Constraint:
    """B/g: forbidden patterns on dom(B) \\ dom(g) whose union with g is
    forbidden by B.  Fully-covered domains collapse to {()} (violated) or
    the empty constraint."""
    overlap = {x: g[x] for x in constraint.domain if x in g}
    if not overlap:
        return constraint
    if constraint.restrict_hook is not None:
        return constraint.restrict_hook(overlap)
    keep = [i for i, x in enumerate(constraint.domain) if x not in overlap]
    new_domain = tuple(constraint.domain[i] for i in keep)
    if constraint.members is not None:
        body = set()
        for member in constraint.members:
            if all(member[i] == overlap[x] for i, x in enumerate(constraint.domain)
                   if x in overlap):
                body.add(tuple(member[i] for i in keep))
        return Constraint.explicit(new_domain, constraint.m, body)
    if not new_domain:
        full = tuple(overlap[x] for x in constraint.domain)
        return Constraint.explicit((), constraint.m, [()] if constraint.predicate(full) else [])
    fixed = dict(overlap)
    base = constraint

    def restricted(values: Tuple[int, ...]) -> bool:
        merged = dict(zip(new_domain, values))
        merged.update(fixed)
        return base.predicate(tuple(merged[x] for x in base.domain))

    return Constraint.from_predicate(new_domain, constraint.m, restricted, tag=constraint.tag)


@dataclass(frozen=True)
class Csp:
    """Finite CSP: ordered ground set, range size m, constraint list."""

    ground: Tuple[int, ...]
    m: int
    constraints: Tuple[Constraint, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("range size must be >= 1")
        gset = set(self.ground)
        if len(gset) != len(self.ground):
            raise ValueError("ground elements must be distinct")
        for c in self.constraints:
            if c.m != self.m:
                raise ValueError("constraint range differs from CSP range")
            if any(x not in gset for x in c.domain):
                raise ValueError("constraint domain outside ground set")

    def bound(self) -> int:
        return max((c.arity() for c in self.constraints), default=0)


def make_csp(ground, m, constraints) -> Csp:
    return Csp(tuple(ground), int(m), tuple(constraints))


@dataclass(frozen=True)
class CspStats:
    p: Fraction
    d: int
    b: int


def neighborhood_counts(csp: Csp) -> List[int]:
    """|N(B)| per constraint: how many other constraints share an element."""
    doms = [set(c.domain) for c in csp.constraints]
    elems: Dict[int, List[int]] = {}
    for i, dom in enumerate(doms):
        for x in dom:
            elems.setdefault(x, []).append(i)
    out = []
    for i, dom in enumerate(doms):
        touching = set()
        for x in dom:
            touching.update(elems[x])
        touching.discard(i)
        out.append(len(touching))
    return out


def stats(csp: Csp, cap_bits: int = DEFAULT_CAP_BITS) -> CspStats:
    """(p, d, b) = (max probability, max neighborhood size, max arity)."""
    p = Fraction(0)
    for c in csp.constraints:
        p = max(p, probability(c, cap_bits))
    d = max(neighborhood_counts(csp), default=0)
    return CspStats(p=p, d=d, b=csp.bound())


def restrict_csp(csp: Csp, g: PartialAssignment) -> Csp:
    new_ground = tuple(x for x in csp.ground if x not in g)
    return Csp(new_ground, csp.m, tuple(restrict_constraint(c, g) for c in csp.constraints))


def is_solution(csp: Csp, assignment: Dict[int, int]):
    """(ok, violated constraint indices); assignment must be total."""
    missing = [x for x in csp.ground if x not in assignment]
    if missing:
        raise ValueError(f"assignment must be total; missing {missing[:5]}")
    violated = [i for i, c in enumerate(csp.constraints) if c.violated_by(assignment)]
    return (not violated, violated)


def solutions_exhaustive(csp: Csp, cap_bits: int = DEFAULT_CAP_BITS):
    """Yield every solution; capped at m^|ground| <= 2^cap_bits."""
    bits = len(csp.ground) * log2(csp.m) if csp.m > 1 else 0
    if bits > cap_bits:
        raise EnumerationCapError(bits, cap_bits, what="solution enumeration")
    for values in product(range(1, csp.m + 1), repeat=len(csp.ground)):
        assignment = dict(zip(csp.ground, values))
        if is_solution(csp, assignment)[0]:
            yield assignment


def check_partial_solution(csp: Csp, g: PartialAssignment,
                           cap_bits: int = DEFAULT_CAP_BITS,
                           mt_cap: Optional[int] = None,
                           seed: int = 0) -> Optional[bool]:
    """Three-valued: True / False when decidable (exhaustive search within
    the cap, or an immediate contradiction), None when only the resampling
    oracle was available and it capped out."""
    restricted = restrict_csp(csp, g)
    for c in restricted.constraints:
        if c.arity() == 0 and c.is_explicit() and c.members:
            return False  # g already violates a fully-covered constraint
    bits = len(restricted.ground) * log2(restricted.m) if restricted.m > 1 else 0
    if bits <= cap_bits:
        for _ in solutions_exhaustive(restricted, cap_bits):
            return True
        return False
    from .engine import moser_tardos_solve

    cap = mt_cap if mt_cap is not None else 200 * max(1, len(restricted.constraints))
    result = moser_tardos_solve(restricted, seed=seed, cap=cap)
    if result.assignment is not None:
        return True
    return None


def const_assignment(elements, value: int) -> PartialAssignment:
    return {x: value for x in elements}


def intersection_graph(csp: Csp) -> StructuredGraph:
    """Ground elements adjacent iff they share a constraint domain."""
    edges = set()
    for c in csp.constraints:
        dom = sorted(c.domain)
        for i in range(len(dom)):
            for j in range(i + 1, len(dom)):
                edges.add((dom[i], dom[j]))
    return StructuredGraph(csp.ground, edges, {}, 1)


def discrete_partition(csp: Csp) -> List[Tuple[int, ...]]:
    """Partition of the ground set into classes meeting every constraint
    domain at most once, by greedy coloring of the intersection graph in
    ground order; at most (b-1)(d+1)+1 classes."""
    graph = intersection_graph(csp)
    coloring = greedy_coloring(graph, csp.ground)
    classes: Dict[int, List[int]] = {}
    for x in csp.ground:
        classes.setdefault(coloring[x], []).append(x)
    return [tuple(classes[c]) for c in sorted(classes)]
