"""Local lemma engine: condition checkers, the resampling oracle, the
partial-solution constructor with derandomized branch selection, the
halving step, the weighted iterated solver, and covering families.

Everything asserted here is an exact rational inequality.  Comparisons
against sqrt(p) square both sides; the branch-selection estimator, whose
value is (rational) + (rational) * sqrt(p), is compared inside the
quadratic field Q[sqrt(p)].  Comparisons against e^-1 and e^-2 use the
certified rational lower bounds 0.3678 and 0.1353, so passing a check here
implies the corresponding analytic condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .connect import Reduction, apply, identity_reduction, pull_partial
from .csp import (
    Csp,
    DEFAULT_CAP_BITS,
    PartialAssignment,
    const_assignment,
    discrete_partition,
    intersection_graph,
    is_solution,
    neighborhood_counts,
    probability,
    restrict_constraint,
    restrict_csp,
    solutions_exhaustive,
    stats,
)
from .errors import CoverBudgetError, EnumerationCapError, StepInfeasibleError
from .rng import derived_rng

INV_E_LOWER = Fraction(3678, 10_000)    # certified rational lower bound on e^-1
INV_E2_LOWER = Fraction(1353, 10_000)   # certified rational lower bound on e^-2
MEASURABLE_RHS = Fraction(1, 2**15)


@dataclass
class LllVerdict:
    condition: str
    holds: bool
    margin: Fraction
    p: Fraction
    d: int
    eta: Optional[Dict[int, Fraction]] = None


def lll_check(csp: Csp, which: str = "symmetric", eta: Optional[Dict[int, Fraction]] = None,
              cap_bits: int = DEFAULT_CAP_BITS) -> LllVerdict:
    """Exact-rational check of one of the solvability conditions:
    symmetric p(d+1) <= 0.3678, general (per-constraint eta), measurable
    p(d+1)^8 <= 2^-15, neighborhood-growth p * max|B(x,2)| <= 0.3678."""
    st = stats(csp, cap_bits)
    if which == "symmetric":
        margin = INV_E_LOWER - st.p * (st.d + 1)
        return LllVerdict("symmetric", margin >= 0, margin, st.p, st.d)
    if which == "measurable":
        margin = MEASURABLE_RHS - st.p * (st.d + 1) ** 8
        return LllVerdict("measurable", margin >= 0, margin, st.p, st.d)
    if which == "general":
        counts = neighborhood_counts(csp)
        if eta is None:
            eta = {i: Fraction(1, st.d + 1) for i in range(len(csp.constraints))}
        doms = [set(c.domain) for c in csp.constraints]
        margin = None
        for i, c in enumerate(csp.constraints):
            if not (0 <= eta[i] < 1):
                raise ValueError("eta values must lie in [0, 1)")
            rhs = eta[i]
            for j, dom in enumerate(doms):
                if j != i and dom & doms[i]:
                    rhs *= 1 - eta[j]
            gap = rhs - probability(c, cap_bits)
            margin = gap if margin is None else min(margin, gap)
        if margin is None:
            margin = Fraction(1)
        return LllVerdict("general", margin >= 0, margin, st.p, st.d, eta=dict(eta))
    if which == "neighborhood-growth":
        graph = intersection_graph(csp)
        ball2 = max((len(graph.distances_from(x, limit=2)) for x in graph.vertices),
                    default=0)
        margin = INV_E_LOWER - st.p * ball2
        return LllVerdict("neighborhood-growth", margin >= 0, margin, st.p, st.d)
    raise ValueError(f"unknown condition {which!r}")


@dataclass
class MoserTardosResult:
    assignment: Optional[Dict[int, int]]
    resamples: int
    capped: bool


def moser_tardos_solve(csp: Csp, seed: int = 0, cap: Optional[int] = None) -> MoserTardosResult:
    """Start uniform; while violated, resample the least-index violated
    constraint's domain.  Cap-out is a distinct verdict, not an error."""
    rng = derived_rng(seed, "moser-tardos", len(csp.ground))
    if cap is None:
        cap = 50 * max(1, len(csp.constraints))
    assignment = {x: rng.randint(1, csp.m) for x in csp.ground}
    resamples = 0
    while True:
        violated = None
        for i, c in enumerate(csp.constraints):
            if c.arity() == 0:
                if c.is_explicit() and c.members:
                    return MoserTardosResult(None, resamples, True)
                continue
            if c.violated_by(assignment):
                violated = c
                break
        if violated is None:
            return MoserTardosResult(assignment, resamples, False)
        if resamples >= cap:
            return MoserTardosResult(None, resamples, True)
        for x in violated.domain:
            assignment[x] = rng.randint(1, csp.m)
        resamples += 1


@dataclass(frozen=True)
class WeightedGroundSet:
    """Nonnegative rational weights summing to one (finite measure)."""

    weights: Dict[int, Fraction]

    def __post_init__(self):
        total = sum(self.weights.values(), Fraction(0))
        if total != 1:
            raise ValueError(f"weights must sum to 1, got {total}")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be nonnegative")

    @staticmethod
    def uniform(ground: Sequence[int]) -> "WeightedGroundSet":
        ground = list(ground)
        if not ground:
            raise ValueError("need a nonempty ground set")
        w = Fraction(1, len(ground))
        return WeightedGroundSet({x: w for x in ground})

    def weight_of(self, elements) -> Fraction:
        return sum((self.weights.get(x, Fraction(0)) for x in elements), Fraction(0))

    def min_positive(self) -> Optional[Fraction]:
        positive = [w for w in self.weights.values() if w > 0]
        return min(positive) if positive else None

    def restricted_normalized(self, elements) -> Optional["WeightedGroundSet"]:
        sub = {x: self.weights[x] for x in elements if x in self.weights}
        total = sum(sub.values(), Fraction(0))
        if total == 0:
            return None
        return WeightedGroundSet({x: w / total for x, w in sub.items()})


class QuadExpr:
    """Exact value a + b*sqrt(p) in the quadratic field Q[sqrt(p)]."""

    __slots__ = ("a", "b", "p")

    def __init__(self, a: Fraction, b: Fraction, p: Fraction):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.p = Fraction(p)

    def __add__(self, other: "QuadExpr") -> "QuadExpr":
        return QuadExpr(self.a + other.a, self.b + other.b, self.p)

    def __sub__(self, other: "QuadExpr") -> "QuadExpr":
        return QuadExpr(self.a - other.a, self.b - other.b, self.p)

    def scaled(self, factor: Fraction) -> "QuadExpr":
        return QuadExpr(self.a * factor, self.b * factor, self.p)

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0 or self.p == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 against b^2 p on the dominant side
        lhs, rhs = a * a, b * b * self.p
        if a > 0:  # a > 0, b < 0: positive iff a^2 > b^2 p
            return (lhs > rhs) - (lhs < rhs)
        return (rhs > lhs) - (rhs < lhs)

    def __le__(self, other: "QuadExpr") -> bool:
        return (self - other).sign() <= 0

    def __lt__(self, other: "QuadExpr") -> bool:
        return (self - other).sign() < 0

    def float(self) -> float:
        from math import sqrt

        return float(self.a) + float(self.b) * sqrt(float(self.p))

    def as_json(self):
        return {"const": str(self.a), "sqrtp_coeff": str(self.b), "float": self.float()}


@dataclass
class PartialSolutionTrace:
    """Replayable record of the level-by-level construction."""

    classes: List[Tuple[int, ...]]
    chosen: List[int]
    dangerous: List[frozenset]      # D(u) per prefix, length len(classes)+1
    phi: List[QuadExpr]             # estimator per prefix, same length
    covered_weight: Fraction = Fraction(0)
    p: Fraction = Fraction(0)
    mode: str = "derandomized"


def _is_dangerous(prob: Fraction, p: Fraction) -> bool:
    return prob * prob > p


class _LevelState:
    """Mutable restriction state shared by the constructors below."""

    def __init__(self, csp: Csp, p: Fraction, cap_bits: int):
        self.p = p
        self.cap_bits = cap_bits
        self.constraints = list(csp.constraints)
        self.probs = [probability(c, cap_bits) for c in csp.constraints]
        self.original_domains = [frozenset(c.domain) for c in csp.constraints]
        self.frozen = [_is_dangerous(pr, p) for pr in self.probs]

    def dangerous_elements(self) -> frozenset:
        out = set()
        for i, frozen in enumerate(self.frozen):
            if frozen:
                out.update(self.original_domains[i])
        return frozenset(out)

    def snapshot(self):
        return (list(self.constraints), list(self.probs), list(self.frozen))

    def restore(self, snap):
        self.constraints, self.probs, self.frozen = (list(snap[0]), list(snap[1]),
                                                     list(snap[2]))

    def fix(self, elements, value: int):
        """Restrict every live constraint by const(elements, value)."""
        if not elements:
            return
        g = const_assignment(elements, value)
        for i, c in enumerate(self.constraints):
            if self.frozen[i]:
                continue
            if not (set(c.domain) & set(elements)):
                continue
            restricted = restrict_constraint(c, g)
            self.constraints[i] = restricted
            self.probs[i] = probability(restricted, self.cap_bits)
            if _is_dangerous(self.probs[i], self.p):
                self.frozen[i] = True


def _term(prob: Fraction, p: Fraction) -> QuadExpr:
    """min(1, P / sqrt(p)) as an element of Q[sqrt(p)] (P/sqrt(p) equals
    (P/p) * sqrt(p))."""
    if _is_dangerous(prob, p):
        return QuadExpr(Fraction(1), Fraction(0), p)
    return QuadExpr(Fraction(0), prob / p, p)


def construct_partial(csp: Csp, red: Reduction, wts: WeightedGroundSet,
                      mode: str = "derandomized", samples: int = 8, seed: int = 0,
                      cap_bits: int = DEFAULT_CAP_BITS):
    """Partial solution h of `csp` by the level recursion over a discrete
    partition, freezing constraints whose conditional probability exceeds
    sqrt(p).

    Guarantees, verified before returning: every restricted constraint has
    P^2 <= n^2 p, and the weight of source elements whose determining set
    avoids the dangerous set is >= 1 - d(rho) sqrt(p) (squared form).
    `mode` is "derandomized" (pessimistic-estimator branch choice) or
    "sampled" (best of `samples` random branch words, cross-validation).
    """
    n = csp.m
    st = stats(csp, cap_bits)
    p, d = st.p, st.d
    surrogate = INV_E2_LOWER / Fraction(n * n)
    if p * (d + 1) ** 2 > surrogate:
        raise StepInfeasibleError(
            f"partial-solution precondition fails: p(d+1)^2 = {p * (d + 1) ** 2} "
            f"> {surrogate}")

    classes = discrete_partition(csp)
    d_rho = red.degree()
    conn = red.connection

    # weight of source elements whose determining set meets each original domain
    weight_touching: List[Fraction] = []
    for i, c in enumerate(csp.constraints):
        dom = set(c.domain)
        weight_touching.append(sum(
            (wts.weights.get(x, Fraction(0)) for x in conn.source
             if dom & conn.det_sets[x]), Fraction(0)))

    state = _LevelState(csp, p, cap_bits)

    def phi(st_: _LevelState) -> QuadExpr:
        total = QuadExpr(Fraction(0), Fraction(0), p)
        for i in range(len(st_.constraints)):
            if weight_touching[i] == 0:
                continue
            total = total + _term(st_.probs[i], p).scaled(weight_touching[i])
        return total

    def run_word(word: Sequence[int], st_: _LevelState):
        h: PartialAssignment = {}
        dangerous_trace = [st_.dangerous_elements()]
        phi_trace = [phi(st_)]
        for k, cls in enumerate(classes):
            danger = st_.dangerous_elements()
            fresh = [x for x in cls if x not in danger]
            value = word[k]
            h.update(const_assignment(fresh, value))
            st_.fix(fresh, value)
            dangerous_trace.append(st_.dangerous_elements())
            phi_trace.append(phi(st_))
        return h, dangerous_trace, phi_trace

    if mode == "derandomized":
        chosen: List[int] = []
        for cls in classes:
            danger = state.dangerous_elements()
            fresh = [x for x in cls if x not in danger]
            best_i, best_phi, best_snap = None, None, None
            for i in range(1, n + 1):
                snap = state.snapshot()
                state.fix(fresh, i)
                cand_phi = phi(state)
                if best_phi is None or cand_phi < best_phi:
                    best_i, best_phi = i, cand_phi
                    best_snap = state.snapshot()
                state.restore(snap)
            state.restore(best_snap)
            chosen.append(best_i)
        final_state = _LevelState(csp, p, cap_bits)
        h, dangerous_trace, phi_trace = run_word(chosen, final_state)
        state = final_state
    elif mode == "sampled":
        rng = derived_rng(seed, "construct-partial", len(classes))
        best = None
        for _ in range(max(1, samples)):
            word = [rng.randint(1, n) for _ in classes]
            cand_state = _LevelState(csp, p, cap_bits)
            h_c, dt_c, pt_c = run_word(word, cand_state)
            danger = dt_c[-1]
            covered = sum((wts.weights.get(x, Fraction(0)) for x in conn.source
                           if not (conn.det_sets[x] & danger)), Fraction(0))
            if best is None or covered > best[0]:
                best = (covered, word, h_c, dt_c, pt_c, cand_state)
        _, chosen, h, dangerous_trace, phi_trace, state = best
    else:
        raise ValueError(f"unknown mode {mode!r}")

    # verify the returned guarantees exactly
    final_danger = dangerous_trace[-1]
    for i, c in enumerate(state.constraints):
        prob = state.probs[i]
        if prob * prob > Fraction(n * n) * p:
            raise AssertionError("restricted probability bound violated")
    covered_weight = sum((wts.weights.get(x, Fraction(0)) for x in conn.source
                          if not (conn.det_sets[x] & final_danger)), Fraction(0))
    shortfall = Fraction(1) - covered_weight
    if shortfall > 0 and shortfall * shortfall > Fraction(d_rho * d_rho) * p:
        if mode == "derandomized":
            raise AssertionError("coverage bound violated")
        # a sampled word may miss the bound; fall back to the guaranteed mode
        return construct_partial(csp, red, wts, mode="derandomized",
                                 cap_bits=cap_bits)

    trace = PartialSolutionTrace(
        classes=list(classes),
        chosen=list(chosen),
        dangerous=list(dangerous_trace),
        phi=phi_trace,
        covered_weight=covered_weight,
        p=p,
        mode=mode,
    )
    return h, trace


def branch_trace(csp: Csp, word: Sequence[int], cap_bits: int = DEFAULT_CAP_BITS):
    """Raw level recursion for a given branch word (no estimator, no
    guarantee verification): returns (h_w, dangerous sets per prefix).

    Used to replay the construction along adversarial words, where
    constraints do get dangerous and freeze.
    """
    st = stats(csp, cap_bits)
    classes = discrete_partition(csp)
    if len(word) != len(classes):
        raise ValueError(f"word length {len(word)} != {len(classes)} classes")
    state = _LevelState(csp, st.p, cap_bits)
    h: PartialAssignment = {}
    dangerous = [state.dangerous_elements()]
    for cls, value in zip(classes, word):
        fresh = [x for x in cls if x not in dangerous[-1]]
        h.update(const_assignment(fresh, value))
        state.fix(fresh, value)
        dangerous.append(state.dangerous_elements())
    return h, dangerous


STEP_TARGET_N = 16
STEP_TARGET_EPS = Fraction(1, 2**32)
RESIDUAL_N = 8
RESIDUAL_EPS = Fraction(1, 2**15)


@dataclass
class StepResult:
    g: PartialAssignment
    residual: Csp
    residual_reduction: Reduction
    covered_fraction: Fraction
    certificates: dict
    trace: PartialSolutionTrace


def step(source: Csp, red_in: Reduction, wts: WeightedGroundSet, seed: int = 0,
         n_grid=None, cap_bits: int = DEFAULT_CAP_BITS,
         eps_binary: Fraction = Fraction(1)) -> StepResult:
    """One halving step: bootstrap (direct route preferred) to a sparse
    target, binary-reduce it, build a partial solution, pull it back.

    Certifies exactly: the binary target satisfies p (d+1)^16 <= 2^-32 and
    p d(rho)^2 <= 1/4; the returned g covers weight >= 1/2; the residual
    target satisfies p (d+1)^8 <= 2^-15.
    """
    from .binary import binary_reduce
    from .compilers import bootstrap
    from .connect import compose

    boot = bootstrap(source, red_in, STEP_TARGET_N,
                     STEP_TARGET_EPS / (1 + eps_binary),
                     n_grid=n_grid or (16, 64, 256), cap_bits=cap_bits)
    if not boot.feasible:
        raise StepInfeasibleError(f"bootstrap infeasible: {boot.report}")
    if not boot.exact_p:
        raise StepInfeasibleError(
            "amplified bootstrap target lacks exact probabilities at desk scale; "
            "cannot certify the step inequalities")

    encoded, tau_red = binary_reduce(boot.csp, eps_binary, cap_bits)
    sigma_conn = compose(boot.reduction.connection, tau_red.connection)
    sigma = Reduction(sigma_conn, encoded, validated=boot.reduction.validated)

    est = stats(encoded, cap_bits)
    d_sigma = sigma.degree()
    cert = {
        "p_target": str(est.p),
        "d_target": est.d,
        "d_sigma": d_sigma,
        "target_(16,2^-32)": est.p * (est.d + 1) ** STEP_TARGET_N <= STEP_TARGET_EPS,
        "p*d(rho)^2<=1/4": est.p * Fraction(d_sigma) ** 2 <= Fraction(1, 4),
    }
    if not cert["target_(16,2^-32)"] or not cert["p*d(rho)^2<=1/4"]:
        raise StepInfeasibleError(f"step inequality failed: {cert}")

    h, trace = construct_partial(encoded, sigma, wts, cap_bits=cap_bits, seed=seed)
    g, residual_red = pull_partial(sigma, h)
    residual_target = residual_red.target
    rst = stats(residual_target, cap_bits)
    cert["p_residual"] = str(rst.p)
    cert["residual_(8,2^-15)"] = rst.p * (rst.d + 1) ** RESIDUAL_N <= RESIDUAL_EPS
    if not cert["residual_(8,2^-15)"]:
        raise StepInfeasibleError(f"residual certification failed: {cert}")

    covered = wts.weight_of(g.keys())
    if covered < Fraction(1, 2):
        raise StepInfeasibleError(f"step covered only {covered} < 1/2")
    residual_source = restrict_csp(source, g)
    return StepResult(
        g=g,
        residual=residual_source,
        residual_reduction=residual_red,
        covered_fraction=covered,
        certificates=cert,
        trace=trace,
    )


def extend_solution(csp: Csp, g: PartialAssignment, seed: int = 0,
                    cap_bits: int = DEFAULT_CAP_BITS) -> Dict[int, int]:
    """Extend a partial solution to a total one.

    Element by element, picks a value avoiding every live forbidden-pattern
    projection (sound and complete when the range exceeds the number of
    live patterns); falls back to exhaustive search within the cap, then
    the resampling oracle.
    """
    current = dict(g)
    remaining = restrict_csp(csp, g)
    for y in list(remaining.ground):
        live = [c for c in remaining.constraints if y in c.domain]
        bad = set()
        enumerable = True
        for c in live:
            if c.members is None:
                enumerable = False
                break
            pos = c.domain.index(y)
            bad.update(member[pos] for member in c.members)
        if enumerable and len(bad) < remaining.m:
            value = 1
            while value in bad:
                value += 1
            current[y] = value
            remaining = restrict_csp(remaining, {y: value})
            continue
        try:
            for solution in solutions_exhaustive(remaining, cap_bits):
                current.update(solution)
                return current
            raise StepInfeasibleError("no extension exists for the residual CSP")
        except EnumerationCapError:
            result = moser_tardos_solve(remaining, seed=seed,
                                        cap=500 * max(1, len(remaining.constraints)))
            if result.assignment is None:
                raise StepInfeasibleError("extension search capped out")
            current.update(result.assignment)
            return current
    return current


@dataclass
class SolveResult:
    assignment: Dict[int, int]
    iterations: int
    step_reports: List[dict]
    extended_elements: List[int]
    traces: List[PartialSolutionTrace]


def solve_weighted(source: Csp, wts: WeightedGroundSet, max_iters: Optional[int] = None,
                   seed: int = 0, cap_bits: int = DEFAULT_CAP_BITS,
                   n_grid=None) -> SolveResult:
    """Iterate `step` until every positive-weight element is assigned; the
    remaining (zero-weight) elements are finished by direct extension.
    Remaining weight at least halves per iteration, so the loop runs at
    most ceil(log2(1/min positive weight)) + 1 times."""
    pre = lll_check(source, "measurable", cap_bits=cap_bits)
    if not pre.holds:
        raise StepInfeasibleError(
            f"source fails the measurable condition by {-pre.margin}")
    minw = wts.min_positive()
    if max_iters is None:
        # ceil(log2(1 / min positive weight)) + 1, in exact arithmetic
        max_iters = 1
        if minw is not None:
            k = 0
            while (1 << k) * minw < 1:
                k += 1
            max_iters = k + 1

    g_total: PartialAssignment = {}
    current = source
    red = identity_reduction(source)
    current_wts = wts
    reports: List[dict] = []
    traces: List[PartialSolutionTrace] = []
    iterations = 0
    while current.ground:
        live = current_wts.restricted_normalized(current.ground) if current_wts else None
        if live is None:
            break  # only zero-weight elements remain
        if iterations >= max_iters:
            raise StepInfeasibleError(
                f"iteration budget {max_iters} exceeded with "
                f"{len(current.ground)} elements uncovered")
        result = step(current, red, live, seed=derived_rng(seed, "step", iterations).randrange(2**30),
                      n_grid=n_grid, cap_bits=cap_bits)
        g_total.update(result.g)
        reports.append({
            "iteration": iterations,
            "covered_fraction_of_remaining": str(result.covered_fraction),
            "covered_elements": len(result.g),
            "certificates": result.certificates,
        })
        traces.append(result.trace)
        current = result.residual
        red = result.residual_reduction
        iterations += 1

    extended = [x for x in source.ground if x not in g_total]
    assignment = extend_solution(source, g_total, seed=seed, cap_bits=cap_bits)
    ok, violated = is_solution(source, assignment)
    if not ok:
        raise AssertionError(f"solver produced an invalid assignment: {violated[:5]}")
    return SolveResult(
        assignment=assignment,
        iterations=iterations,
        step_reports=reports,
        extended_elements=extended,
        traces=traces,
    )


@dataclass
class CoverResult:
    members: List[PartialAssignment]
    levels: int
    per_element_counts: Dict[int, int]
    certificates: List[dict]
    route: str


def cover_family(source: Csp, seed: int = 0, budget: int = 1 << 16,
                 cap_bits: int = DEFAULT_CAP_BITS,
                 eps_binary: Fraction = Fraction(1)) -> CoverResult:
    """Finite covering family: the pulled-back partial solutions h_w over
    every branch word w in [2]^N of the binary construction.

    Verifies that the domains cover the ground set, counts per-element
    coverage (expected >= 2^(N-1) when d(rho) sqrt(p) <= 1/2), and
    certifies every residual either by the (8, 2^-15) inequality or by a
    checked solution witness (a solvable residual is reducible to the
    empty CSP).
    """
    from .binary import binary_reduce
    from .compilers import bootstrap
    from .connect import compose

    red_in = identity_reduction(source)
    route = "direct-binary"
    pre = lll_check(source, "measurable", cap_bits=cap_bits)
    if pre.holds:
        boot = bootstrap(source, red_in, STEP_TARGET_N,
                         STEP_TARGET_EPS / (1 + eps_binary), cap_bits=cap_bits)
        if boot.feasible and boot.exact_p:
            red_in = boot.reduction
            route = f"bootstrap-{boot.route}"
    target = red_in.target

    encoded, tau_red = binary_reduce(target, eps_binary, cap_bits)
    sigma = Reduction(compose(red_in.connection, tau_red.connection), encoded,
                      validated=red_in.validated)
    est = stats(encoded, cap_bits)
    p, d = est.p, est.d
    if p * (d + 1) ** 2 > INV_E2_LOWER / 4:
        raise StepInfeasibleError(
            "binary target fails the partial-solution precondition")
    d_sigma = sigma.degree()
    if Fraction(4) * Fraction(d_sigma * d_sigma) * p > 1:
        raise StepInfeasibleError(
            "d(rho) sqrt(p) <= 1/2 fails; family coverage not certified")

    classes = discrete_partition(encoded)
    levels = len(classes)
    if 2**levels > budget:
        raise CoverBudgetError(levels, budget)

    conn = sigma.connection
    members: List[PartialAssignment] = []
    certificates: List[dict] = []
    counts = {x: 0 for x in source.ground}

    def visit(level: int, state: _LevelState, h: PartialAssignment):
        if level == len(classes):
            danger = state.dangerous_elements()
            covered = [x for x in conn.source if not (conn.det_sets[x] & danger)]
            for x in covered:
                counts[x] += 1
            g = apply(conn, h)
            members.append(g)
            residual = restrict_csp(encoded, h)
            rst = stats(residual, cap_bits)
            cert = {"p_residual": str(rst.p), "d_residual": rst.d}
            ok = rst.p * (rst.d + 1) ** RESIDUAL_N <= RESIDUAL_EPS
            cert["residual_(8,2^-15)"] = ok
            if not ok:
                witness = _solution_witness(residual, seed, cap_bits)
                cert["solution_witness"] = witness is not None
                if witness is None:
                    raise StepInfeasibleError(
                        "residual neither satisfies the (8,2^-15) inequality "
                        "nor has a verified solution witness")
            certificates.append(cert)
            return
        danger = state.dangerous_elements()
        fresh = [x for x in classes[level] if x not in danger]
        for value in (1, 2):
            snap = state.snapshot()
            state.fix(fresh, value)
            h_next = dict(h)
            h_next.update(const_assignment(fresh, value))
            visit(level + 1, state, h_next)
            state.restore(snap)

    visit(0, _LevelState(encoded, p, cap_bits), {})

    uncovered = [x for x in source.ground if counts[x] == 0]
    if uncovered:
        raise AssertionError(f"family fails to cover {uncovered[:5]}")
    return CoverResult(
        members=members,
        levels=levels,
        per_element_counts=counts,
        certificates=certificates,
        route=route,
    )


def _solution_witness(csp: Csp, seed: int, cap_bits: int) -> Optional[Dict[int, int]]:
    try:
        for solution in solutions_exhaustive(csp, cap_bits):
            return solution
        return None
    except EnumerationCapError:
        result = moser_tardos_solve(csp, seed=seed, cap=500 * max(1, len(csp.constraints)))
        return result.assignment
