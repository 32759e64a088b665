import random
from fractions import Fraction

import pytest

from locallemma.connect import identity_reduction
from locallemma.csp import (
    Constraint,
    Csp,
    const_assignment,
    is_solution,
    probability,
    restrict_constraint,
    restrict_csp,
    stats,
)
from locallemma.engine import (
    QuadExpr,
    WeightedGroundSet,
    construct_partial,
    cover_family,
    extend_solution,
    lll_check,
    moser_tardos_solve,
    solve_weighted,
    step,
)
from locallemma.errors import StepInfeasibleError
from locallemma.randgen import (
    random_binary_lowp_csp,
    random_cover_csp,
    random_measurable_csp,
    random_symmetric_csp,
)


# ---------------------------------------------------------------- lll_check

def test_lll_check_empty_csp():
    empty = Csp((0, 1), 2, ())
    for which in ("symmetric", "general", "measurable", "neighborhood-growth"):
        verdict = lll_check(empty, which)
        assert verdict.holds and verdict.margin > 0


def test_lll_check_measurable_margin_zero():
    c = Constraint.explicit(tuple(range(15)), 2, [tuple([1] * 15)])  # p = 2^-15, d = 0
    verdict = lll_check(Csp(tuple(range(15)), 2, (c,)), "measurable")
    assert verdict.holds and verdict.margin == 0


def test_lll_symmetric_implies_general_default_eta():
    for seed in range(40):
        csp = random_symmetric_csp(seed)
        if lll_check(csp, "symmetric").holds:
            assert lll_check(csp, "general").holds


def test_lll_neighborhood_growth():
    c1 = Constraint.explicit((0, 1), 8, [(1, 1)])
    c2 = Constraint.explicit((1, 2), 8, [(1, 1)])
    csp = Csp((0, 1, 2), 8, (c1, c2))
    verdict = lll_check(csp, "neighborhood-growth")
    assert verdict.holds  # p = 1/64, 2-ball has 3 vertices


# ---------------------------------------------------------------- QuadExpr

def test_quadexpr_signs():
    p = Fraction(1, 4)  # sqrt(p) = 1/2
    assert QuadExpr(Fraction(1), Fraction(-1), p).sign() == 1   # 1 - 1/2
    assert QuadExpr(Fraction(-1), Fraction(2), p).sign() == 0   # -1 + 2*(1/2)
    assert QuadExpr(Fraction(-1), Fraction(1), p).sign() == -1  # -1 + 1/2
    assert QuadExpr(Fraction(0), Fraction(0), p).sign() == 0
    assert QuadExpr(Fraction(0), Fraction(1), Fraction(0)).sign() == 0


def test_quadexpr_compare_random_against_float():
    rng = random.Random(1)
    for _ in range(300):
        p = Fraction(rng.randint(0, 50), 100)
        e1 = QuadExpr(Fraction(rng.randint(-8, 8), 7), Fraction(rng.randint(-8, 8), 5), p)
        e2 = QuadExpr(Fraction(rng.randint(-8, 8), 7), Fraction(rng.randint(-8, 8), 5), p)
        if abs(e1.float() - e2.float()) > 1e-9:
            assert (e1 < e2) == (e1.float() < e2.float())


# ---------------------------------------------------------------- Moser-Tardos

def test_mt_no_constraints():
    csp = Csp((0, 1), 3, ())
    result = moser_tardos_solve(csp, seed=0)
    assert result.assignment is not None and not result.capped


def test_mt_single_forbidden_value():
    c = Constraint.explicit((0,), 2, [(1,)])
    csp = Csp((0,), 2, (c,))
    for seed in range(10):
        result = moser_tardos_solve(csp, seed=seed, cap=50)
        assert result.assignment == {0: 2}


def test_mt_valid_under_symmetric_condition():
    for seed in range(100):
        csp = random_symmetric_csp(seed)
        result = moser_tardos_solve(csp, seed=seed, cap=50 * len(csp.constraints))
        assert not result.capped
        assert is_solution(csp, result.assignment)[0]


# ---------------------------------------------------------------- construct_partial

def test_construct_partial_no_constraints_total():
    csp = Csp(tuple(range(6)), 2, ())
    red = identity_reduction(csp)
    wts = WeightedGroundSet.uniform(csp.ground)
    h, trace = construct_partial(csp, red, wts)
    assert len(h) == 6 and trace.covered_weight == 1


def test_construct_partial_guarantees_and_trace():
    for seed in range(25):
        csp = random_binary_lowp_csp(seed, max_ground=40)
        st = stats(csp)
        red = identity_reduction(csp)
        wts = WeightedGroundSet.uniform(csp.ground)
        h, trace = construct_partial(csp, red, wts)
        n = csp.m
        restricted = restrict_csp(csp, h)
        for c in restricted.constraints:
            pr = probability(c)
            assert pr * pr <= Fraction(n * n) * st.p
        shortfall = 1 - trace.covered_weight
        d_rho = red.degree()
        assert shortfall <= 0 or shortfall * shortfall <= Fraction(d_rho * d_rho) * st.p
        # claim monotone (i): dangerous sets grow along the trace
        for a, b in zip(trace.dangerous, trace.dangerous[1:]):
            assert a <= b
        # claim monotone (ii): h is defined off the final dangerous set
        final = trace.dangerous[-1]
        for x in csp.ground:
            if x not in final:
                assert x in h
        # estimator is non-increasing along the chosen path
        for a, b in zip(trace.phi, trace.phi[1:]):
            assert (b - a).sign() <= 0
        # phi at the root is at most d(rho) sqrt(p)
        root_phi = trace.phi[0]
        bound = QuadExpr(Fraction(0), Fraction(d_rho), st.p)
        assert (root_phi - bound).sign() <= 0
        # final uncovered weight is at most phi at the leaf
        uncovered = QuadExpr(1 - trace.covered_weight, Fraction(0), st.p)
        assert (uncovered - trace.phi[-1]).sign() <= 0


def test_construct_partial_dangerous_freezing_replay():
    # once dangerous, a constraint's restriction never changes again
    for seed in range(12):
        csp = random_binary_lowp_csp(seed + 100, max_ground=36)
        red = identity_reduction(csp)
        wts = WeightedGroundSet.uniform(csp.ground)
        h, trace = construct_partial(csp, red, wts)
        st = stats(csp)
        # replay the recursion level by level
        current = {i: c for i, c in enumerate(csp.constraints)}
        frozen_at = {}
        partial = {}
        for level, (cls, value) in enumerate(zip(trace.classes, trace.chosen)):
            danger = trace.dangerous[level]
            fresh = [x for x in cls if x not in danger]
            g = const_assignment(fresh, value)
            for i, c in current.items():
                if i in frozen_at:
                    continue
                current[i] = restrict_constraint(c, g)
                pr = probability(current[i])
                if pr * pr > st.p:
                    frozen_at[i] = level
            partial.update(g)
        assert partial == h
        for i, c in current.items():
            if i in frozen_at:
                # frozen restrictions survive to the end unchanged
                direct = restrict_constraint(csp.constraints[i], h)
                assert direct.domain == c.domain
                assert direct.materialize().members == c.materialize().members


def test_construct_partial_sampled_mode():
    csp = random_binary_lowp_csp(7, max_ground=30)
    red = identity_reduction(csp)
    wts = WeightedGroundSet.uniform(csp.ground)
    h, trace = construct_partial(csp, red, wts, mode="sampled", samples=4, seed=5)
    st = stats(csp)
    shortfall = 1 - trace.covered_weight
    d_rho = red.degree()
    assert shortfall <= 0 or shortfall * shortfall <= Fraction(d_rho * d_rho) * st.p


def test_construct_partial_precondition():
    c = Constraint.explicit((0, 1), 2, [(1, 1), (2, 2)])  # p = 1/2
    csp = Csp((0, 1), 2, (c,))
    with pytest.raises(StepInfeasibleError):
        construct_partial(csp, identity_reduction(csp),
                          WeightedGroundSet.uniform(csp.ground))


def test_construct_partial_h_is_partial_solution():
    for seed in range(10):
        csp = random_binary_lowp_csp(seed + 40, max_ground=30)
        red = identity_reduction(csp)
        wts = WeightedGroundSet.uniform(csp.ground)
        h, _ = construct_partial(csp, red, wts)
        from locallemma.csp import check_partial_solution

        assert check_partial_solution(csp, h) is True


# ---------------------------------------------------------------- step / solve

def test_step_trivial_source():
    csp = Csp(tuple(range(4)), 4, ())
    wts = WeightedGroundSet.uniform(csp.ground)
    result = step(csp, identity_reduction(csp), wts)
    assert result.covered_fraction == 1
    assert len(result.g) == 4


def test_step_covers_half_and_certifies():
    for seed in (0, 3, 9):
        csp = random_measurable_csp(seed, max_ground=90)
        wts = WeightedGroundSet.uniform(csp.ground)
        result = step(csp, identity_reduction(csp), wts, seed=seed)
        assert result.covered_fraction >= Fraction(1, 2)
        assert result.certificates["target_(16,2^-32)"]
        assert result.certificates["p*d(rho)^2<=1/4"]
        assert result.certificates["residual_(8,2^-15)"]
        # residual certification replay: 2 sqrt(p) (d+1)^8 <= 2^-15 in squared form
        p = Fraction(result.certificates["p_target"])
        d = result.certificates["d_target"]
        lhs_sq = 4 * p * Fraction((d + 1) ** 16)
        assert lhs_sq <= Fraction(1, 2**30)


def test_solve_weighted_no_constraints():
    csp = Csp(tuple(range(5)), 3, ())
    wts = WeightedGroundSet.uniform(csp.ground)
    result = solve_weighted(csp, wts)
    assert is_solution(csp, result.assignment)[0]


def test_solve_weighted_random_instances():
    for seed in range(6):
        csp = random_measurable_csp(seed + 50, max_ground=120)
        wts = WeightedGroundSet.uniform(csp.ground)
        result = solve_weighted(csp, wts, seed=seed)
        assert is_solution(csp, result.assignment)[0]
        minw = wts.min_positive()
        k = 0
        while (1 << k) * minw < 1:
            k += 1
        assert result.iterations <= k + 1


def test_solve_weighted_zero_weight_extension():
    csp = random_measurable_csp(31, max_ground=60)
    n = len(csp.ground)
    weights = {x: Fraction(0) for x in csp.ground}
    positive = list(csp.ground)[: n // 2]
    for x in positive:
        weights[x] = Fraction(1, len(positive))
    wts = WeightedGroundSet(weights)
    result = solve_weighted(csp, wts, seed=2)
    assert is_solution(csp, result.assignment)[0]


def test_solve_weighted_rejects_bad_source():
    c = Constraint.explicit((0, 1), 2, [(1, 1), (2, 2)])
    csp = Csp((0, 1), 2, (c,))
    with pytest.raises(StepInfeasibleError):
        solve_weighted(csp, WeightedGroundSet.uniform(csp.ground))


def test_extend_solution_large_range():
    csp = random_measurable_csp(17, max_ground=40)
    f = extend_solution(csp, {})
    assert is_solution(csp, f)[0]


# ---------------------------------------------------------------- cover_family

def test_cover_family_no_constraints():
    csp = Csp((0, 1, 2), 2, ())
    result = cover_family(csp)
    assert result.levels == 1
    assert len(result.members) == 2
    assert sorted(set(m.values()) for m in result.members) == [{1}, {2}]


def test_cover_family_coverage_counts():
    for seed in range(5):
        csp = random_cover_csp(seed, max_levels=11)
        result = cover_family(csp, budget=1 << 14)
        assert len(result.members) == 2 ** result.levels
        for x in csp.ground:
            assert result.per_element_counts[x] >= 2 ** (result.levels - 1)
        union = set()
        for member in result.members:
            union.update(member.keys())
        assert union == set(csp.ground)


def test_cover_family_budget():
    from locallemma.errors import CoverBudgetError

    csp = random_cover_csp(3, max_levels=12)
    with pytest.raises(CoverBudgetError):
        cover_family(csp, budget=4)
