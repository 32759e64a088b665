#!/usr/bin/env python3
"""Solver suite over random instances: condition margins, resampling-oracle
success, the full weighted solver, and covering families."""

import argparse
import sys
import time

from locallemma import (
    WeightedGroundSet,
    cover_family,
    is_solution,
    lll_check,
    moser_tardos_solve,
    solve_weighted,
)
from locallemma.randgen import (
    random_cover_csp,
    random_measurable_csp,
    random_symmetric_csp,
)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--count", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    failures = 0
    t0 = time.time()
    for i in range(args.count):
        csp = random_symmetric_csp(args.seed * 1000 + i)
        result = moser_tardos_solve(csp, seed=i, cap=50 * len(csp.constraints))
        ok = result.assignment is not None and is_solution(csp, result.assignment)[0]
        margin = lll_check(csp, "symmetric").margin
        print(f"symmetric #{i}: margin={margin} resamples={result.resamples} ok={ok}")
        failures += 0 if ok else 1

    for i in range(args.count):
        csp = random_measurable_csp(args.seed * 2000 + i, max_ground=120)
        wts = WeightedGroundSet.uniform(csp.ground)
        result = solve_weighted(csp, wts, seed=i)
        ok = is_solution(csp, result.assignment)[0]
        print(f"weighted #{i}: iterations={result.iterations} ok={ok}")
        failures += 0 if ok else 1

    for i in range(max(2, args.count // 3)):
        csp = random_cover_csp(args.seed * 3000 + i, max_levels=11)
        result = cover_family(csp, seed=i, budget=1 << 14)
        min_cov = min(result.per_element_counts.values())
        ok = min_cov >= 2 ** (result.levels - 1)
        print(f"cover #{i}: levels={result.levels} min_coverage={min_cov} ok={ok}")
        failures += 0 if ok else 1

    print(f"done in {time.time() - t0:.1f}s, failures={failures}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
