#!/usr/bin/env python3
"""Sweep the deterministic pipeline over directed cycles and write one
JSON report per size."""

import argparse
import json
import pathlib
import sys

from locallemma.cli import ExperimentConfig, run_experiment


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256, 512])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--outdir", default="reports")
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for n in args.sizes:
        cfg = ExperimentConfig(
            pipeline="det",
            graph={"kind": "directed_cycle", "params": {"n": n}},
            algorithm="cole_vishkin_3color",
            seed=args.seed,
            params={"n": n},
        )
        report = run_experiment(cfg)
        path = outdir / f"det_cycle_{n}.json"
        path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        status = "ok" if report["passed"] else "FAIL"
        print(f"n={n:4d} {status} {report['checks'][0]}")
        failures += 0 if report["passed"] else 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
