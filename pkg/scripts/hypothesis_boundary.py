#!/usr/bin/env python3
"""Probe the admissibility boundary of the distance comparison principle.

Generates curves whose initial total local curvature minimum sweeps from
well inside the hypothesis class (theta_min > -pi) to deliberately outside
it (the spiral-notch family, theta_min ~ -1.2 pi), runs each under the
area-preserving flow, and tabulates what happens to inf d/psi.  An
inadmissible curve that loses embeddedness or resolution is a finding,
not a bug.

Usage: python scripts/hypothesis_boundary.py [outdir]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from chordarc.flow import StepperConfig, run, write_trajectory_csv
from chordarc.forcing import ForcingKind, ForcingSpec
from chordarc.generators import GeneratorSpec, generate
from chordarc.verify import render_report, run_checks


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", nargs="?", default="out/boundary", type=Path)
    ap.add_argument("--n", type=int, default=1024)
    args = ap.parse_args(argv)

    cases = [
        ("star_eps0.2", GeneratorSpec("star", n=args.n, params={"eps": 0.2})),
        ("star_eps0.4", GeneratorSpec("star", n=args.n, params={"eps": 0.4})),
        ("dumbbell", GeneratorSpec("dumbbell", n=args.n)),
        ("notch_1.05pi", GeneratorSpec("spiral_notch", n=args.n,
                                       params={"target": -1.05 * np.pi})),
        ("notch_1.2pi", GeneratorSpec("spiral_notch", n=args.n,
                                      params={"target": -1.2 * np.pi})),
    ]
    spec = ForcingSpec(ForcingKind.AREA_PRESERVING)
    for tag, gspec in cases:
        gen = generate(gspec)
        cfg = StepperConfig(n=args.n, max_time=0.5, max_steps=10**7,
                            monitor_every=250)
        traj = run(gen.curve, spec, cfg)
        report = run_checks(traj)
        cell = args.outdir / tag
        cell.mkdir(parents=True, exist_ok=True)
        write_trajectory_csv(traj, cell / "trajectory.csv")
        render_report(report, cell / "report.txt", cell / "report.jsonl")
        ratio = traj.series("ratio_min")
        print(f"{tag:14s} theta0_min {gen.theta_min0 / np.pi:+.3f} pi  "
              f"admissible={str(gen.admissible):5s}  "
              f"terminal={traj.terminal.value:16s}  "
              f"ratio_min {np.nanmin(ratio):.4f} -> final "
              f"{ratio[-1] if np.isfinite(ratio[-1]) else float('nan'):.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
