"""Command line entry point: simulate, audit, and sweep subcommands.

Exit codes: 0 when every enabled check is PASS or INCONCLUSIVE, 2 when any
check FAILs, 1 on usage, configuration, or admission errors.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config
from .errors import (
    AdmissionError,
    ChordArcError,
    ConfigError,
    GenerationError,
    NotCriticalPairError,
)
from .flow import Trajectory, run, write_trajectory_csv
from .generators import GeneratedCurve, generate
from .geometry import (
    DiscreteCurve,
    ensure_positive_orientation,
    is_embedded,
    read_curve,
    write_curve,
)
from .pairs import (
    classify_minimizer,
    min_chord_arc,
    theta_scan,
    write_pair_table,
)
from .verify import MonitorReport, render_report, run_checks


def _load_initial(cfg: RunConfig) -> tuple[DiscreteCurve, str]:
    if cfg.curve_path is not None:
        curve = read_curve(cfg.curve_path)
        return curve, f"file:{cfg.curve_path}"
    gen: GeneratedCurve = generate(cfg.generator, seed=cfg.seed)
    note = (f"{cfg.generator.name} theta0 in [{gen.theta_min0:.4f}, "
            f"{gen.theta_max0:.4f}] admissible={gen.admissible}")
    return gen.curve, note


def _simulate(cfg: RunConfig, quiet: bool = False) -> tuple[Trajectory, MonitorReport]:
    curve, note = _load_initial(cfg)
    traj = run(curve, cfg.forcing, cfg.stepper, record_snapshots=True)
    report = run_checks(traj, cfg.monitors)

    out = cfg.output
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(traj, out / "trajectory.csv")
    text = render_report(report, out / "report.txt", out / "report.jsonl")
    if cfg.snapshots_to_disk and traj.snapshots is not None:
        snapdir = out / "snapshots"
        snapdir.mkdir(exist_ok=True)
        for idx, snap in enumerate(traj.snapshots):
            write_curve(snapdir / f"t_{idx:06d}.curve", snap)
    if not quiet:
        print(f"initial: {note}")
        print(f"terminal: {traj.terminal.value}"
              + (f" ({traj.error})" if traj.error else ""))
        print(text, end="")
    return traj, report


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    traj, report = _simulate(cfg)
    return 2 if report.any_fail else 0


def cmd_audit(args) -> int:
    curve = read_curve(args.curvefile)
    curve = ensure_positive_orientation(curve)
    embedded, witness = is_embedded(curve)
    print(f"vertices:       {curve.n}")
    print(f"length:         {curve.length:.12g}")
    print(f"area:           {curve.signed_area:.12g}")
    print(f"embedded:       {embedded}"
          + (f" (witness edge pair {witness})" if witness else ""))
    failed = not embedded
    if embedded:
        sc = theta_scan(curve)
        duality = abs(sc.theta_max + sc.theta_min - 2.0 * np.pi)
        ratio_min, rec = min_chord_arc(curve)
        print(f"theta_min:      {sc.theta_min:.6f} at pair {sc.argmin}")
        print(f"theta_max:      {sc.theta_max:.6f} at pair {sc.argmax}")
        print(f"duality margin: {duality:.3e}  (|theta_max + theta_min - 2 pi|)")
        print(f"admissible:     {sc.theta_min >= -np.pi}  (theta_min >= -pi)")
        print(f"ratio_min:      {ratio_min:.6f} at pair ({rec.i},{rec.j}), "
              f"d={rec.d:.6g} l={rec.l:.6g}")
        try:
            cls = classify_minimizer(curve, rec)
            print(f"minimizer:      case {cls.case_id.value}, beta={cls.beta:.6f}, "
                  f"k={cls.k}, residuals={ {k: round(v, 6) for k, v in cls.residuals.items()} }")
        except NotCriticalPairError as exc:
            print(f"minimizer:      not first-order critical ({exc})")
    if args.dump_pairs:
        write_pair_table(curve, args.dump_pairs)
        print(f"pair table written to {args.dump_pairs}")
    return 2 if failed else 0


def _sweep_one(cfg: RunConfig, combo: dict[str, float], outdir: Path):
    params = dict(cfg.generator.params)
    params.update(combo)
    sub = replace(
        cfg,
        generator=replace(cfg.generator, params=params),
        output=outdir,
        sweep={},
    )
    try:
        traj, report = _simulate(sub, quiet=True)
    except ChordArcError as exc:
        return combo, None, None, str(exc)
    return combo, traj, report, None


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if not cfg.sweep:
        raise ConfigError("sweep needs a [sweep] section with parameter lists")
    keys = sorted(cfg.sweep)
    grid = [dict(zip(keys, values))
            for values in itertools.product(*(cfg.sweep[k] for k in keys))]
    threads = max(1, int(os.environ.get("CHORDARC_THREADS", "1")))
    cfg.output.mkdir(parents=True, exist_ok=True)

    def outdir(combo):
        tag = "_".join(f"{k}{combo[k]:g}" for k in keys)
        return cfg.output / tag

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(
                lambda c: _sweep_one(cfg, c, outdir(c)), grid))
    else:
        results = [_sweep_one(cfg, c, outdir(c)) for c in grid]

    results.sort(key=lambda r: tuple(r[0][k] for k in keys))
    check_names = [c.name for c in results[0][2].checks] if results and results[0][2] else []
    agg = cfg.output / "aggregate.csv"
    any_fail = False
    with open(agg, "w") as fh:
        header = keys + ["terminal", "ratio_min", "theta_min", "L_final", "A_final"]
        header += check_names
        fh.write(",".join(header) + "\n")
        for combo, traj, report, err in results:
            row = [repr(float(combo[k])) for k in keys]
            if traj is None:
                row += [f"error:{err}", "", "", "", ""] + [""] * len(check_names)
            else:
                ratio = traj.series("ratio_min")
                tmin = traj.series("theta_min")
                row += [
                    traj.terminal.value,
                    repr(float(np.nanmin(ratio))),
                    repr(float(np.nanmin(tmin))),
                    repr(float(traj.samples[-1].length)),
                    repr(float(traj.samples[-1].area)),
                ]
                by_name = {c.name: c.status for c in report.checks}
                row += [by_name.get(name, "") for name in check_names]
                any_fail = any_fail or report.any_fail
            fh.write(",".join(row) + "\n")
    print(f"sweep of {len(grid)} runs written to {agg}")
    return 2 if any_fail else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chordarc",
        description="Forced curve shortening flow with chord-arc and "
                    "total-curvature monitors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a flow and its monitors")
    p_sim.add_argument("config", type=Path)
    p_sim.set_defaults(fn=cmd_simulate)

    p_audit = sub.add_parser("audit", help="static scan of a curve file")
    p_audit.add_argument("curvefile", type=Path)
    p_audit.add_argument("--dump-pairs", type=Path, default=None,
                         help="write the full O(N^2) pair table as CSV")
    p_audit.set_defaults(fn=cmd_audit)

    p_sweep = sub.add_parser("sweep", help="grid over generator parameters")
    p_sweep.add_argument("config", type=Path)
    p_sweep.set_defaults(fn=cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, GenerationError, AdmissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
