"""Theorem-level monitors evaluated along a trajectory.

Each check returns a CheckResult with a signed margin (non-negative when the
claim holds strictly), the slack it was allowed, and a reproducer (worst
time, worst pair).  Vacuous hypotheses yield INCONCLUSIVE, never PASS.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ChordArcError
from .flow import Trajectory
from .forcing import ForcingKind, ForcingSpec, evaluate_forcing
from .geometry import DiscreteCurve, vertex_ds, vertex_frames
from .pairs import (
    first_variation_residual,
    min_chord_arc,
    second_variation_check,
    theta_potential,
    theta_scan,
)


class CheckId(Enum):
    H_NONNEG = "H_NONNEG"
    THETA_RANGE = "THETA_RANGE"
    THETA_MIN_MONOTONE = "THETA_MIN_MONOTONE"
    THETA_HEAT = "THETA_HEAT"
    LEMMA21_DUALITY = "LEMMA21_DUALITY"
    RATIO_LOWER_BOUND = "RATIO_LOWER_BOUND"
    RATIO_LIMINF_AT_MIN = "RATIO_LIMINF_AT_MIN"
    EMBEDDEDNESS = "EMBEDDEDNESS"
    CONSERVATION = "CONSERVATION"


class CheckStatus(Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    margin: float
    worst_time: float
    worst_pair: tuple[int, int] | None
    tolerance_used: float
    note: str = ""

    def __post_init__(self):
        if self.status == CheckStatus.FAIL.value and not (
            self.margin < -self.tolerance_used
        ):
            raise ValueError(
                f"{self.name}: FAIL requires margin < -tolerance "
                f"({self.margin} vs {self.tolerance_used})"
            )


@dataclass
class MonitorReport:
    checks: list[CheckResult]

    def __post_init__(self):
        names = [c.name for c in self.checks]
        if len(names) != len(set(names)):
            raise ValueError("duplicate check identifiers in report")

    @property
    def any_fail(self) -> bool:
        return any(c.status == CheckStatus.FAIL.value for c in self.checks)

    def to_text(self) -> str:
        lines = [
            f"{'check':24s} {'status':13s} {'margin':>12s} {'tol':>10s} "
            f"{'worst_t':>10s} pair"
        ]
        for c in self.checks:
            pair = f"({c.worst_pair[0]},{c.worst_pair[1]})" if c.worst_pair else "-"
            lines.append(
                f"{c.name:24s} {c.status:13s} {c.margin:+12.4e} "
                f"{c.tolerance_used:10.3e} {c.worst_time:10.4f} {pair}"
            )
            if c.note:
                lines.append(f"{'':24s} note: {c.note}")
        return "\n".join(lines) + "\n"

    def to_jsonl(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for c in self.checks:
                rec = asdict(c)
                rec["worst_pair"] = list(c.worst_pair) if c.worst_pair else None
                fh.write(json.dumps(rec) + "\n")

    @staticmethod
    def from_jsonl(path: str | Path) -> "MonitorReport":
        checks = []
        with open(path) as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                pair = rec.pop("worst_pair")
                checks.append(
                    CheckResult(
                        worst_pair=tuple(pair) if pair is not None else None, **rec
                    )
                )
        return MonitorReport(checks)


def _result(check: CheckId, status: CheckStatus, margin: float,
            worst_time: float = 0.0, worst_pair=None, tol: float = 0.0,
            note: str = "") -> CheckResult:
    return CheckResult(
        name=check.value,
        status=status.value,
        margin=float(margin),
        worst_time=float(worst_time),
        worst_pair=worst_pair,
        tolerance_used=float(tol),
        note=note,
    )


def _valid(values: np.ndarray) -> np.ndarray:
    return np.isfinite(values)


def check_h_nonneg(traj: Trajectory) -> CheckResult:
    """h(t) stays in [0, inf) at every sample."""
    h = traj.series("h")
    t = traj.times
    ok = _valid(h)
    if not ok.any():
        return _result(CheckId.H_NONNEG, CheckStatus.INCONCLUSIVE, 0.0,
                       note="no finite h samples")
    k = int(np.nanargmin(np.where(ok, h, np.inf)))
    margin = float(h[k])
    status = CheckStatus.PASS if margin >= -1e-12 else CheckStatus.FAIL
    return _result(CheckId.H_NONNEG, status, margin, t[k], tol=1e-12)


def check_theta_range(traj: Trajectory) -> CheckResult:
    """theta stays inside (-pi, 3 pi), with mesh-scaled slack."""
    tmin = traj.series("theta_min")
    tmax = traj.series("theta_max")
    turn = traj.series("max_turning")
    t = traj.times
    ok = _valid(tmin) & _valid(tmax)
    if not ok.any():
        return _result(CheckId.THETA_RANGE, CheckStatus.INCONCLUSIVE, 0.0,
                       note="no finite theta samples")
    lower = np.where(ok, tmin + np.pi, np.inf)
    upper = np.where(ok, 3.0 * np.pi - tmax, np.inf)
    margins = np.minimum(lower, upper)
    k = int(np.argmin(margins))
    tol = max(0.05, 3.0 * (turn[k] if np.isfinite(turn[k]) else 0.0))
    margin = float(margins[k])
    status = CheckStatus.PASS if margin >= -tol else CheckStatus.FAIL
    note = "" if ok.all() else "some samples had no finite theta"
    return _result(CheckId.THETA_RANGE, status, margin, t[k],
                   worst_pair=_scan_pair(traj, k), tol=tol, note=note)


def _scan_pair(traj: Trajectory, k: int) -> tuple[int, int] | None:
    if traj.snapshots is None or k >= len(traj.snapshots):
        return None
    try:
        sc = theta_scan(traj.snapshots[k])
    except ChordArcError:
        return None
    return sc.argmin


def check_theta_min_monotone(traj: Trajectory, tol_active: float = 0.05,
                             tol_mono: float = 1e-3) -> CheckResult:
    """While theta_min < -tol_active it must not decrease between samples."""
    if len(traj.samples) < 10:
        raise ValueError("monotonicity check needs at least 10 samples")
    tmin = traj.series("theta_min")
    t = traj.times
    ok = _valid(tmin)
    active = ok[:-1] & ok[1:] & (tmin[:-1] < -tol_active)
    if not active.any():
        return _result(CheckId.THETA_MIN_MONOTONE, CheckStatus.INCONCLUSIVE, 0.0,
                       note="theta_min never below the active threshold")
    inc = np.diff(tmin)
    inc = np.where(active, inc, np.inf)
    k = int(np.argmin(inc))
    margin = float(inc[k])
    status = CheckStatus.PASS if margin >= -tol_mono else CheckStatus.FAIL
    return _result(CheckId.THETA_MIN_MONOTONE, status, margin, t[k + 1],
                   tol=tol_mono)


def _theta_pair_value(U: np.ndarray, i: int, j: int) -> float:
    v = U[j] - U[i]
    if j < i:
        v += 2.0 * np.pi
    return float(v)


def _nonuniform_ddt(y0, y1, y2, t0, t1, t2) -> float:
    d1 = t1 - t0
    d2 = t2 - t1
    return float((y2 * d1 * d1 - y0 * d2 * d2 + y1 * (d2 * d2 - d1 * d1))
                 / (d1 * d2 * (d1 + d2)))


def check_theta_heat(traj: Trajectory, threshold: float = 0.2,
                     noise_floor: float = 1e-4) -> CheckResult:
    """(d/dt - Laplacian) theta = 0, finite differences over snapshot triples.

    Pairs are tracked by arc-length fraction from the (material) vertex 0.
    A fraction-tracked point drifts through the material at arc speed
    u(a) = a dL/dt - int_0^{aL} kappa F ds, so the estimator subtracts the
    induced advection kappa_q u_q - kappa_p u_p before comparing against the
    intrinsic Laplacian (second index differences in each endpoint).
    """
    if traj.snapshots is None or len(traj.snapshots) < 3:
        raise ValueError("theta heat check needs at least 3 snapshots")
    times = traj.times
    snaps = traj.snapshots
    n = snaps[0].n
    bases = [(k * n) // 8 for k in range(8)]
    lams = (0.1, 0.2, 0.3, 0.4, 0.5)
    resids = []
    signals = []
    for m in range(1, len(snaps) - 1):
        c0, c1, c2 = snaps[m - 1], snaps[m], snaps[m + 1]
        if c0.n != n or c1.n != n or c2.n != n:
            continue
        try:
            U0 = theta_potential(c0)
            U1 = theta_potential(c1)
            U2 = theta_potential(c2)
            frames = vertex_frames(c1)
            h = evaluate_forcing(traj.forcing, c1)
        except ChordArcError:
            continue
        kap = frames.kappa
        g = kap * (h - kap) * vertex_ds(c1)
        prefix = np.concatenate(([0.0], np.cumsum(0.5 * (g[:-1] + g[1:]))))
        ldot = float(np.sum(g))
        delta = c1.length / n
        t0, t1, t2 = times[m - 1], times[m], times[m + 1]
        for a in bases:
            for lam in lams:
                i = a % n
                j = (a + int(round(lam * n))) % n
                gap = (j - i) % n
                if gap < 2 or gap > n - 2:
                    continue
                dth = _nonuniform_ddt(
                    _theta_pair_value(U0, i, j),
                    _theta_pair_value(U1, i, j),
                    _theta_pair_value(U2, i, j),
                    t0, t1, t2,
                )
                th_c = _theta_pair_value(U1, i, j)
                lap = (
                    _theta_pair_value(U1, (i - 1) % n, j)
                    - 2.0 * th_c
                    + _theta_pair_value(U1, (i + 1) % n, j)
                    + _theta_pair_value(U1, i, (j - 1) % n)
                    - 2.0 * th_c
                    + _theta_pair_value(U1, i, (j + 1) % n)
                ) / delta**2
                u_i = (i / n) * ldot - prefix[i]
                u_j = (j / n) * ldot - prefix[j]
                adv = kap[j] * u_j - kap[i] * u_i
                resids.append(abs(dth - adv - lap))
                signals.append(abs(lap))
    if not signals:
        return _result(CheckId.THETA_HEAT, CheckStatus.INCONCLUSIVE, 0.0,
                       note="no usable snapshot triples")
    med_signal = float(np.median(signals))
    if med_signal < noise_floor:
        return _result(CheckId.THETA_HEAT, CheckStatus.INCONCLUSIVE, 0.0,
                       note=f"Laplacian below noise floor ({med_signal:.2e})")
    rel = float(np.median(resids)) / med_signal
    margin = threshold - rel
    status = CheckStatus.PASS if margin >= 0.0 else CheckStatus.FAIL
    return _result(CheckId.THETA_HEAT, status, margin,
                   traj.times[len(times) // 2], tol=0.0,
                   note=f"median relative residual {rel:.3e}")


def check_lemma21_duality(traj: Trajectory) -> CheckResult:
    """theta_max + theta_min = 2 pi at every sample (embedded curves)."""
    tmin = traj.series("theta_min")
    tmax = traj.series("theta_max")
    turn = traj.series("max_turning")
    t = traj.times
    ok = _valid(tmin) & _valid(tmax)
    if not ok.any():
        return _result(CheckId.LEMMA21_DUALITY, CheckStatus.INCONCLUSIVE, 0.0,
                       note="no finite theta samples")
    dev = np.where(ok, np.abs(tmax + tmin - 2.0 * np.pi), -np.inf)
    k = int(np.argmax(dev))
    tol = max(1e-2, 3.0 * (turn[k] if np.isfinite(turn[k]) else 0.0))
    margin = -float(dev[k])
    status = CheckStatus.PASS if margin >= -tol else CheckStatus.FAIL
    return _result(CheckId.LEMMA21_DUALITY, status, margin, t[k],
                   worst_pair=_scan_pair(traj, k), tol=tol)


def check_ratio_lower_bound(traj: Trajectory, slack: float = 0.05) -> CheckResult:
    """inf d/psi stays bounded away from zero: the running minimum never
    drops below (1 - slack) times the floor seen over the first tenth of
    the run, and a sustained decay toward zero is a failure."""
    ratio = traj.series("ratio_min")
    t = traj.times
    ok = _valid(ratio)
    if ok.sum() < 2:
        return _result(CheckId.RATIO_LOWER_BOUND, CheckStatus.INCONCLUSIVE, 0.0,
                       note="not enough finite ratio samples")
    vals = ratio[ok]
    tv = t[ok]
    head = max(1, int(np.ceil(0.10 * len(vals))))
    ref = float(np.min(vals[:head]))
    k = int(np.argmin(vals))
    floor_val = float(vals[k])
    margin = floor_val - ref
    tol = slack * ref
    if margin >= -tol:
        status = CheckStatus.PASS
        note = ""
    else:
        tail = vals[-max(2, len(vals) // 4):]
        decaying = bool(tail[-1] < tail[0]) and floor_val < 0.5 * vals[0]
        status = CheckStatus.FAIL if decaying else CheckStatus.INCONCLUSIVE
        note = ("ratio decayed below half its initial value and is still "
                "falling" if decaying else
                "dipped below the early floor but is not collapsing")
    pair = None
    if traj.snapshots is not None:
        idx = int(np.flatnonzero(ok)[k])
        try:
            pair_rec = min_chord_arc(traj.snapshots[idx])[1]
            pair = (pair_rec.i, pair_rec.j)
        except ChordArcError:
            pair = None
    return _result(CheckId.RATIO_LOWER_BOUND, status, margin, tv[k],
                   worst_pair=pair, tol=tol, note=note)


def check_minimizer_identities(traj: Trajectory) -> CheckResult:
    """First/second variation identities at the d/psi argmin per snapshot:
    first-variation residual < 10 L/N and curvature-difference margin
    >= -10 L/N."""
    if traj.snapshots is None:
        return _result(CheckId.RATIO_LIMINF_AT_MIN, CheckStatus.INCONCLUSIVE,
                       0.0, note="no snapshots recorded")
    worst = np.inf
    worst_t = 0.0
    worst_pair = None
    used = 0
    for t, curve in zip(traj.times, traj.snapshots):
        try:
            _, rec = min_chord_arc(curve)
            fv = first_variation_residual(curve, rec)
            sv = second_variation_check(curve, rec)
        except ChordArcError:
            continue
        used += 1
        budget = 10.0 * curve.length / curve.n
        m = min(budget - fv, sv + budget)
        if m < worst:
            worst = m
            worst_t = t
            worst_pair = (rec.i, rec.j)
    if used == 0:
        return _result(CheckId.RATIO_LIMINF_AT_MIN, CheckStatus.INCONCLUSIVE,
                       0.0, note="no usable snapshots")
    status = CheckStatus.PASS if worst >= 0.0 else CheckStatus.FAIL
    return _result(CheckId.RATIO_LIMINF_AT_MIN, status, worst, worst_t,
                   worst_pair=worst_pair, tol=0.0)


def check_embeddedness(traj: Trajectory) -> CheckResult:
    """Every sample reports an embedded curve."""
    flags = [s.embedded for s in traj.samples]
    t = traj.times
    if all(flags):
        return _result(CheckId.EMBEDDEDNESS, CheckStatus.PASS, 1.0, t[-1])
    k = flags.index(False)
    return _result(CheckId.EMBEDDEDNESS, CheckStatus.FAIL, -1.0, t[k],
                   tol=0.0, note="self-intersection detected")


def check_conservation(traj: Trajectory) -> CheckResult:
    """Family-specific conserved quantity, or the length-rate identity.

    Area (resp. length) preserving runs must keep the relative drift below
    1e-4.  For the other families the finite-difference dL/dt is compared
    against 2 pi h - integral kappa^2 ds within 5% (median over samples).
    """
    t = traj.times
    kind = traj.forcing.kind
    if kind is ForcingKind.AREA_PRESERVING:
        a = traj.series("area")
        dev = float(np.max(np.abs(a - a[0])) / abs(a[0]))
        k = int(np.argmax(np.abs(a - a[0])))
        status = CheckStatus.PASS if dev <= 1e-4 else CheckStatus.FAIL
        return _result(CheckId.CONSERVATION, status, -dev, t[k], tol=1e-4,
                       note="relative area drift")
    if kind is ForcingKind.LENGTH_PRESERVING:
        length = traj.series("length")
        dev = float(np.max(np.abs(length - length[0])) / length[0])
        k = int(np.argmax(np.abs(length - length[0])))
        status = CheckStatus.PASS if dev <= 1e-4 else CheckStatus.FAIL
        return _result(CheckId.CONSERVATION, status, -dev, t[k], tol=1e-4,
                       note="relative length drift")
    if len(traj.samples) < 3:
        return _result(CheckId.CONSERVATION, CheckStatus.INCONCLUSIVE, 0.0,
                       note="too few samples for a rate estimate")
    length = traj.series("length")
    h = traj.series("h")
    ksq = traj.series("integral_kappa_sq")
    fd = (length[2:] - length[:-2]) / (t[2:] - t[:-2])
    pred = 2.0 * np.pi * h[1:-1] - ksq[1:-1]
    ok = np.isfinite(fd) & np.isfinite(pred)
    if not ok.any():
        return _result(CheckId.CONSERVATION, CheckStatus.INCONCLUSIVE, 0.0,
                       note="no finite rate samples")
    scale = float(np.median(np.abs(pred[ok])))
    if scale < 1e-9:
        return _result(CheckId.CONSERVATION, CheckStatus.INCONCLUSIVE, 0.0,
                       note="length rate below noise floor (stationary curve)")
    rel = float(np.median(np.abs(fd[ok] - pred[ok]))) / scale
    k = int(np.argmax(np.abs(np.where(ok, fd - pred, 0.0))))
    status = CheckStatus.PASS if rel <= 0.05 else CheckStatus.FAIL
    return _result(CheckId.CONSERVATION, status, -rel, t[k + 1], tol=0.05,
                   note="median relative dL/dt mismatch")


_CHECKS = {
    CheckId.H_NONNEG: check_h_nonneg,
    CheckId.THETA_RANGE: check_theta_range,
    CheckId.THETA_MIN_MONOTONE: check_theta_min_monotone,
    CheckId.THETA_HEAT: check_theta_heat,
    CheckId.LEMMA21_DUALITY: check_lemma21_duality,
    CheckId.RATIO_LOWER_BOUND: check_ratio_lower_bound,
    CheckId.RATIO_LIMINF_AT_MIN: check_minimizer_identities,
    CheckId.EMBEDDEDNESS: check_embeddedness,
    CheckId.CONSERVATION: check_conservation,
}


def run_checks(traj: Trajectory, enabled: list[CheckId] | None = None) -> MonitorReport:
    """Evaluate the enabled checks (default: all) in catalog order.

    Precondition violations (too few samples/snapshots) degrade to
    INCONCLUSIVE here; call the check functions directly to get the error.
    """
    results = []
    for check in CheckId:
        if enabled is not None and check not in enabled:
            continue
        fn = _CHECKS[check]
        try:
            results.append(fn(traj))
        except ValueError as exc:
            results.append(_result(check, CheckStatus.INCONCLUSIVE, 0.0,
                                   note=f"precondition not met: {exc}"))
    return MonitorReport(results)


def render_report(report: MonitorReport, text_path: str | Path | None = None,
                  jsonl_path: str | Path | None = None) -> str:
    """Deterministic text rendering; optionally writes text and JSONL files."""
    text = report.to_text()
    if text_path is not None:
        Path(text_path).write_text(text)
    if jsonl_path is not None:
        report.to_jsonl(jsonl_path)
    return text
